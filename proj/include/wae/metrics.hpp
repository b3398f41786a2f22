// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAE_METRICS_HPP
#define WAE_METRICS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wae/core.hpp"

namespace wae {

/// 2x2 confusion tally with PNEUMONIA as the positive class.
struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fn = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fn + fp + tn; }
    std::int64_t positives() const { return tp + fn; }
    std::int64_t negatives() const { return fp + tn; }
};

/// One class's one-vs-rest precision/recall/F1 and ground-truth support.
struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
};

/// Support-weighted averages of per-class metrics.
struct WeightedAverages {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Full binary classification report. `auc` is absent when no score-based
/// curve was computable (e.g. decisions only, or single-class input).
struct ClassificationReport {
    ConfusionCounts counts;
    double accuracy = 0.0;
    ClassMetrics pneumonia;
    ClassMetrics normal;
    WeightedAverages weighted;
    std::optional<double> auc;
};

/// ROC polyline. Points run from (0,0) to (1,1) with fpr and tpr both
/// nondecreasing; each interior point corresponds to one unique score
/// threshold (ties grouped). The leading (0,0) carries threshold +infinity.
struct RocCurve {
    struct Point {
        double fpr = 0.0;
        double tpr = 0.0;
        double threshold = 0.0;
    };
    std::vector<Point> points;
};

ConfusionCounts confusion(std::span<const Label> true_labels,
                          std::span<const Label> predicted_labels);

/// (tp+tn)/total. Throws DomainError on zero total.
double accuracy(const ConfusionCounts& c);

/// One-vs-rest metrics for `cls`. Zero-denominator precision or recall is
/// defined as 0, and F1 is 0 when precision+recall is 0.
ClassMetrics class_metrics(const ConfusionCounts& c, Label cls);

/// Support-weighted mean of each metric. Throws DomainError if the supports
/// sum to zero.
WeightedAverages weighted_average(std::span<const ClassMetrics> per_class);

/// Threshold sweep over unique score values in descending order, tied scores
/// grouped into one step. Requires at least one positive and one negative
/// label; throws DomainError otherwise.
RocCurve roc_curve(const Eigen::VectorXd& scores, std::span<const Label> true_labels);

/// Trapezoidal area under the ROC polyline.
double auc(const RocCurve& curve);

/// Assembles counts, accuracy, per-class and weighted metrics from decision
/// vectors. No AUC (decisions carry no ranking information).
ClassificationReport report_from_labels(std::span<const Label> true_labels,
                                        std::span<const Label> predicted_labels);

/// Assembles the full report from scores: decisions via label_from_score at
/// `threshold`, plus AUC when both classes are present.
ClassificationReport report_from_scores(std::span<const Label> true_labels,
                                        const Eigen::VectorXd& scores,
                                        double threshold = 0.5);

/// Fraction -> percentage rounded half-away-from-zero to 2 decimals
/// (0.986348... -> 98.63), the convention used by every human-readable table.
double round_percent(double fraction);

} // namespace wae

#endif // WAE_METRICS_HPP
