// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#include "wae/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wae {

ConfusionCounts confusion(std::span<const Label> true_labels,
                          std::span<const Label> predicted_labels) {
    if (true_labels.empty()) {
        throw DomainError("confusion requires nonempty label lists");
    }
    if (true_labels.size() != predicted_labels.size()) {
        throw DomainError("confusion label lists differ in length");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        const bool actual_pos = true_labels[i] == Label::kPneumonia;
        const bool predicted_pos = predicted_labels[i] == Label::kPneumonia;
        if (actual_pos) {
            predicted_pos ? ++c.tp : ++c.fn;
        } else {
            predicted_pos ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

double accuracy(const ConfusionCounts& c) {
    if (c.total() <= 0) {
        throw DomainError("accuracy undefined on zero samples");
    }
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

namespace {

double ratio_or_zero(std::int64_t num, std::int64_t den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

} // namespace

ClassMetrics class_metrics(const ConfusionCounts& c, Label cls) {
    if (c.total() <= 0) {
        throw DomainError("class_metrics undefined on zero samples");
    }
    // NORMAL is the mirrored one-vs-rest view: its "true positives" are tn.
    ClassMetrics m;
    if (cls == Label::kPneumonia) {
        m.precision = ratio_or_zero(c.tp, c.tp + c.fp);
        m.recall = ratio_or_zero(c.tp, c.tp + c.fn);
        m.support = c.positives();
    } else {
        m.precision = ratio_or_zero(c.tn, c.tn + c.fn);
        m.recall = ratio_or_zero(c.tn, c.tn + c.fp);
        m.support = c.negatives();
    }
    const double pr = m.precision + m.recall;
    m.f1 = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
    return m;
}

WeightedAverages weighted_average(std::span<const ClassMetrics> per_class) {
    std::int64_t total = 0;
    for (const auto& m : per_class) total += m.support;
    if (total <= 0) {
        throw DomainError("weighted_average requires positive total support");
    }
    WeightedAverages w;
    for (const auto& m : per_class) {
        const double share = static_cast<double>(m.support);
        w.precision += m.precision * share;
        w.recall += m.recall * share;
        w.f1 += m.f1 * share;
    }
    const double n = static_cast<double>(total);
    w.precision /= n;
    w.recall /= n;
    w.f1 /= n;
    return w;
}

RocCurve roc_curve(const Eigen::VectorXd& scores, std::span<const Label> true_labels) {
    if (static_cast<std::size_t>(scores.size()) != true_labels.size()) {
        throw DomainError("roc_curve scores and labels differ in length");
    }
    std::int64_t pos = 0;
    std::int64_t neg = 0;
    for (const Label label : true_labels) {
        label == Label::kPneumonia ? ++pos : ++neg;
    }
    if (pos == 0 || neg == 0) {
        throw DomainError("roc_curve requires at least one positive and one negative label");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // Group every sample tied at this score into one step.
        while (i < order.size() && scores[order[i]] == threshold) {
            true_labels[static_cast<std::size_t>(order[i])] == Label::kPneumonia ? ++tp : ++fp;
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos), threshold});
    }
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return area;
}

ClassificationReport report_from_labels(std::span<const Label> true_labels,
                                        std::span<const Label> predicted_labels) {
    ClassificationReport report;
    report.counts = confusion(true_labels, predicted_labels);
    report.accuracy = accuracy(report.counts);
    report.pneumonia = class_metrics(report.counts, Label::kPneumonia);
    report.normal = class_metrics(report.counts, Label::kNormal);
    const ClassMetrics per_class[] = {report.pneumonia, report.normal};
    report.weighted = weighted_average(per_class);
    return report;
}

ClassificationReport report_from_scores(std::span<const Label> true_labels,
                                        const Eigen::VectorXd& scores,
                                        double threshold) {
    if (static_cast<std::size_t>(scores.size()) != true_labels.size()) {
        throw DomainError("report_from_scores scores and labels differ in length");
    }
    std::vector<Label> predicted;
    predicted.reserve(true_labels.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        predicted.push_back(label_from_score(scores[i], threshold));
    }
    ClassificationReport report = report_from_labels(true_labels, predicted);
    if (report.counts.positives() > 0 && report.counts.negatives() > 0) {
        report.auc = auc(roc_curve(scores, true_labels));
    }
    return report;
}

double round_percent(double fraction) {
    return std::round(fraction * 10000.0) / 100.0;
}

} // namespace wae
