// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAE_CORE_HPP
#define WAE_CORE_HPP

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wae/error.hpp"

namespace wae {

/// Binary class label. PNEUMONIA is the positive class (encoded 1) for every
/// metric in this library; NORMAL is the negative class (encoded 0).
enum class Label : int {
    kNormal = 0,
    kPneumonia = 1,
};

inline const char* to_string(Label label) {
    return label == Label::kPneumonia ? "PNEUMONIA" : "NORMAL";
}

/// One sample's ground truth and a model's probability score for it.
struct PredictionRecord {
    std::string sample_id;
    Label true_label = Label::kNormal;
    double score = 0.0; // in [0, 1]
};

/// One model's scored predictions over a sample set.
struct PredictionSet {
    std::string model_name;
    std::vector<PredictionRecord> records;
};

/// Several models' scores joined on sample_id. Rows are samples in ascending
/// lexicographic sample_id order; column j holds model_names[j]'s scores.
struct AlignedPredictions {
    std::vector<std::string> sample_ids;
    std::vector<Label> true_labels;
    std::vector<std::string> model_names;
    Eigen::MatrixXd scores; // sample_count x model_count

    Eigen::Index sample_count() const { return scores.rows(); }
    Eigen::Index model_count() const { return scores.cols(); }
};

/// Hard decision at `threshold`: PNEUMONIA iff score >= threshold (ties go
/// positive). Throws DomainError if score is outside [0,1] or threshold is
/// outside (0,1).
Label label_from_score(double score, double threshold = 0.5);

/// Checks a set's own invariants: nonempty, unique sample_ids, scores in
/// [0,1]. Throws DomainError on violation.
void validate(const PredictionSet& set);

/// Joins the sets on sample_id. Every set must cover the same sample_id
/// universe with consistent true labels; otherwise throws DomainError naming
/// the offending ids (or the conflicting sample).
AlignedPredictions align(std::span<const PredictionSet> sets);

} // namespace wae

#endif // WAE_CORE_HPP
