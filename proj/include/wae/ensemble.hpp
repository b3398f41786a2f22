// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAE_ENSEMBLE_HPP
#define WAE_ENSEMBLE_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "wae/core.hpp"
#include "wae/metrics.hpp"

namespace wae {

/// Convex combination weights over the models of an AlignedPredictions:
/// one weight per model, each in [0,1], summing to 1 within 1e-9.
struct WeightVector {
    Eigen::VectorXd weights;

    /// Validates the simplex constraints; throws DomainError on violation.
    static WeightVector from(Eigen::VectorXd weights);
};

/// Outcome of the exhaustive weight grid search.
struct SearchResult {
    WeightVector best_weights;
    double best_accuracy = 0.0;
    ClassificationReport best_report;
    std::int64_t grid_size = 0;
    std::vector<double> per_model_accuracy;
};

/// Combined scores plus the evaluation of the combination.
struct EnsembleEvaluation {
    Eigen::VectorXd scores;
    ClassificationReport report;
};

/// Per-sample weighted average of model scores: scores * w.
Eigen::VectorXd combine(const AlignedPredictions& aligned, const WeightVector& w);

/// All weight vectors on the simplex lattice with spacing `step`: the integer
/// compositions of m = 1/step into n_models nonnegative parts, scaled to sum
/// to 1, emitted in ascending lexicographic order. Throws DomainError when
/// 1/step is not an integer (within 1e-9) or n_models is outside [1,4].
std::vector<WeightVector> enumerate_weight_grid(int n_models, double step = 0.005);

/// Exhaustive search over the weight grid maximizing decision accuracy at
/// `threshold`. Ties break by higher weighted F1, then by lexicographically
/// smallest weight vector, so the result is independent of evaluation order;
/// `n_workers` shards the grid without changing the outcome.
SearchResult search(const AlignedPredictions& aligned, double step = 0.005,
                    double threshold = 0.5, int n_workers = 1);

/// Combines with fixed weights and evaluates the result at `threshold`.
EnsembleEvaluation apply(const AlignedPredictions& aligned, const WeightVector& w,
                         double threshold = 0.5);

} // namespace wae

#endif // WAE_ENSEMBLE_HPP
