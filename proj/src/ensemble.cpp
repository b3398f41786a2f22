// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#include "wae/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

namespace wae {

WeightVector WeightVector::from(Eigen::VectorXd weights) {
    if (weights.size() == 0) {
        throw DomainError("weight vector is empty");
    }
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0 && weights[i] <= 1.0)) {
            throw DomainError("weight " + std::to_string(weights[i]) + " outside [0,1]");
        }
    }
    if (std::abs(weights.sum() - 1.0) > 1e-9) {
        throw DomainError("weights sum to " + std::to_string(weights.sum()) + ", expected 1");
    }
    return WeightVector{std::move(weights)};
}

Eigen::VectorXd combine(const AlignedPredictions& aligned, const WeightVector& w) {
    if (w.weights.size() != aligned.model_count()) {
        throw DomainError("weight count " + std::to_string(w.weights.size()) +
                          " does not match model count " + std::to_string(aligned.model_count()));
    }
    return aligned.scores * w.weights;
}

namespace {

std::int64_t grid_resolution(double step) {
    if (!(step > 0.0 && step <= 1.0)) {
        throw DomainError("grid step must lie in (0,1]");
    }
    const auto m = static_cast<std::int64_t>(std::llround(1.0 / step));
    if (m < 1 || std::abs(static_cast<double>(m) * step - 1.0) > 1e-9) {
        throw DomainError("grid step must divide 1 exactly, got " + std::to_string(step));
    }
    return m;
}

// Ascending lexicographic enumeration of the compositions of m into n parts.
void for_each_composition(int n_models, std::int64_t m,
                          const std::function<void(const std::vector<std::int64_t>&)>& visit) {
    std::vector<std::int64_t> parts(static_cast<std::size_t>(n_models), 0);
    const std::function<void(int, std::int64_t)> rec = [&](int slot, std::int64_t remaining) {
        if (slot == n_models - 1) {
            parts[static_cast<std::size_t>(slot)] = remaining;
            visit(parts);
            return;
        }
        for (std::int64_t k = 0; k <= remaining; ++k) {
            parts[static_cast<std::size_t>(slot)] = k;
            rec(slot + 1, remaining - k);
        }
    };
    rec(0, m);
}

Eigen::VectorXd composition_to_weights(const std::vector<std::int64_t>& parts, std::int64_t m) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        w[static_cast<Eigen::Index>(i)] =
            static_cast<double>(parts[i]) / static_cast<double>(m);
    }
    return w;
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
    std::int64_t result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

std::int64_t correct_count(const AlignedPredictions& aligned, const Eigen::VectorXd& combined,
                           double threshold) {
    std::int64_t correct = 0;
    for (Eigen::Index i = 0; i < combined.size(); ++i) {
        const Label predicted = label_from_score(combined[i], threshold);
        if (predicted == aligned.true_labels[static_cast<std::size_t>(i)]) ++correct;
    }
    return correct;
}

double weighted_f1_of(const AlignedPredictions& aligned, const Eigen::VectorXd& combined,
                      double threshold) {
    std::vector<Label> predicted;
    predicted.reserve(static_cast<std::size_t>(combined.size()));
    for (Eigen::Index i = 0; i < combined.size(); ++i) {
        predicted.push_back(label_from_score(combined[i], threshold));
    }
    const ConfusionCounts c = confusion(aligned.true_labels, predicted);
    const ClassMetrics per_class[] = {class_metrics(c, Label::kPneumonia),
                                      class_metrics(c, Label::kNormal)};
    return weighted_average(per_class).f1;
}

// Candidate in the search's total order: higher correct count wins, then
// higher weighted F1, then the lexicographically smaller weight vector
// (= lower grid index, since the grid is enumerated lexicographically).
struct Candidate {
    std::int64_t correct = -1;
    double f1 = -1.0;
    std::int64_t grid_index = -1;

    bool beats(const Candidate& other) const {
        if (correct != other.correct) return correct > other.correct;
        if (f1 != other.f1) return f1 > other.f1;
        return grid_index < other.grid_index;
    }
};

} // namespace

std::vector<WeightVector> enumerate_weight_grid(int n_models, double step) {
    if (n_models < 1 || n_models > 4) {
        throw DomainError("unsupported model arity " + std::to_string(n_models) +
                          " (exhaustive grid supports 1..4 models)");
    }
    const std::int64_t m = grid_resolution(step);
    std::vector<WeightVector> grid;
    grid.reserve(static_cast<std::size_t>(binomial(m + n_models - 1, n_models - 1)));
    for_each_composition(n_models, m, [&](const std::vector<std::int64_t>& parts) {
        grid.push_back(WeightVector{composition_to_weights(parts, m)});
    });
    return grid;
}

SearchResult search(const AlignedPredictions& aligned, double step, double threshold,
                    int n_workers) {
    if (aligned.sample_count() == 0) {
        throw DomainError("search requires a nonempty aligned prediction set");
    }
    if (n_workers < 1) {
        throw DomainError("search requires at least one worker");
    }
    const auto n_models = static_cast<int>(aligned.model_count());
    const std::vector<WeightVector> grid = enumerate_weight_grid(n_models, step);
    const auto grid_size = static_cast<std::int64_t>(grid.size());

    const auto evaluate_range = [&](std::int64_t begin, std::int64_t end) {
        Candidate best;
        for (std::int64_t g = begin; g < end; ++g) {
            const Eigen::VectorXd combined = combine(aligned, grid[static_cast<std::size_t>(g)]);
            Candidate cand{correct_count(aligned, combined, threshold), 0.0, g};
            if (cand.correct < best.correct) continue;
            cand.f1 = weighted_f1_of(aligned, combined, threshold);
            if (cand.beats(best)) best = cand;
        }
        return best;
    };

    Candidate best;
    if (n_workers == 1 || grid_size < 2) {
        best = evaluate_range(0, grid_size);
    } else {
        const auto workers = static_cast<std::int64_t>(std::min<std::int64_t>(n_workers, grid_size));
        std::vector<Candidate> local(static_cast<std::size_t>(workers));
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(workers));
        for (std::int64_t t = 0; t < workers; ++t) {
            const std::int64_t begin = grid_size * t / workers;
            const std::int64_t end = grid_size * (t + 1) / workers;
            threads.emplace_back([&, t, begin, end] {
                local[static_cast<std::size_t>(t)] = evaluate_range(begin, end);
            });
        }
        for (auto& thread : threads) thread.join();
        // Reduce in ascending shard order with the same total order the
        // shards used, so the winner matches the single-threaded scan.
        for (const Candidate& cand : local) {
            if (cand.grid_index >= 0 && cand.beats(best)) best = cand;
        }
    }

    SearchResult result;
    result.grid_size = grid_size;
    result.best_weights = grid[static_cast<std::size_t>(best.grid_index)];
    const EnsembleEvaluation eval = apply(aligned, result.best_weights, threshold);
    result.best_report = eval.report;
    result.best_accuracy = eval.report.accuracy;
    for (Eigen::Index j = 0; j < aligned.model_count(); ++j) {
        const Eigen::VectorXd column = aligned.scores.col(j);
        const std::int64_t correct = correct_count(aligned, column, threshold);
        result.per_model_accuracy.push_back(static_cast<double>(correct) /
                                            static_cast<double>(aligned.sample_count()));
    }
    return result;
}

EnsembleEvaluation apply(const AlignedPredictions& aligned, const WeightVector& w,
                         double threshold) {
    EnsembleEvaluation out;
    out.scores = combine(aligned, WeightVector::from(w.weights));
    out.report = report_from_scores(aligned.true_labels, out.scores, threshold);
    return out;
}

} // namespace wae
