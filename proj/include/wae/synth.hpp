// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAE_SYNTH_HPP
#define WAE_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "wae/core.hpp"
#include "wae/head.hpp"

namespace wae {

/// Label-conditioned error rates for one synthetic model: miss_rate on
/// positives, false_alarm_rate on negatives.
struct ErrorProfile {
    double miss_rate = 0.0;
    double false_alarm_rate = 0.0;
};

/// Recipe for correlated synthetic prediction sets. error_correlation is the
/// probability that all models share one latent error draw on a sample
/// (common-shock coupling); score_margin bounds how far scores sit from the
/// 0.5 threshold.
struct SynthSpec {
    int n = 586;
    int n_pos = 423;
    std::vector<ErrorProfile> profiles;
    double error_correlation = 0.0;
    double score_margin = 0.4;
    std::uint64_t seed = 0;

    void validate() const;

    /// Two models sized like a 586-sample split with 423 positives, tuned to
    /// roughly 97.1% and 96.2% accuracy with correlation 0.7.
    static SynthSpec paper_like(std::uint64_t seed);
};

/// One PredictionSet per profile over a shared ground truth (ids s000001...,
/// first n_pos positive). Correct predictions score on the true side of 0.5,
/// errors on the wrong side, magnitude margin*u with u ~ Uniform(0.2, 1].
std::vector<PredictionSet> gen_predictions(const SynthSpec& spec);

/// Gaussian two-class feature maps: class means at +-(separation/2) along a
/// random unit direction in channel space, constant over the h x w grid,
/// plus unit-variance noise. First n_pos samples are positive.
FeatureBatch gen_features(int n, int c, int h, int w, double separation, int n_pos,
                          std::uint64_t seed);

} // namespace wae

#endif // WAE_SYNTH_HPP
