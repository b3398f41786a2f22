// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#include "wae/synth.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "wae/rng.hpp"

namespace wae {

namespace {

std::string sample_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%06d", index + 1);
    return buf;
}

} // namespace

void SynthSpec::validate() const {
    if (n < 1) throw DomainError("synth spec needs n >= 1");
    if (n_pos < 0 || n_pos > n) throw DomainError("synth spec needs 0 <= n_pos <= n");
    if (profiles.empty()) throw DomainError("synth spec needs at least one model profile");
    for (const ErrorProfile& p : profiles) {
        if (p.miss_rate < 0.0 || p.miss_rate > 1.0 || p.false_alarm_rate < 0.0 ||
            p.false_alarm_rate > 1.0) {
            throw DomainError("error rates must lie in [0,1]");
        }
    }
    if (error_correlation < 0.0 || error_correlation > 1.0) {
        throw DomainError("error_correlation must lie in [0,1]");
    }
    if (!(score_margin > 0.0 && score_margin < 0.5)) {
        throw DomainError("score_margin must lie in (0, 0.5)");
    }
}

SynthSpec SynthSpec::paper_like(std::uint64_t seed) {
    SynthSpec spec;
    spec.n = 586;
    spec.n_pos = 423;
    spec.profiles = {{10.0 / 423.0, 7.0 / 163.0}, {13.0 / 423.0, 9.0 / 163.0}};
    spec.error_correlation = 0.7;
    spec.score_margin = 0.4;
    spec.seed = seed;
    return spec;
}

std::vector<PredictionSet> gen_predictions(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n_models = spec.profiles.size();

    std::vector<PredictionSet> sets(n_models);
    for (std::size_t m = 0; m < n_models; ++m) {
        sets[m].model_name = "model_" + std::to_string(m + 1);
        sets[m].records.reserve(static_cast<std::size_t>(spec.n));
    }

    Rng rng(spec.seed);
    for (int i = 0; i < spec.n; ++i) {
        const Label truth = i < spec.n_pos ? Label::kPneumonia : Label::kNormal;
        // Fixed draw order per sample keeps the stream aligned regardless of
        // outcomes: shock coin, shared error uniform, then per-model error
        // uniforms and score magnitudes.
        const bool shared = rng.next_double() < spec.error_correlation;
        const double u_shared = rng.next_double();
        for (std::size_t m = 0; m < n_models; ++m) {
            const double u_own = rng.next_double();
            const double magnitude = 1.0 - 0.8 * rng.next_double(); // (0.2, 1]
            const ErrorProfile& prof = spec.profiles[m];
            const double rate =
                truth == Label::kPneumonia ? prof.miss_rate : prof.false_alarm_rate;
            const bool err = (shared ? u_shared : u_own) < rate;
            const bool predicted_positive = (truth == Label::kPneumonia) != err;
            const double offset = spec.score_margin * magnitude;
            const double score = predicted_positive ? 0.5 + offset : 0.5 - offset;
            sets[m].records.push_back({sample_id(i), truth, score});
        }
    }
    return sets;
}

FeatureBatch gen_features(int n, int c, int h, int w, double separation, int n_pos,
                          std::uint64_t seed) {
    if (n < 1 || c < 1 || h < 1 || w < 1) {
        throw DomainError("gen_features requires positive dimensions");
    }
    if (n_pos < 0 || n_pos > n) {
        throw DomainError("gen_features requires 0 <= n_pos <= n");
    }
    if (separation < 0.0) {
        throw DomainError("separation must be nonnegative");
    }

    Rng rng(seed);
    Eigen::VectorXd direction(c);
    for (int ch = 0; ch < c; ++ch) {
        direction[ch] = rng.normal();
    }
    const double norm = direction.norm();
    if (norm < 1e-12) {
        direction.setZero();
        direction[0] = 1.0;
    } else {
        direction /= norm;
    }

    FeatureBatch batch;
    batch.n = n;
    batch.h = h;
    batch.w = w;
    batch.c = c;
    batch.values.resize(n, static_cast<Eigen::Index>(h) * w * c);
    batch.labels.reserve(static_cast<std::size_t>(n));

    const double half = separation / 2.0;
    for (int i = 0; i < n; ++i) {
        const Label truth = i < n_pos ? Label::kPneumonia : Label::kNormal;
        batch.labels.push_back(truth);
        const double sign = truth == Label::kPneumonia ? 1.0 : -1.0;
        Eigen::Index at = 0;
        for (int p = 0; p < h * w; ++p) {
            for (int ch = 0; ch < c; ++ch) {
                batch.values(i, at++) = sign * half * direction[ch] + rng.normal();
            }
        }
    }
    return batch;
}

} // namespace wae
