// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0
//
// Hand-built fixtures shared between unit and acceptance tests.

#ifndef WAE_TESTS_SUPPORT_FIXTURES_HPP
#define WAE_TESTS_SUPPORT_FIXTURES_HPP

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "wae/core.hpp"
#include "wae/metrics.hpp"

namespace wae::testing {

/// Truth/prediction decision vectors realizing the given confusion counts.
inline std::pair<std::vector<Label>, std::vector<Label>> decisions_from_counts(
    std::int64_t tp, std::int64_t fn, std::int64_t fp, std::int64_t tn) {
    std::vector<Label> truth;
    std::vector<Label> pred;
    const auto add = [&](std::int64_t count, Label t, Label p) {
        for (std::int64_t i = 0; i < count; ++i) {
            truth.push_back(t);
            pred.push_back(p);
        }
    };
    add(tp, Label::kPneumonia, Label::kPneumonia);
    add(fn, Label::kPneumonia, Label::kNormal);
    add(fp, Label::kNormal, Label::kPneumonia);
    add(tn, Label::kNormal, Label::kNormal);
    return {std::move(truth), std::move(pred)};
}

/// Two 586-sample prediction sets over a shared ground truth (423 positive)
/// built so that, at threshold 0.5:
///   - model_a alone scores 569/586 correct (confusion 413,10,7,156),
///   - model_b alone scores 564/586 correct (confusion 410,13,9,154),
///   - the 0.45/0.55 weighted average scores 578/586 (confusion 417,6,2,161).
/// Each block below lists (model_a score, model_b score, count).
inline std::pair<PredictionSet, PredictionSet> make_two_model_fixture() {
    PredictionSet a;
    PredictionSet b;
    a.model_name = "model_a";
    b.model_name = "model_b";
    int next_id = 0;
    const auto add = [&](Label truth, double sa, double sb, int count) {
        for (int i = 0; i < count; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "s%06d", ++next_id);
            a.records.push_back({buf, truth, sa});
            b.records.push_back({buf, truth, sb});
        }
    };
    // Positives: 405 both right, 8 only a right (avg 0.6885 -> right),
    // 4 only b right (avg 0.725 -> right), 1 only b right (avg 0.3115 ->
    // wrong), 5 both wrong.
    add(Label::kPneumonia, 0.9, 0.9, 405);
    add(Label::kPneumonia, 0.98, 0.45, 8);
    add(Label::kPneumonia, 0.45, 0.95, 4);
    add(Label::kPneumonia, 0.02, 0.55, 1);
    add(Label::kPneumonia, 0.1, 0.1, 5);
    // Negatives: 148 both right, 8 only a right (avg 0.3115 -> right),
    // 5 only b right (avg 0.275 -> right), 1 only b right (avg 0.6885 ->
    // wrong), 1 both wrong.
    add(Label::kNormal, 0.1, 0.1, 148);
    add(Label::kNormal, 0.02, 0.55, 8);
    add(Label::kNormal, 0.55, 0.05, 5);
    add(Label::kNormal, 0.98, 0.45, 1);
    add(Label::kNormal, 0.9, 0.9, 1);
    return {std::move(a), std::move(b)};
}

} // namespace wae::testing

#endif // WAE_TESTS_SUPPORT_FIXTURES_HPP
