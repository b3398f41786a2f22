// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "wae/core.hpp"
#include "wae/rng.hpp"

using wae::AlignedPredictions;
using wae::DomainError;
using wae::Label;
using wae::PredictionRecord;
using wae::PredictionSet;

namespace {

PredictionSet make_set(std::string name,
                       std::vector<std::tuple<std::string, Label, double>> rows) {
    PredictionSet set;
    set.model_name = std::move(name);
    for (auto& [id, label, score] : rows) {
        set.records.push_back({id, label, score});
    }
    return set;
}

} // namespace

TEST_SUITE("core") {

TEST_CASE("label_from_score thresholds with ties going positive") {
    CHECK(wae::label_from_score(0.5) == Label::kPneumonia);
    CHECK(wae::label_from_score(0.49) == Label::kNormal);
    CHECK(wae::label_from_score(0.51) == Label::kPneumonia);
    CHECK(wae::label_from_score(0.0) == Label::kNormal);
    CHECK(wae::label_from_score(1.0) == Label::kPneumonia);
    CHECK(wae::label_from_score(0.7, 0.7) == Label::kPneumonia);
    CHECK(wae::label_from_score(0.6999, 0.7) == Label::kNormal);
    CHECK(wae::label_from_score(0.1, 0.1) == Label::kPneumonia);
}

TEST_CASE("label_from_score rejects out-of-range inputs") {
    CHECK_THROWS_AS(wae::label_from_score(-0.01), DomainError);
    CHECK_THROWS_AS(wae::label_from_score(1.01), DomainError);
    CHECK_THROWS_AS(wae::label_from_score(std::nan("")), DomainError);
    CHECK_THROWS_AS(wae::label_from_score(0.5, 0.0), DomainError);
    CHECK_THROWS_AS(wae::label_from_score(0.5, 1.0), DomainError);
    CHECK_THROWS_AS(wae::label_from_score(0.5, -0.2), DomainError);
}

TEST_CASE("label_from_score is monotone in the score") {
    wae::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const double threshold = 0.05 + 0.9 * rng.next_double();
        bool seen_positive = false;
        for (int step = 0; step <= 100; ++step) {
            const Label lab = wae::label_from_score(step / 100.0, threshold);
            if (lab == Label::kPneumonia) {
                seen_positive = true;
            } else {
                // Once positive, later (higher) scores must stay positive.
                CHECK_FALSE(seen_positive);
            }
        }
        CHECK(seen_positive); // score 1.0 is always >= threshold
    }
}

TEST_CASE("validate accepts a well-formed set") {
    const auto set = make_set("m", {{"a", Label::kNormal, 0.0},
                                    {"b", Label::kPneumonia, 1.0},
                                    {"c", Label::kPneumonia, 0.25}});
    CHECK_NOTHROW(wae::validate(set));
}

TEST_CASE("validate rejects malformed sets") {
    CHECK_THROWS_AS(wae::validate(make_set("empty", {})), DomainError);
    CHECK_THROWS_AS(
        wae::validate(make_set("dup", {{"a", Label::kNormal, 0.1}, {"a", Label::kNormal, 0.2}})),
        DomainError);
    CHECK_THROWS_AS(wae::validate(make_set("neg", {{"a", Label::kNormal, -0.1}})), DomainError);
    CHECK_THROWS_AS(wae::validate(make_set("big", {{"a", Label::kNormal, 1.1}})), DomainError);
    CHECK_THROWS_AS(wae::validate(make_set("blank", {{"", Label::kNormal, 0.5}})), DomainError);

    try {
        wae::validate(make_set("dup", {{"s42", Label::kNormal, 0.1}, {"s42", Label::kNormal, 0.2}}));
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("s42") != std::string::npos);
    }
}

TEST_CASE("align joins on sample_id in ascending id order") {
    const auto a = make_set("alpha", {{"s3", Label::kPneumonia, 0.9},
                                      {"s1", Label::kNormal, 0.2},
                                      {"s2", Label::kPneumonia, 0.6}});
    const auto b = make_set("beta", {{"s1", Label::kNormal, 0.1},
                                     {"s2", Label::kPneumonia, 0.7},
                                     {"s3", Label::kPneumonia, 0.8}});
    const std::vector<PredictionSet> sets{a, b};
    const AlignedPredictions aligned = wae::align(sets);

    REQUIRE(aligned.sample_count() == 3);
    REQUIRE(aligned.model_count() == 2);
    CHECK(aligned.sample_ids == std::vector<std::string>{"s1", "s2", "s3"});
    CHECK(aligned.model_names == std::vector<std::string>{"alpha", "beta"});
    CHECK(aligned.true_labels ==
          std::vector<Label>{Label::kNormal, Label::kPneumonia, Label::kPneumonia});
    CHECK(aligned.scores(0, 0) == 0.2);
    CHECK(aligned.scores(1, 0) == 0.6);
    CHECK(aligned.scores(2, 0) == 0.9);
    CHECK(aligned.scores(0, 1) == 0.1);
    CHECK(aligned.scores(1, 1) == 0.7);
    CHECK(aligned.scores(2, 1) == 0.8);
}

TEST_CASE("align result is invariant to record order within each set") {
    auto a = make_set("alpha", {{"x", Label::kNormal, 0.3},
                                {"y", Label::kPneumonia, 0.8},
                                {"z", Label::kNormal, 0.4}});
    auto b = make_set("beta", {{"x", Label::kNormal, 0.2},
                               {"y", Label::kPneumonia, 0.9},
                               {"z", Label::kNormal, 0.5}});
    const std::vector<PredictionSet> ordered{a, b};
    const AlignedPredictions base = wae::align(ordered);

    std::reverse(a.records.begin(), a.records.end());
    std::swap(b.records[0], b.records[2]);
    const std::vector<PredictionSet> shuffled{a, b};
    const AlignedPredictions again = wae::align(shuffled);

    CHECK(base.sample_ids == again.sample_ids);
    CHECK(base.true_labels == again.true_labels);
    CHECK((base.scores.array() == again.scores.array()).all());
}

TEST_CASE("align works for a single set") {
    const auto a = make_set("solo", {{"b", Label::kPneumonia, 0.9}, {"a", Label::kNormal, 0.1}});
    const std::vector<PredictionSet> sets{a};
    const AlignedPredictions aligned = wae::align(sets);
    CHECK(aligned.model_count() == 1);
    CHECK(aligned.sample_ids == std::vector<std::string>{"a", "b"});
    CHECK(aligned.scores(0, 0) == 0.1);
    CHECK(aligned.scores(1, 0) == 0.9);
}

TEST_CASE("align names the ids missing from either side") {
    const auto a = make_set("alpha", {{"a", Label::kNormal, 0.1}, {"b", Label::kNormal, 0.2}});
    const auto c = make_set("gamma", {{"a", Label::kNormal, 0.1}, {"c", Label::kNormal, 0.3}});
    const std::vector<PredictionSet> sets{a, c};
    try {
        wae::align(sets);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("b") != std::string::npos);
        CHECK(msg.find("c") != std::string::npos);
    }
}

TEST_CASE("align rejects conflicting true labels for a shared sample") {
    const auto a = make_set("alpha", {{"a", Label::kNormal, 0.1}});
    const auto b = make_set("beta", {{"a", Label::kPneumonia, 0.9}});
    const std::vector<PredictionSet> sets{a, b};
    try {
        wae::align(sets);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }
}

TEST_CASE("align rejects an empty span and propagates per-set validation") {
    CHECK_THROWS_AS(wae::align(std::span<const PredictionSet>{}), DomainError);
    const auto bad = make_set("bad", {{"a", Label::kNormal, 2.0}});
    const std::vector<PredictionSet> sets{bad};
    CHECK_THROWS_AS(wae::align(sets), DomainError);
}

} // TEST_SUITE
