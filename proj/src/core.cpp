// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#include "wae/core.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace wae {

Label label_from_score(double score, double threshold) {
    if (!(score >= 0.0 && score <= 1.0)) {
        throw DomainError("score " + std::to_string(score) + " outside [0,1]");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw DomainError("threshold " + std::to_string(threshold) + " outside (0,1)");
    }
    return score >= threshold ? Label::kPneumonia : Label::kNormal;
}

void validate(const PredictionSet& set) {
    if (set.records.empty()) {
        throw DomainError("prediction set '" + set.model_name + "' is empty");
    }
    std::set<std::string_view> seen;
    for (const auto& rec : set.records) {
        if (rec.sample_id.empty()) {
            throw DomainError("prediction set '" + set.model_name + "' has an empty sample_id");
        }
        if (!(rec.score >= 0.0 && rec.score <= 1.0)) {
            throw DomainError("sample '" + rec.sample_id + "' in set '" + set.model_name +
                              "' has score outside [0,1]");
        }
        if (!seen.insert(rec.sample_id).second) {
            throw DomainError("duplicate sample_id '" + rec.sample_id + "' in set '" +
                              set.model_name + "'");
        }
    }
}

namespace {

std::string join_ids(const std::set<std::string>& ids, std::size_t limit = 8) {
    std::ostringstream out;
    std::size_t n = 0;
    for (const auto& id : ids) {
        if (n++) out << ", ";
        if (n > limit) {
            out << "... (" << ids.size() << " total)";
            break;
        }
        out << id;
    }
    return out.str();
}

} // namespace

AlignedPredictions align(std::span<const PredictionSet> sets) {
    if (sets.empty()) {
        throw DomainError("align requires at least one prediction set");
    }
    for (const auto& set : sets) {
        validate(set);
    }

    // Universe = ids of the first set; any symmetric difference is an error.
    std::map<std::string, Eigen::Index> row_of;
    for (const auto& rec : sets[0].records) {
        row_of.emplace(rec.sample_id, 0);
    }
    std::set<std::string> mismatched;
    for (const auto& set : sets.subspan(1)) {
        for (const auto& rec : set.records) {
            if (!row_of.count(rec.sample_id)) mismatched.insert(rec.sample_id);
        }
        if (set.records.size() != row_of.size() || !mismatched.empty()) {
            std::set<std::string_view> present;
            for (const auto& rec : set.records) present.insert(rec.sample_id);
            for (const auto& [id, row] : row_of) {
                if (!present.count(id)) mismatched.insert(id);
            }
        }
    }
    if (!mismatched.empty()) {
        throw DomainError("sample ids not shared by every prediction set: " + join_ids(mismatched));
    }

    AlignedPredictions out;
    const auto n = static_cast<Eigen::Index>(row_of.size());
    const auto k = static_cast<Eigen::Index>(sets.size());
    out.sample_ids.reserve(row_of.size());
    Eigen::Index row = 0;
    for (auto& [id, r] : row_of) { // std::map iterates in ascending id order
        r = row++;
        out.sample_ids.push_back(id);
    }
    out.true_labels.assign(row_of.size(), Label::kNormal);
    out.scores.resize(n, k);
    for (const auto& set : sets) out.model_names.push_back(set.model_name);

    std::vector<bool> label_set(row_of.size(), false);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (const auto& rec : sets[j].records) {
            const Eigen::Index i = row_of.at(rec.sample_id);
            out.scores(i, j) = rec.score;
            if (!label_set[static_cast<std::size_t>(i)]) {
                out.true_labels[static_cast<std::size_t>(i)] = rec.true_label;
                label_set[static_cast<std::size_t>(i)] = true;
            } else if (out.true_labels[static_cast<std::size_t>(i)] != rec.true_label) {
                throw DomainError("conflicting true_label for sample '" + rec.sample_id +
                                  "' between prediction sets");
            }
        }
    }
    return out;
}

} // namespace wae
