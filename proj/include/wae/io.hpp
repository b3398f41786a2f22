// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAE_IO_HPP
#define WAE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wae/core.hpp"
#include "wae/head.hpp"
#include "wae/image.hpp"
#include "wae/metrics.hpp"

namespace wae {

/// Shortest decimal string that parses back to the identical double.
std::string format_double(double value);

/// Strict full-string double parse; throws ParseError on failure.
double parse_double(const std::string& text, const std::string& context);

/// CSV with header `sample_id,label,score`; label 0/1 (1 = PNEUMONIA),
/// score in [0,1]. The model name defaults to the file stem. Parse errors
/// carry the offending line number.
PredictionSet read_prediction_csv(const std::filesystem::path& path);
void write_prediction_csv(const std::filesystem::path& path, const PredictionSet& set);

/// FTB1 feature-tensor container: magic `FTB1`, u32le n,h,w,c, n*h*w*c f32le
/// values, n label bytes (0/1). The reader demands the exact byte length.
FeatureBatch read_ftb(const std::filesystem::path& path);
void write_ftb(const std::filesystem::path& path, const FeatureBatch& batch);

/// Head-model JSON; doubles round-trip exactly.
HeadModel read_head_model(const std::filesystem::path& path);
void write_head_model(const std::filesystem::path& path, const HeadModel& model);

/// Classification report plus run metadata. `weights` stays empty for
/// single-model evaluations.
struct ReportDocument {
    ClassificationReport report;
    std::vector<std::string> model_names;
    std::vector<double> weights;
    double threshold = 0.5;
    std::int64_t samples = 0;
};

/// Raw metrics at full precision plus a `percent` block rounded to two
/// decimals for side-by-side reading.
std::string report_to_json(const ReportDocument& doc);
void write_report_json(const std::filesystem::path& path, const ReportDocument& doc);

/// `fpr,tpr,threshold` rows; the opening threshold serializes as `inf`.
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);
RocCurve read_roc_csv(const std::filesystem::path& path);

void write_weights_json(const std::filesystem::path& path,
                        const std::vector<std::string>& model_names,
                        const std::vector<double>& weights, double step);

/// epoch,train_loss,val_loss,val_accuracy,learning_rate rows (epoch 1-based).
void write_history_csv(const std::filesystem::path& path, const TrainHistory& history);

/// JSON config files: absent keys keep defaults, unknown keys are parse
/// errors. The training seed comes from the command line, not the file.
AugmentConfig read_augment_config(const std::filesystem::path& path);
TrainConfig read_train_config(const std::filesystem::path& path);

} // namespace wae

#endif // WAE_IO_HPP
