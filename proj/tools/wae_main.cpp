// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: augment, synth, train-head, predict, evaluate,
// ensemble-search, ensemble-apply. Exit codes: 0 success, 1 domain/parse
// error, 2 usage error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wae/core.hpp"
#include "wae/ensemble.hpp"
#include "wae/error.hpp"
#include "wae/head.hpp"
#include "wae/image.hpp"
#include "wae/io.hpp"
#include "wae/metrics.hpp"
#include "wae/synth.hpp"
#include "wae/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kAugmentSize = 224;

std::string sequential_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%06d", index + 1);
    return buf;
}

std::vector<double> parse_weight_list(const std::string& text) {
    std::vector<double> weights;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const std::string token =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        weights.push_back(wae::parse_double(token, "--weights"));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return weights;
}

wae::AlignedPredictions load_and_align(const std::vector<std::string>& paths) {
    std::vector<wae::PredictionSet> sets;
    sets.reserve(paths.size());
    for (const std::string& p : paths) {
        sets.push_back(wae::read_prediction_csv(p));
    }
    return wae::align(sets);
}

wae::ReportDocument make_document(const wae::ClassificationReport& report,
                                  std::vector<std::string> model_names,
                                  std::vector<double> weights, double threshold,
                                  std::int64_t samples) {
    wae::ReportDocument doc;
    doc.report = report;
    doc.model_names = std::move(model_names);
    doc.weights = std::move(weights);
    doc.threshold = threshold;
    doc.samples = samples;
    return doc;
}

void print_report_summary(const wae::ClassificationReport& r) {
    std::cout << "accuracy " << wae::round_percent(r.accuracy) << "% (" << r.counts.tp + r.counts.tn
              << "/" << r.counts.total() << "), weighted P/R/F1 "
              << wae::round_percent(r.weighted.precision) << "/"
              << wae::round_percent(r.weighted.recall) << "/"
              << wae::round_percent(r.weighted.f1) << "\n";
    if (r.auc.has_value()) {
        std::cout << "auc " << wae::format_double(*r.auc) << "\n";
    }
}

// ---- augment ----------------------------------------------------------

struct AugmentArgs {
    std::string in_dir;
    std::string out_dir;
    std::string config_path;
    std::uint64_t seed = 0;
    int count = 1;
};

void run_augment(const AugmentArgs& args) {
    wae::AugmentConfig cfg;
    if (!args.config_path.empty()) {
        cfg = wae::read_augment_config(args.config_path);
    }
    if (args.count < 1) {
        throw wae::DomainError("--count must be at least 1");
    }
    if (!fs::is_directory(args.in_dir)) {
        throw wae::DomainError("input directory not found: " + args.in_dir);
    }

    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(args.in_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".ppm") {
            inputs.push_back(entry.path());
        }
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) {
        throw wae::DomainError("no .pgm/.ppm images in " + args.in_dir);
    }

    fs::create_directories(args.out_dir);
    std::vector<wae::ImageBuffer> prepared;
    prepared.reserve(inputs.size());
    for (const fs::path& p : inputs) {
        prepared.push_back(
            wae::resize_bilinear(wae::normalize(wae::read_netpbm(p)), kAugmentSize, kAugmentSize));
    }
    const std::vector<wae::ImageBuffer> variants =
        wae::augment_batch(prepared, cfg, args.seed, args.count);

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (int k = 0; k < args.count; ++k) {
            const wae::ImageBuffer& img =
                variants[i * static_cast<std::size_t>(args.count) + static_cast<std::size_t>(k)];
            wae::ImageBuffer bytes = img;
            bytes.pixels = img.pixels * 255.0;
            const fs::path out_path =
                fs::path(args.out_dir) / (inputs[i].stem().string() + "_aug" +
                                          std::to_string(k) + inputs[i].extension().string());
            wae::write_netpbm(out_path, bytes);
        }
    }
    std::cout << "wrote " << variants.size() << " images to " << args.out_dir << "\n";
}

// ---- synth -------------------------------------------------------------

struct SynthArgs {
    std::string preset = "paper-like";
    std::uint64_t seed = 0;
    std::string out_prefix;
    int n = 586;
    int n_pos = 423;
    std::string miss_rates;
    std::string false_alarm_rates;
    double correlation = 0.7;
    double margin = 0.4;
    std::string features_out;
    int channels = 16;
    int height = 3;
    int width = 3;
    double separation = 4.0;
};

void run_synth(const SynthArgs& args) {
    if (args.out_prefix.empty() && args.features_out.empty()) {
        throw CLI::RequiredError("--out-prefix and/or --features-out");
    }

    if (!args.out_prefix.empty()) {
        wae::SynthSpec spec;
        if (args.preset == "paper-like") {
            spec = wae::SynthSpec::paper_like(args.seed);
        } else {
            spec.n = args.n;
            spec.n_pos = args.n_pos;
            const std::vector<double> miss = parse_weight_list(args.miss_rates);
            const std::vector<double> fa = parse_weight_list(args.false_alarm_rates);
            if (miss.size() != fa.size() || miss.empty()) {
                throw wae::DomainError(
                    "--miss and --false-alarm need one rate per model (same count)");
            }
            for (std::size_t m = 0; m < miss.size(); ++m) {
                spec.profiles.push_back({miss[m], fa[m]});
            }
            spec.error_correlation = args.correlation;
            spec.score_margin = args.margin;
            spec.seed = args.seed;
        }
        const std::vector<wae::PredictionSet> sets = wae::gen_predictions(spec);
        for (const wae::PredictionSet& set : sets) {
            const fs::path path = args.out_prefix + set.model_name + ".csv";
            if (path.has_parent_path()) {
                fs::create_directories(path.parent_path());
            }
            wae::write_prediction_csv(path, set);
            std::cout << "wrote " << path.string() << " (" << set.records.size()
                      << " rows)\n";
        }
    }

    if (!args.features_out.empty()) {
        const wae::FeatureBatch batch = wae::gen_features(
            args.n, args.channels, args.height, args.width, args.separation, args.n_pos,
            args.seed);
        const fs::path path(args.features_out);
        if (path.has_parent_path()) {
            fs::create_directories(path.parent_path());
        }
        wae::write_ftb(path, batch);
        std::cout << "wrote " << path.string() << " (" << batch.n << " samples, " << batch.h
                  << "x" << batch.w << "x" << batch.c << ")\n";
    }
}

// ---- train-head --------------------------------------------------------

struct TrainArgs {
    std::string features_path;
    std::string config_path;
    std::string model_out;
    std::string history_out;
    std::uint64_t seed = 0;
};

void run_train_head(const TrainArgs& args) {
    const wae::FeatureBatch batch = wae::read_ftb(args.features_path);
    wae::TrainConfig cfg;
    if (!args.config_path.empty()) {
        cfg = wae::read_train_config(args.config_path);
    }
    cfg.seed = args.seed;
    const wae::TrainResult result = wae::train(batch, cfg);
    wae::write_head_model(args.model_out, result.model);
    if (!args.history_out.empty()) {
        wae::write_history_csv(args.history_out, result.history);
    }
    std::cout << "trained " << result.history.stopped_epoch << " epochs (best epoch "
              << result.history.best_epoch << ")";
    if (result.history.best_epoch > 0) {
        const wae::EpochRecord& best =
            result.history.epochs[static_cast<std::size_t>(result.history.best_epoch - 1)];
        std::cout << ", val loss " << wae::format_double(best.val_loss) << ", val accuracy "
                  << wae::format_double(best.val_accuracy);
    }
    std::cout << "\nwrote " << args.model_out << "\n";
}

// ---- predict -----------------------------------------------------------

struct PredictArgs {
    std::string model_path;
    std::string features_path;
    std::string out_path;
};

void run_predict(const PredictArgs& args) {
    const wae::HeadModel model = wae::read_head_model(args.model_path);
    const wae::FeatureBatch batch = wae::read_ftb(args.features_path);
    const Eigen::VectorXd probs = wae::forward_infer(model, batch);

    wae::PredictionSet set;
    set.model_name = fs::path(args.out_path).stem().string();
    set.records.reserve(static_cast<std::size_t>(batch.n));
    for (int i = 0; i < batch.n; ++i) {
        set.records.push_back(
            {sequential_id(i), batch.labels[static_cast<std::size_t>(i)], probs[i]});
    }
    wae::write_prediction_csv(args.out_path, set);
    std::cout << "wrote " << args.out_path << " (" << batch.n << " rows)\n";
}

// ---- evaluate ----------------------------------------------------------

struct EvaluateArgs {
    std::string preds_path;
    double threshold = 0.5;
    std::string report_out;
    std::string roc_out;
};

void run_evaluate(const EvaluateArgs& args) {
    const wae::PredictionSet set = wae::read_prediction_csv(args.preds_path);
    wae::validate(set);
    const auto n = static_cast<Eigen::Index>(set.records.size());
    Eigen::VectorXd scores(n);
    std::vector<wae::Label> labels;
    labels.reserve(set.records.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        scores[i] = set.records[static_cast<std::size_t>(i)].score;
        labels.push_back(set.records[static_cast<std::size_t>(i)].true_label);
    }
    const wae::ClassificationReport report =
        wae::report_from_scores(labels, scores, args.threshold);
    if (!args.report_out.empty()) {
        wae::write_report_json(args.report_out,
                               make_document(report, {set.model_name}, {}, args.threshold, n));
    }
    if (!args.roc_out.empty()) {
        wae::write_roc_csv(args.roc_out, wae::roc_curve(scores, labels));
    }
    print_report_summary(report);
}

// ---- ensemble-search ---------------------------------------------------

struct SearchArgs {
    std::vector<std::string> preds_paths;
    double step = 0.005;
    double threshold = 0.5;
    int workers = 1;
    std::string weights_out;
    std::string report_out;
};

void run_ensemble_search(const SearchArgs& args) {
    const wae::AlignedPredictions aligned = load_and_align(args.preds_paths);
    const wae::SearchResult result =
        wae::search(aligned, args.step, args.threshold, args.workers);

    std::vector<double> weights(result.best_weights.weights.data(),
                                result.best_weights.weights.data() +
                                    result.best_weights.weights.size());
    if (!args.weights_out.empty()) {
        wae::write_weights_json(args.weights_out, aligned.model_names, weights, args.step);
    }
    if (!args.report_out.empty()) {
        wae::write_report_json(
            args.report_out, make_document(result.best_report, aligned.model_names, weights,
                                           args.threshold, aligned.sample_count()));
    }
    std::cout << "searched " << result.grid_size << " weight vectors\n";
    std::cout << "best weights:";
    for (std::size_t i = 0; i < weights.size(); ++i) {
        std::cout << ' ' << aligned.model_names[i] << '=' << wae::format_double(weights[i]);
    }
    std::cout << "\n";
    print_report_summary(result.best_report);
}

// ---- ensemble-apply ----------------------------------------------------

struct ApplyArgs {
    std::vector<std::string> preds_paths;
    std::string weights_text;
    std::string out_path;
    double threshold = 0.5;
    std::string report_out;
};

void run_ensemble_apply(const ApplyArgs& args) {
    const wae::AlignedPredictions aligned = load_and_align(args.preds_paths);
    std::vector<double> weights = parse_weight_list(args.weights_text);
    if (static_cast<Eigen::Index>(weights.size()) != aligned.model_count()) {
        throw wae::DomainError("got " + std::to_string(weights.size()) + " weights for " +
                               std::to_string(aligned.model_count()) + " models");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0 || w > 1.0) {
            throw wae::DomainError("weights must lie in [0,1]");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw wae::DomainError("weights must sum to 1 within 1e-6 (got " +
                               wae::format_double(sum) + ")");
    }
    Eigen::VectorXd w(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t i = 0; i < weights.size(); ++i) {
        w[static_cast<Eigen::Index>(i)] = weights[i] / sum;
        weights[i] = w[static_cast<Eigen::Index>(i)];
    }

    const wae::EnsembleEvaluation eval =
        wae::apply(aligned, wae::WeightVector::from(w), args.threshold);
    if (!args.out_path.empty()) {
        wae::PredictionSet combined;
        combined.model_name = fs::path(args.out_path).stem().string();
        combined.records.reserve(aligned.sample_ids.size());
        for (Eigen::Index i = 0; i < aligned.sample_count(); ++i) {
            combined.records.push_back({aligned.sample_ids[static_cast<std::size_t>(i)],
                                        aligned.true_labels[static_cast<std::size_t>(i)],
                                        eval.scores[i]});
        }
        wae::write_prediction_csv(args.out_path, combined);
    }
    if (!args.report_out.empty()) {
        wae::write_report_json(
            args.report_out, make_document(eval.report, aligned.model_names, weights,
                                           args.threshold, aligned.sample_count()));
    }
    print_report_summary(eval.report);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted-average ensemble toolkit for binary pneumonia classifiers"};
    app.set_version_flag("--version", wae::kVersion);
    app.require_subcommand(1);

    AugmentArgs aug;
    CLI::App* c_aug = app.add_subcommand("augment", "augment netpbm images on disk");
    c_aug->add_option("--in", aug.in_dir, "input directory of .pgm/.ppm images")->required();
    c_aug->add_option("--out", aug.out_dir, "output directory")->required();
    c_aug->add_option("--config", aug.config_path, "augmentation config JSON");
    c_aug->add_option("--seed", aug.seed, "RNG seed");
    c_aug->add_option("--count", aug.count, "variants per input image");
    c_aug->callback([&] { run_augment(aug); });

    SynthArgs syn;
    CLI::App* c_syn = app.add_subcommand("synth", "generate synthetic fixtures");
    c_syn->add_option("--preset", syn.preset, "paper-like or custom")
        ->check(CLI::IsMember({"paper-like", "custom"}));
    c_syn->add_option("--seed", syn.seed, "RNG seed");
    c_syn->add_option("--out-prefix", syn.out_prefix, "prefix for prediction CSV outputs");
    c_syn->add_option("--n", syn.n, "sample count");
    c_syn->add_option("--n-pos", syn.n_pos, "positive count");
    c_syn->add_option("--miss", syn.miss_rates, "per-model miss rates (comma list)");
    c_syn->add_option("--false-alarm", syn.false_alarm_rates,
                      "per-model false-alarm rates (comma list)");
    c_syn->add_option("--correlation", syn.correlation, "error correlation in [0,1]");
    c_syn->add_option("--margin", syn.margin, "score margin in (0,0.5)");
    c_syn->add_option("--features-out", syn.features_out, "write a feature batch (FTB1)");
    c_syn->add_option("--channels", syn.channels, "feature channels");
    c_syn->add_option("--height", syn.height, "feature map height");
    c_syn->add_option("--width", syn.width, "feature map width");
    c_syn->add_option("--separation", syn.separation, "class separation in sigmas");
    c_syn->callback([&] { run_synth(syn); });

    TrainArgs tr;
    CLI::App* c_tr = app.add_subcommand("train-head", "train the classification head");
    c_tr->add_option("--features", tr.features_path, "input FTB1 feature batch")->required();
    c_tr->add_option("--config", tr.config_path, "training config JSON");
    c_tr->add_option("--out", tr.model_out, "output model JSON")->required();
    c_tr->add_option("--history", tr.history_out, "output history CSV");
    c_tr->add_option("--seed", tr.seed, "RNG seed");
    c_tr->callback([&] { run_train_head(tr); });

    PredictArgs pr;
    CLI::App* c_pr = app.add_subcommand("predict", "score features with a trained head");
    c_pr->add_option("--model", pr.model_path, "model JSON")->required();
    c_pr->add_option("--features", pr.features_path, "input FTB1 feature batch")->required();
    c_pr->add_option("--out", pr.out_path, "output prediction CSV")->required();
    c_pr->callback([&] { run_predict(pr); });

    EvaluateArgs ev;
    CLI::App* c_ev = app.add_subcommand("evaluate", "evaluate one prediction CSV");
    c_ev->add_option("--preds", ev.preds_path, "prediction CSV")->required();
    c_ev->add_option("--threshold", ev.threshold, "decision threshold");
    c_ev->add_option("--report", ev.report_out, "output report JSON");
    c_ev->add_option("--roc", ev.roc_out, "output ROC CSV");
    c_ev->callback([&] { run_evaluate(ev); });

    SearchArgs se;
    CLI::App* c_se = app.add_subcommand("ensemble-search", "grid-search ensemble weights");
    c_se->add_option("--preds", se.preds_paths, "prediction CSVs (repeat per model)")
        ->required();
    c_se->add_option("--step", se.step, "weight grid step");
    c_se->add_option("--threshold", se.threshold, "decision threshold");
    c_se->add_option("--workers", se.workers, "worker threads");
    c_se->add_option("--out", se.weights_out, "output weights JSON");
    c_se->add_option("--report", se.report_out, "output report JSON");
    c_se->callback([&] { run_ensemble_search(se); });

    ApplyArgs ap;
    CLI::App* c_ap = app.add_subcommand("ensemble-apply", "combine with fixed weights");
    c_ap->add_option("--preds", ap.preds_paths, "prediction CSVs (repeat per model)")
        ->required();
    c_ap->add_option("--weights", ap.weights_text, "comma-separated weights summing to 1")
        ->required();
    c_ap->add_option("--out", ap.out_path, "output combined prediction CSV");
    c_ap->add_option("--threshold", ap.threshold, "decision threshold");
    c_ap->add_option("--report", ap.report_out, "output report JSON");
    c_ap->callback([&] { run_ensemble_apply(ap); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const wae::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
