// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#include "wae/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "wae/version.hpp"

namespace wae {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_for_write(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

ordered_json parse_json_file(const std::filesystem::path& path) {
    try {
        return ordered_json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

double as_double(const ordered_json& value, const std::string& key,
                 const std::filesystem::path& path) {
    if (!value.is_number()) {
        throw ParseError(path.string() + ": key '" + key + "' must be a number");
    }
    return value.get<double>();
}

int as_int(const ordered_json& value, const std::string& key,
           const std::filesystem::path& path) {
    if (!value.is_number_integer()) {
        throw ParseError(path.string() + ": key '" + key + "' must be an integer");
    }
    return value.get<int>();
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(v[i]);
    }
    return arr;
}

Eigen::VectorXd json_to_vector(const ordered_json& arr, const std::string& key,
                               const std::filesystem::path& path) {
    if (!arr.is_array()) {
        throw ParseError(path.string() + ": key '" + key + "' must be an array");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    Eigen::Index at = 0;
    for (const auto& item : arr) {
        if (!item.is_number()) {
            throw ParseError(path.string() + ": key '" + key + "' must hold numbers");
        }
        v[at++] = item.get<double>();
    }
    return v;
}

const ordered_json& require_key(const ordered_json& j, const std::string& key,
                                const std::filesystem::path& path) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError(path.string() + ": missing key '" + key + "'");
    }
    return *it;
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

ordered_json class_to_json(const ClassMetrics& m) {
    return ordered_json{{"precision", m.precision},
                        {"recall", m.recall},
                        {"f1", m.f1},
                        {"support", m.support}};
}

ordered_json class_percent_json(const ClassMetrics& m) {
    return ordered_json{{"precision", round_percent(m.precision)},
                        {"recall", round_percent(m.recall)},
                        {"f1", round_percent(m.f1)}};
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto result = std::from_chars(first, last, value);
    if (result.ec != std::errc{} || result.ptr != last || text.empty()) {
        throw ParseError(context + ": invalid number '" + text + "'");
    }
    return value;
}

PredictionSet read_prediction_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    const auto ctx = [&](std::size_t line_no) {
        return path.string() + ":" + std::to_string(line_no);
    };

    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) {
        throw ParseError(path.string() + ": empty file (missing header)");
    }
    strip_cr(line);
    if (line != "sample_id,label,score") {
        throw ParseError(ctx(1) + ": expected header 'sample_id,label,score', got '" + line +
                         "'");
    }

    PredictionSet set;
    set.model_name = path.stem().string();
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != 3) {
            throw ParseError(ctx(line_no) + ": expected 3 columns, got " +
                             std::to_string(fields.size()));
        }
        if (fields[0].empty()) {
            throw ParseError(ctx(line_no) + ": empty sample_id");
        }
        Label label = Label::kNormal;
        if (fields[1] == "1") {
            label = Label::kPneumonia;
        } else if (fields[1] != "0") {
            throw ParseError(ctx(line_no) + ": invalid label '" + fields[1] +
                             "' (expected 0 or 1)");
        }
        const double score = parse_double(fields[2], ctx(line_no));
        if (!(score >= 0.0 && score <= 1.0)) {
            throw ParseError(ctx(line_no) + ": score " + fields[2] + " outside [0,1]");
        }
        if (!seen.insert(fields[0]).second) {
            throw ParseError(ctx(line_no) + ": duplicate sample_id '" + fields[0] + "'");
        }
        set.records.push_back({fields[0], label, score});
    }
    if (set.records.empty()) {
        throw ParseError(path.string() + ": no prediction rows");
    }
    return set;
}

void write_prediction_csv(const std::filesystem::path& path, const PredictionSet& set) {
    validate(set);
    std::ofstream out = open_for_write(path, false);
    out << "sample_id,label,score\n";
    for (const PredictionRecord& rec : set.records) {
        out << rec.sample_id << ',' << (rec.true_label == Label::kPneumonia ? '1' : '0') << ','
            << format_double(rec.score) << '\n';
    }
    if (!out) {
        throw FormatError("failed writing " + path.string());
    }
}

FeatureBatch read_ftb(const std::filesystem::path& path) {
    const std::string raw = slurp(path);
    const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
    if (raw.size() < 20) {
        throw FormatError(path.string() + ": truncated FTB1 header");
    }
    if (std::memcmp(bytes, "FTB1", 4) != 0) {
        throw FormatError(path.string() + ": bad magic (expected FTB1)");
    }
    const std::uint32_t n = get_u32le(bytes + 4);
    const std::uint32_t h = get_u32le(bytes + 8);
    const std::uint32_t w = get_u32le(bytes + 12);
    const std::uint32_t c = get_u32le(bytes + 16);
    if (n == 0 || h == 0 || w == 0 || c == 0) {
        throw FormatError(path.string() + ": dimensions must be positive");
    }
    const double estimated = static_cast<double>(n) * h * w * c;
    if (estimated > 1e9) {
        throw FormatError(path.string() + ": tensor too large");
    }
    const std::uint64_t count = static_cast<std::uint64_t>(n) * h * w * c;
    const std::uint64_t expected = 20 + count * 4 + n;
    if (raw.size() != expected) {
        throw FormatError(path.string() + ": file length " + std::to_string(raw.size()) +
                          " does not match header (expected " + std::to_string(expected) + ")");
    }

    FeatureBatch batch;
    batch.n = static_cast<int>(n);
    batch.h = static_cast<int>(h);
    batch.w = static_cast<int>(w);
    batch.c = static_cast<int>(c);
    const auto cols = static_cast<Eigen::Index>(h) * w * c;
    batch.values.resize(batch.n, cols);
    const unsigned char* p = bytes + 20;
    for (int i = 0; i < batch.n; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j, p += 4) {
            batch.values(i, j) = static_cast<double>(std::bit_cast<float>(get_u32le(p)));
        }
    }
    batch.labels.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i, ++p) {
        if (*p != 0 && *p != 1) {
            throw FormatError(path.string() + ": label byte " + std::to_string(int(*p)) +
                              " at sample " + std::to_string(i) + " (expected 0 or 1)");
        }
        batch.labels.push_back(*p == 1 ? Label::kPneumonia : Label::kNormal);
    }
    batch.validate();
    return batch;
}

void write_ftb(const std::filesystem::path& path, const FeatureBatch& batch) {
    batch.validate();
    std::vector<unsigned char> out;
    const auto cols = batch.values.cols();
    out.reserve(20 + static_cast<std::size_t>(batch.n) * static_cast<std::size_t>(cols) * 4 +
                static_cast<std::size_t>(batch.n));
    out.insert(out.end(), {'F', 'T', 'B', '1'});
    put_u32le(out, static_cast<std::uint32_t>(batch.n));
    put_u32le(out, static_cast<std::uint32_t>(batch.h));
    put_u32le(out, static_cast<std::uint32_t>(batch.w));
    put_u32le(out, static_cast<std::uint32_t>(batch.c));
    for (int i = 0; i < batch.n; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            put_u32le(out, std::bit_cast<std::uint32_t>(static_cast<float>(batch.values(i, j))));
        }
    }
    for (Label label : batch.labels) {
        out.push_back(label == Label::kPneumonia ? 1 : 0);
    }
    std::ofstream f = open_for_write(path, true);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) {
        throw FormatError("failed writing " + path.string());
    }
}

HeadModel read_head_model(const std::filesystem::path& path) {
    const ordered_json j = parse_json_file(path);
    if (!j.is_object()) {
        throw ParseError(path.string() + ": model document must be a JSON object");
    }
    if (require_key(j, "format", path).get<std::string>() != "wae-head-model") {
        throw ParseError(path.string() + ": not a wae-head-model document");
    }
    HeadModel m;
    m.dropout_rate = as_double(require_key(j, "dropout_rate", path), "dropout_rate", path);
    m.bn_eps = as_double(require_key(j, "bn_eps", path), "bn_eps", path);
    m.bn_momentum = as_double(require_key(j, "bn_momentum", path), "bn_momentum", path);
    m.bn_gamma = json_to_vector(require_key(j, "bn_gamma", path), "bn_gamma", path);
    m.bn_beta = json_to_vector(require_key(j, "bn_beta", path), "bn_beta", path);
    m.bn_running_mean =
        json_to_vector(require_key(j, "bn_running_mean", path), "bn_running_mean", path);
    m.bn_running_var =
        json_to_vector(require_key(j, "bn_running_var", path), "bn_running_var", path);
    const ordered_json& w1 = require_key(j, "w1", path);
    if (!w1.is_array() || w1.empty()) {
        throw ParseError(path.string() + ": key 'w1' must be a nonempty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(w1.size());
    Eigen::Index cols = -1;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::VectorXd row = json_to_vector(w1[static_cast<std::size_t>(i)], "w1", path);
        if (cols < 0) {
            cols = row.size();
            m.w1.resize(rows, cols);
        } else if (row.size() != cols) {
            throw ParseError(path.string() + ": ragged 'w1' rows");
        }
        m.w1.row(i) = row.transpose();
    }
    m.b1 = json_to_vector(require_key(j, "b1", path), "b1", path);
    m.w2 = json_to_vector(require_key(j, "w2", path), "w2", path);
    m.b2 = as_double(require_key(j, "b2", path), "b2", path);
    try {
        m.validate();
    } catch (const DomainError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return m;
}

void write_head_model(const std::filesystem::path& path, const HeadModel& model) {
    model.validate();
    ordered_json j;
    j["format"] = "wae-head-model";
    j["version"] = 1;
    j["channels"] = model.channels();
    j["d_hidden"] = model.d_hidden();
    j["dropout_rate"] = model.dropout_rate;
    j["bn_eps"] = model.bn_eps;
    j["bn_momentum"] = model.bn_momentum;
    j["bn_gamma"] = vector_to_json(model.bn_gamma);
    j["bn_beta"] = vector_to_json(model.bn_beta);
    j["bn_running_mean"] = vector_to_json(model.bn_running_mean);
    j["bn_running_var"] = vector_to_json(model.bn_running_var);
    ordered_json w1 = ordered_json::array();
    for (Eigen::Index i = 0; i < model.w1.rows(); ++i) {
        w1.push_back(vector_to_json(model.w1.row(i).transpose()));
    }
    j["w1"] = std::move(w1);
    j["b1"] = vector_to_json(model.b1);
    j["w2"] = vector_to_json(model.w2);
    j["b2"] = model.b2;

    std::ofstream out = open_for_write(path, false);
    out << j.dump(2) << '\n';
    if (!out) {
        throw FormatError("failed writing " + path.string());
    }
}

std::string report_to_json(const ReportDocument& doc) {
    const ClassificationReport& r = doc.report;
    ordered_json j;
    j["tool"] = "wae";
    j["version"] = kVersion;
    j["model_names"] = doc.model_names;
    if (doc.weights.empty()) {
        j["weights"] = nullptr;
    } else {
        j["weights"] = doc.weights;
    }
    j["threshold"] = doc.threshold;
    j["samples"] = doc.samples;
    j["counts"] = ordered_json{
        {"tp", r.counts.tp}, {"fn", r.counts.fn}, {"fp", r.counts.fp}, {"tn", r.counts.tn}};
    j["accuracy"] = r.accuracy;
    j["pneumonia"] = class_to_json(r.pneumonia);
    j["normal"] = class_to_json(r.normal);
    j["weighted"] = ordered_json{{"precision", r.weighted.precision},
                                 {"recall", r.weighted.recall},
                                 {"f1", r.weighted.f1}};
    if (r.auc.has_value()) {
        j["auc"] = *r.auc;
    } else {
        j["auc"] = nullptr;
    }
    ordered_json percent;
    percent["accuracy"] = round_percent(r.accuracy);
    percent["pneumonia"] = class_percent_json(r.pneumonia);
    percent["normal"] = class_percent_json(r.normal);
    percent["weighted"] = ordered_json{{"precision", round_percent(r.weighted.precision)},
                                       {"recall", round_percent(r.weighted.recall)},
                                       {"f1", round_percent(r.weighted.f1)}};
    j["percent"] = std::move(percent);
    return j.dump(2) + "\n";
}

void write_report_json(const std::filesystem::path& path, const ReportDocument& doc) {
    std::ofstream out = open_for_write(path, false);
    out << report_to_json(doc);
    if (!out) {
        throw FormatError("failed writing " + path.string());
    }
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
    std::ofstream out = open_for_write(path, false);
    out << "fpr,tpr,threshold\n";
    for (const RocCurve::Point& p : curve.points) {
        out << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
            << format_double(p.threshold) << '\n';
    }
    if (!out) {
        throw FormatError("failed writing " + path.string());
    }
}

RocCurve read_roc_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) {
        throw ParseError(path.string() + ": empty file (missing header)");
    }
    strip_cr(line);
    if (line != "fpr,tpr,threshold") {
        throw ParseError(path.string() + ":1: expected header 'fpr,tpr,threshold'");
    }
    RocCurve curve;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != 3) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 3 columns");
        }
        const std::string ctx = path.string() + ":" + std::to_string(line_no);
        curve.points.push_back({parse_double(fields[0], ctx), parse_double(fields[1], ctx),
                                parse_double(fields[2], ctx)});
    }
    return curve;
}

void write_weights_json(const std::filesystem::path& path,
                        const std::vector<std::string>& model_names,
                        const std::vector<double>& weights, double step) {
    if (model_names.size() != weights.size()) {
        throw DomainError("model name / weight count mismatch");
    }
    ordered_json j;
    j["model_names"] = model_names;
    j["weights"] = weights;
    j["step"] = step;
    std::ofstream out = open_for_write(path, false);
    out << j.dump(2) << '\n';
    if (!out) {
        throw FormatError("failed writing " + path.string());
    }
}

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
    std::ofstream out = open_for_write(path, false);
    out << "epoch,train_loss,val_loss,val_accuracy,learning_rate\n";
    for (std::size_t i = 0; i < history.epochs.size(); ++i) {
        const EpochRecord& rec = history.epochs[i];
        out << (i + 1) << ',' << format_double(rec.train_loss) << ','
            << format_double(rec.val_loss) << ',' << format_double(rec.val_accuracy) << ','
            << format_double(rec.learning_rate) << '\n';
    }
    if (!out) {
        throw FormatError("failed writing " + path.string());
    }
}

AugmentConfig read_augment_config(const std::filesystem::path& path) {
    const ordered_json j = parse_json_file(path);
    if (!j.is_object()) {
        throw ParseError(path.string() + ": config must be a JSON object");
    }
    AugmentConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "rotation_deg") {
            cfg.rotation_deg = as_double(value, key, path);
        } else if (key == "shift_frac") {
            cfg.shift_frac = as_double(value, key, path);
        } else if (key == "shear_deg") {
            cfg.shear_deg = as_double(value, key, path);
        } else if (key == "zoom_frac") {
            cfg.zoom_frac = as_double(value, key, path);
        } else if (key == "brightness_lo") {
            cfg.brightness_lo = as_double(value, key, path);
        } else if (key == "brightness_hi") {
            cfg.brightness_hi = as_double(value, key, path);
        } else {
            throw ParseError(path.string() + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

TrainConfig read_train_config(const std::filesystem::path& path) {
    const ordered_json j = parse_json_file(path);
    if (!j.is_object()) {
        throw ParseError(path.string() + ": config must be a JSON object");
    }
    TrainConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "learning_rate") {
            cfg.learning_rate = as_double(value, key, path);
        } else if (key == "epochs") {
            cfg.epochs = as_int(value, key, path);
        } else if (key == "batch_size") {
            cfg.batch_size = as_int(value, key, path);
        } else if (key == "es_patience") {
            cfg.es_patience = as_int(value, key, path);
        } else if (key == "lr_factor") {
            cfg.lr_factor = as_double(value, key, path);
        } else if (key == "lr_patience") {
            cfg.lr_patience = as_int(value, key, path);
        } else if (key == "min_lr") {
            cfg.min_lr = as_double(value, key, path);
        } else if (key == "val_fraction") {
            cfg.val_fraction = as_double(value, key, path);
        } else if (key == "d_hidden") {
            cfg.d_hidden = as_int(value, key, path);
        } else if (key == "dropout_rate") {
            cfg.dropout_rate = as_double(value, key, path);
        } else {
            throw ParseError(path.string() + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

} // namespace wae
