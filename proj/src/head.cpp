// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#include "wae/head.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace wae {

namespace {

constexpr double kBceClampLo = 1e-7;
constexpr double kBceClampHi = 1.0 - 1e-7;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-7;
constexpr double kImprovementDelta = 1e-9;

} // namespace

void FeatureBatch::validate() const {
    if (n < 1 || h < 1 || w < 1 || c < 1) {
        throw DomainError("feature batch dimensions must be positive");
    }
    const auto cols = static_cast<Eigen::Index>(h) * w * c;
    if (values.rows() != n || values.cols() != cols) {
        throw DomainError("feature batch value matrix must be n x (h*w*c)");
    }
    if (static_cast<int>(labels.size()) != n) {
        throw DomainError("feature batch must carry one label per sample");
    }
    if (!values.allFinite()) {
        throw DomainError("feature batch contains non-finite values");
    }
}

std::int64_t HeadModel::trainable_parameter_count() const {
    const std::int64_t c = channels();
    const std::int64_t d = d_hidden();
    return 2 * c + c * d + d + d + 1;
}

HeadModel HeadModel::init(int channels, int d_hidden, double dropout_rate, std::uint64_t seed) {
    if (channels < 1 || d_hidden < 1) {
        throw DomainError("head dimensions must be positive");
    }
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw DomainError("dropout rate must lie in [0,1)");
    }
    HeadModel m;
    m.dropout_rate = dropout_rate;
    m.bn_gamma = Eigen::VectorXd::Ones(channels);
    m.bn_beta = Eigen::VectorXd::Zero(channels);
    m.bn_running_mean = Eigen::VectorXd::Zero(channels);
    m.bn_running_var = Eigen::VectorXd::Ones(channels);
    m.w1.resize(channels, d_hidden);
    Rng rng(seed);
    const double scale = std::sqrt(2.0 / channels);
    for (int i = 0; i < channels; ++i) {
        for (int j = 0; j < d_hidden; ++j) {
            m.w1(i, j) = scale * rng.normal();
        }
    }
    m.b1 = Eigen::VectorXd::Zero(d_hidden);
    m.w2 = Eigen::VectorXd::Zero(d_hidden);
    m.b2 = 0.0;
    return m;
}

void HeadModel::validate() const {
    const Eigen::Index c = bn_gamma.size();
    const Eigen::Index d = b1.size();
    if (c < 1 || d < 1) {
        throw DomainError("head model has empty layers");
    }
    if (bn_beta.size() != c || bn_running_mean.size() != c || bn_running_var.size() != c ||
        w1.rows() != c || w1.cols() != d || w2.size() != d) {
        throw DomainError("head model parameter shapes are inconsistent");
    }
    if (!(bn_running_var.array() > 0.0).all()) {
        throw DomainError("running variance must be elementwise positive");
    }
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw DomainError("dropout rate must lie in [0,1)");
    }
    if (!(bn_eps > 0.0) || bn_momentum < 0.0 || bn_momentum >= 1.0) {
        throw DomainError("batch-norm constants out of range");
    }
}

Eigen::VectorXd global_average_pool(const Eigen::VectorXd& map, int h, int w, int c) {
    if (h < 1 || w < 1 || c < 1) {
        throw DomainError("global_average_pool requires positive dimensions");
    }
    if (map.size() != static_cast<Eigen::Index>(h) * w * c) {
        throw DomainError("feature map size does not match h*w*c");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(c);
    for (Eigen::Index p = 0; p < static_cast<Eigen::Index>(h) * w; ++p) {
        out += map.segment(p * c, c);
    }
    return out / static_cast<double>(h * w);
}

Eigen::MatrixXd global_average_pool(const FeatureBatch& batch) {
    batch.validate();
    Eigen::MatrixXd out(batch.n, batch.c);
    for (int i = 0; i < batch.n; ++i) {
        out.row(i) = global_average_pool(batch.values.row(i).transpose(), batch.h, batch.w,
                                         batch.c)
                         .transpose();
    }
    return out;
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
    return x.unaryExpr([](double v) { return sigmoid(v); });
}

namespace {

void check_compatible(const HeadModel& model, const FeatureBatch& batch) {
    model.validate();
    batch.validate();
    if (model.channels() != batch.c) {
        throw DomainError("model expects " + std::to_string(model.channels()) +
                          " channels, batch has " + std::to_string(batch.c));
    }
}

Eigen::VectorXd dense_chain(const HeadModel& model, const Eigen::MatrixXd& bn_out,
                            Eigen::MatrixXd* z1_out, Eigen::MatrixXd* a1_out) {
    Eigen::MatrixXd z1 = (bn_out * model.w1).rowwise() + model.b1.transpose();
    Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
    Eigen::VectorXd z2 = (a1 * model.w2).array() + model.b2;
    if (z1_out) *z1_out = std::move(z1);
    if (a1_out) *a1_out = std::move(a1);
    return sigmoid(z2);
}

} // namespace

ForwardCache forward_train(HeadModel& model, const FeatureBatch& batch, Rng& rng) {
    check_compatible(model, batch);
    const Eigen::MatrixXd pooled = global_average_pool(batch);

    ForwardCache cache;
    cache.train_mode = true;

    // Inverted dropout: survivors scaled so expectations match infer mode.
    cache.dropped = pooled;
    const double keep_scale = 1.0 / (1.0 - model.dropout_rate);
    for (int i = 0; i < batch.n; ++i) {
        for (int j = 0; j < batch.c; ++j) {
            cache.dropped(i, j) =
                rng.next_double() < model.dropout_rate ? 0.0 : pooled(i, j) * keep_scale;
        }
    }

    // Biased batch statistics normalize; running statistics only track them.
    const Eigen::RowVectorXd mu = cache.dropped.colwise().mean();
    const Eigen::MatrixXd centered = cache.dropped.rowwise() - mu;
    const Eigen::RowVectorXd var = centered.array().square().colwise().mean();
    const Eigen::RowVectorXd denom = (var.array() + model.bn_eps).sqrt();
    cache.x_hat = centered.array().rowwise() / denom.array();
    cache.bn_out = (cache.x_hat.array().rowwise() * model.bn_gamma.transpose().array())
                       .rowwise() +
                   model.bn_beta.transpose().array();

    model.bn_running_mean =
        model.bn_momentum * model.bn_running_mean + (1.0 - model.bn_momentum) * mu.transpose();
    model.bn_running_var =
        model.bn_momentum * model.bn_running_var + (1.0 - model.bn_momentum) * var.transpose();

    cache.probs = dense_chain(model, cache.bn_out, &cache.z1, &cache.a1);
    return cache;
}

Eigen::VectorXd forward_infer(const HeadModel& model, const FeatureBatch& batch) {
    check_compatible(model, batch);
    const Eigen::MatrixXd pooled = global_average_pool(batch);
    const Eigen::RowVectorXd denom =
        (model.bn_running_var.transpose().array() + model.bn_eps).sqrt();
    const Eigen::MatrixXd x_hat =
        (pooled.rowwise() - model.bn_running_mean.transpose()).array().rowwise() /
        denom.array();
    const Eigen::MatrixXd bn_out =
        (x_hat.array().rowwise() * model.bn_gamma.transpose().array()).rowwise() +
        model.bn_beta.transpose().array();
    return dense_chain(model, bn_out, nullptr, nullptr);
}

double bce_loss(const Eigen::VectorXd& probs, const std::vector<Label>& labels) {
    if (probs.size() != static_cast<Eigen::Index>(labels.size())) {
        throw DomainError("bce_loss length mismatch");
    }
    if (probs.size() == 0) {
        throw DomainError("bce_loss requires at least one sample");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        const double p = std::clamp(probs[i], kBceClampLo, kBceClampHi);
        const double y = labels[static_cast<std::size_t>(i)] == Label::kPneumonia ? 1.0 : 0.0;
        sum -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    }
    return sum / static_cast<double>(probs.size());
}

Gradients backward(const HeadModel& model, const ForwardCache& cache,
                   const std::vector<Label>& labels) {
    if (!cache.train_mode) {
        throw DomainError("backward requires a cache from a train-mode forward pass");
    }
    const auto n = cache.probs.size();
    if (n == 0 || n != static_cast<Eigen::Index>(labels.size()) || cache.a1.rows() != n ||
        cache.x_hat.rows() != n) {
        throw DomainError("backward cache does not match the label vector");
    }

    // d(loss)/d(z2); zero where the BCE clamp flattens the loss. No gradient
    // flows past batch norm because nothing trainable precedes it.
    Eigen::VectorXd delta2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = cache.probs[i];
        const double y = labels[static_cast<std::size_t>(i)] == Label::kPneumonia ? 1.0 : 0.0;
        delta2[i] =
            (p > kBceClampLo && p < kBceClampHi) ? (p - y) / static_cast<double>(n) : 0.0;
    }

    Gradients g;
    g.w2 = cache.a1.transpose() * delta2;
    g.b2 = delta2.sum();

    const Eigen::MatrixXd relu_mask = (cache.z1.array() > 0.0).cast<double>();
    const Eigen::MatrixXd delta_z1 =
        (delta2 * model.w2.transpose()).array() * relu_mask.array();
    g.w1 = cache.bn_out.transpose() * delta_z1;
    g.b1 = delta_z1.colwise().sum().transpose();

    const Eigen::MatrixXd delta_bn = delta_z1 * model.w1.transpose();
    g.bn_gamma = (delta_bn.array() * cache.x_hat.array()).colwise().sum().transpose();
    g.bn_beta = delta_bn.colwise().sum().transpose();
    return g;
}

Eigen::VectorXd pack_parameters(const HeadModel& model) {
    const Eigen::Index c = model.bn_gamma.size();
    const Eigen::Index d = model.b1.size();
    Eigen::VectorXd packed(2 * c + c * d + 2 * d + 1);
    Eigen::Index at = 0;
    packed.segment(at, c) = model.bn_gamma;
    at += c;
    packed.segment(at, c) = model.bn_beta;
    at += c;
    packed.segment(at, c * d) = Eigen::Map<const Eigen::VectorXd>(model.w1.data(), c * d);
    at += c * d;
    packed.segment(at, d) = model.b1;
    at += d;
    packed.segment(at, d) = model.w2;
    at += d;
    packed[at] = model.b2;
    return packed;
}

Eigen::VectorXd pack_gradients(const Gradients& grads) {
    const Eigen::Index c = grads.bn_gamma.size();
    const Eigen::Index d = grads.b1.size();
    Eigen::VectorXd packed(2 * c + c * d + 2 * d + 1);
    Eigen::Index at = 0;
    packed.segment(at, c) = grads.bn_gamma;
    at += c;
    packed.segment(at, c) = grads.bn_beta;
    at += c;
    packed.segment(at, c * d) = Eigen::Map<const Eigen::VectorXd>(grads.w1.data(), c * d);
    at += c * d;
    packed.segment(at, d) = grads.b1;
    at += d;
    packed.segment(at, d) = grads.w2;
    at += d;
    packed[at] = grads.b2;
    return packed;
}

void unpack_parameters(const Eigen::VectorXd& packed, HeadModel& model) {
    const Eigen::Index c = model.bn_gamma.size();
    const Eigen::Index d = model.b1.size();
    if (packed.size() != 2 * c + c * d + 2 * d + 1) {
        throw DomainError("packed parameter vector has the wrong size");
    }
    Eigen::Index at = 0;
    model.bn_gamma = packed.segment(at, c);
    at += c;
    model.bn_beta = packed.segment(at, c);
    at += c;
    Eigen::Map<Eigen::VectorXd>(model.w1.data(), c * d) = packed.segment(at, c * d);
    at += c * d;
    model.b1 = packed.segment(at, d);
    at += d;
    model.w2 = packed.segment(at, d);
    at += d;
    model.b2 = packed[at];
}

AdamState AdamState::zeros(Eigen::Index size) {
    AdamState s;
    s.m = Eigen::VectorXd::Zero(size);
    s.v = Eigen::VectorXd::Zero(size);
    s.step = 0;
    return s;
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
               double lr) {
    if (params.size() != grads.size() || params.size() != state.m.size() ||
        params.size() != state.v.size()) {
        throw DomainError("adam_step shape mismatch");
    }
    state.step += 1;
    state.m = kAdamBeta1 * state.m + (1.0 - kAdamBeta1) * grads;
    state.v = (kAdamBeta2 * state.v.array() + (1.0 - kAdamBeta2) * grads.array().square())
                  .matrix();
    const double t = static_cast<double>(state.step);
    const Eigen::ArrayXd m_hat = state.m.array() / (1.0 - std::pow(kAdamBeta1, t));
    const Eigen::ArrayXd v_hat = state.v.array() / (1.0 - std::pow(kAdamBeta2, t));
    params.array() -= lr * m_hat / (v_hat.sqrt() + kAdamEps);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw DomainError("learning_rate must be positive");
    if (epochs < 0) throw DomainError("epochs must be nonnegative");
    if (batch_size < 1) throw DomainError("batch_size must be at least 1");
    if (es_patience < 1) throw DomainError("es_patience must be at least 1");
    if (!(lr_factor > 0.0 && lr_factor < 1.0)) throw DomainError("lr_factor must lie in (0,1)");
    if (lr_patience < 1) throw DomainError("lr_patience must be at least 1");
    if (!(min_lr > 0.0)) throw DomainError("min_lr must be positive");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
        throw DomainError("val_fraction must lie in (0,1)");
    }
    if (d_hidden < 1) throw DomainError("d_hidden must be at least 1");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw DomainError("dropout_rate must lie in [0,1)");
    }
}

namespace {

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        auto j = static_cast<std::size_t>(rng.next_double() * static_cast<double>(i));
        if (j >= i) j = i - 1;
        std::swap(idx[i - 1], idx[j]);
    }
}

FeatureBatch gather(const FeatureBatch& src, const std::vector<int>& idx) {
    FeatureBatch out;
    out.n = static_cast<int>(idx.size());
    out.h = src.h;
    out.w = src.w;
    out.c = src.c;
    out.values.resize(out.n, src.values.cols());
    out.labels.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.values.row(static_cast<Eigen::Index>(i)) = src.values.row(idx[i]);
        out.labels.push_back(src.labels[static_cast<std::size_t>(idx[i])]);
    }
    return out;
}

} // namespace

TrainResult train(const FeatureBatch& features, const TrainConfig& cfg) {
    cfg.validate();
    features.validate();

    Rng root(cfg.seed);
    const std::uint64_t init_seed = root.next_u64();
    const std::uint64_t split_seed = root.next_u64();

    HeadModel model = HeadModel::init(features.c, cfg.d_hidden, cfg.dropout_rate, init_seed);

    // Stratified split: shuffle each class, take the head of each as
    // validation so small classes are never swallowed whole.
    std::vector<int> pos, neg;
    for (int i = 0; i < features.n; ++i) {
        (features.labels[static_cast<std::size_t>(i)] == Label::kPneumonia ? pos : neg)
            .push_back(i);
    }
    Rng split_rng(split_seed);
    shuffle_indices(pos, split_rng);
    shuffle_indices(neg, split_rng);
    const auto val_count = [&](std::size_t class_size) -> std::size_t {
        if (class_size < 2) return 0;
        const auto raw = static_cast<std::size_t>(
            std::floor(cfg.val_fraction * static_cast<double>(class_size)));
        return std::max<std::size_t>(1, raw);
    };
    const std::size_t val_pos = val_count(pos.size());
    const std::size_t val_neg = val_count(neg.size());

    std::vector<int> val_idx, train_idx;
    val_idx.insert(val_idx.end(), pos.begin(), pos.begin() + static_cast<long>(val_pos));
    val_idx.insert(val_idx.end(), neg.begin(), neg.begin() + static_cast<long>(val_neg));
    train_idx.insert(train_idx.end(), pos.begin() + static_cast<long>(val_pos), pos.end());
    train_idx.insert(train_idx.end(), neg.begin() + static_cast<long>(val_neg), neg.end());

    const std::size_t train_pos = pos.size() - val_pos;
    const std::size_t train_neg = neg.size() - val_neg;
    if (train_idx.empty() || train_pos == 0 || train_neg == 0) {
        throw DomainError("degenerate training split: both classes must be present");
    }
    if (val_idx.empty() && cfg.epochs > 0) {
        throw DomainError(
            "degenerate validation split: need at least 2 samples in some class");
    }

    std::sort(val_idx.begin(), val_idx.end());
    TrainHistory history;
    history.val_indices = val_idx;
    const FeatureBatch val_batch = val_idx.empty() ? FeatureBatch{} : gather(features, val_idx);

    Eigen::VectorXd params = pack_parameters(model);
    AdamState state = AdamState::zeros(params.size());

    double lr = cfg.learning_rate;
    double best_val = std::numeric_limits<double>::infinity();
    HeadModel best_model = model;
    int best_epoch = 0;
    int lr_wait = 0;
    int es_wait = 0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng epoch_rng(root.next_u64());
        shuffle_indices(train_idx, epoch_rng);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < train_idx.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop =
                std::min(train_idx.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const std::vector<int> slice(train_idx.begin() + static_cast<long>(start),
                                         train_idx.begin() + static_cast<long>(stop));
            const FeatureBatch sub = gather(features, slice);
            const ForwardCache cache = forward_train(model, sub, epoch_rng);
            loss_sum += bce_loss(cache.probs, sub.labels) * static_cast<double>(sub.n);
            const Gradients grads = backward(model, cache, sub.labels);
            adam_step(params, pack_gradients(grads), state, lr);
            unpack_parameters(params, model);
        }

        EpochRecord rec;
        rec.train_loss = loss_sum / static_cast<double>(train_idx.size());
        rec.learning_rate = lr;
        const Eigen::VectorXd val_probs = forward_infer(model, val_batch);
        rec.val_loss = bce_loss(val_probs, val_batch.labels);
        int correct = 0;
        for (Eigen::Index i = 0; i < val_probs.size(); ++i) {
            if (label_from_score(val_probs[i]) == val_batch.labels[static_cast<std::size_t>(i)])
                ++correct;
        }
        rec.val_accuracy = static_cast<double>(correct) / static_cast<double>(val_probs.size());
        history.epochs.push_back(rec);
        history.stopped_epoch = epoch;

        if (rec.val_loss < best_val - kImprovementDelta) {
            best_val = rec.val_loss;
            best_epoch = epoch;
            best_model = model;
            lr_wait = 0;
            es_wait = 0;
        } else {
            ++lr_wait;
            ++es_wait;
            if (lr_wait >= cfg.lr_patience) {
                lr = std::max(cfg.min_lr, lr * cfg.lr_factor);
                lr_wait = 0;
            }
            if (es_wait >= cfg.es_patience) {
                break;
            }
        }
    }

    history.best_epoch = best_epoch;
    TrainResult result;
    result.model = best_epoch > 0 ? std::move(best_model) : std::move(model);
    result.history = std::move(history);
    return result;
}

} // namespace wae
