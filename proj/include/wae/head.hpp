// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAE_HEAD_HPP
#define WAE_HEAD_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "wae/core.hpp"
#include "wae/error.hpp"
#include "wae/rng.hpp"

namespace wae {

/// Flattened feature maps for n samples: row i holds sample i's h*w*c values
/// in (row, column, channel) order with channel fastest.
struct FeatureBatch {
    int n = 0;
    int h = 0;
    int w = 0;
    int c = 0;
    Eigen::MatrixXd values;    // n x (h*w*c)
    std::vector<Label> labels; // n entries

    /// Throws DomainError on dimension mismatches or non-finite values.
    void validate() const;
};

/// Classification head: global average pooling -> dropout -> batch norm ->
/// dense ReLU -> dense sigmoid. Running statistics belong to the model and
/// are updated only by train-mode forward passes.
struct HeadModel {
    double dropout_rate = 0.2;
    double bn_eps = 1e-3;
    double bn_momentum = 0.99;
    Eigen::VectorXd bn_gamma;        // c
    Eigen::VectorXd bn_beta;         // c
    Eigen::VectorXd bn_running_mean; // c
    Eigen::VectorXd bn_running_var;  // c, elementwise > 0
    Eigen::MatrixXd w1;              // c x d_hidden
    Eigen::VectorXd b1;              // d_hidden
    Eigen::VectorXd w2;              // d_hidden
    double b2 = 0.0;

    int channels() const { return static_cast<int>(bn_gamma.size()); }
    int d_hidden() const { return static_cast<int>(b1.size()); }
    std::int64_t trainable_parameter_count() const;

    /// Gamma 1, beta 0, unit running variance, He-scaled Gaussian w1, zero
    /// b1/w2/b2 (a zero output layer starts every probability at 0.5 and its
    /// first updates already point along the loss gradient).
    static HeadModel init(int channels, int d_hidden, double dropout_rate, std::uint64_t seed);

    /// Throws DomainError when an invariant is violated.
    void validate() const;
};

/// Intermediate activations captured by a train-mode forward pass.
struct ForwardCache {
    bool train_mode = false;
    Eigen::MatrixXd dropped; // n x c, batch-norm input
    Eigen::MatrixXd x_hat;   // n x c, normalized pre-scale activations
    Eigen::MatrixXd bn_out;  // n x c
    Eigen::MatrixXd z1;      // n x d_hidden, pre-ReLU
    Eigen::MatrixXd a1;      // n x d_hidden, post-ReLU
    Eigen::VectorXd probs;   // n
};

struct Gradients {
    Eigen::VectorXd bn_gamma;
    Eigen::VectorXd bn_beta;
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::VectorXd w2;
    double b2 = 0.0;
};

struct TrainConfig {
    double learning_rate = 1e-4;
    int epochs = 20;
    int batch_size = 16;
    int es_patience = 5;
    double lr_factor = 0.5;
    int lr_patience = 2;
    double min_lr = 1e-6;
    double val_fraction = 0.1;
    std::uint64_t seed = 0;
    int d_hidden = 64;
    double dropout_rate = 0.2;

    void validate() const;
};

struct EpochRecord {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double learning_rate = 0.0; // rate in effect during the epoch
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;    // 1-based; 0 when no epoch ran
    int stopped_epoch = 0; // 1-based last epoch run; 0 when no epoch ran
    std::vector<int> val_indices; // ascending indices into the input batch
};

struct TrainResult {
    HeadModel model;
    TrainHistory history;
};

/// Adam first/second moments over a packed parameter vector.
struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    std::int64_t step = 0;

    static AdamState zeros(Eigen::Index size);
};

/// Per-channel spatial mean of one h*w*c map stored channel-fastest.
Eigen::VectorXd global_average_pool(const Eigen::VectorXd& map, int h, int w, int c);

/// Row-wise pooling of a whole batch: returns n x c.
Eigen::MatrixXd global_average_pool(const FeatureBatch& batch);

/// Numerically stable logistic function (branch on sign).
double sigmoid(double x);
Eigen::VectorXd sigmoid(const Eigen::VectorXd& x);

/// Train-mode forward: inverted dropout driven by `rng`, batch statistics
/// for normalization (running statistics updated in place on `model`).
ForwardCache forward_train(HeadModel& model, const FeatureBatch& batch, Rng& rng);

/// Infer-mode forward: pure; dropout is the identity and normalization uses
/// the running statistics.
Eigen::VectorXd forward_infer(const HeadModel& model, const FeatureBatch& batch);

/// Mean binary cross-entropy with probabilities clamped to
/// [1e-7, 1 - 1e-7].
double bce_loss(const Eigen::VectorXd& probs, const std::vector<Label>& labels);

/// Exact analytic gradients of bce_loss for the given train-mode cache.
Gradients backward(const HeadModel& model, const ForwardCache& cache,
                   const std::vector<Label>& labels);

/// Packing order: bn_gamma, bn_beta, w1 (column-major), b1, w2, b2.
Eigen::VectorXd pack_parameters(const HeadModel& model);
Eigen::VectorXd pack_gradients(const Gradients& grads);
void unpack_parameters(const Eigen::VectorXd& packed, HeadModel& model);

/// One Adam update with beta1 0.9, beta2 0.999, eps 1e-7, bias correction.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
               double lr);

/// Full training loop: stratified validation split, seeded per-epoch
/// shuffles, learning-rate reduction on validation-loss plateau, early
/// stopping, best-checkpoint restore.
TrainResult train(const FeatureBatch& features, const TrainConfig& cfg);

} // namespace wae

#endif // WAE_HEAD_HPP
