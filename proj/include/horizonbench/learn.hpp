#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "horizonbench/dataset.hpp"
#include "horizonbench/matrix.hpp"
#include "horizonbench/model.hpp"

namespace hb::learn {

struct LossGrad {
    double loss = 0.0;
    Matrix grad;  // d(loss)/d(pred), same shape as pred
};

// Mean over all batch*H cells of (pred - target)^2.
LossGrad mse_loss(const Matrix& pred, const Matrix& target);

void sgd_step(std::span<double> params, std::span<const double> grads, double lr);

struct AdamState {
    std::vector<double> m, v;
    long t = 0;
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t n, double alpha = 1e-3) : m(n, 0.0), v(n, 0.0), alpha(alpha) {}
};

// One update: t += 1; m, v decay toward g, g^2; bias-corrected step
// params -= alpha * m_hat / (sqrt(v_hat) + eps).
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

// Scales grads in place so the global L2 norm is at most max_norm; returns the
// pre-clip norm.
double clip_global_norm(std::span<double> grads, double max_norm);

enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
    long max_epochs = 1000;
    long batch_size = 32;
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::uint64_t shuffle_seed = 0;
    std::optional<double> gradient_clip;  // global-norm bound
};

// Shuffled mini-batch training for exactly max_epochs epochs. Returns the
// per-epoch mean loss (computed on the pre-update forward of each batch).
// Deterministic given (initial parameters, config).
std::vector<double> train(models::Model& model, const data::EmbeddedDataset& train_set,
                          const TrainConfig& config);

Matrix predict(const models::Model& model, const data::EmbeddedDataset& dataset);

}  // namespace hb::learn
