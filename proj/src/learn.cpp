#include "horizonbench/learn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "horizonbench/rng.hpp"

namespace hb::learn {

LossGrad mse_loss(const Matrix& pred, const Matrix& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw std::invalid_argument("mse_loss: shape mismatch");
    }
    const double n = static_cast<double>(pred.size());
    LossGrad out;
    out.grad = Matrix(pred.rows(), pred.cols());
    double acc = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double diff = pred.flat()[k] - target.flat()[k];
        acc += diff * diff;
        out.grad.flat()[k] = 2.0 * diff / n;
    }
    out.loss = acc / n;
    return out;
}

void sgd_step(std::span<double> params, std::span<const double> grads, double lr) {
    if (params.size() != grads.size()) throw std::invalid_argument("sgd_step: length mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: length mismatch");
    }
    state.t += 1;
    const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / bias1;
        const double v_hat = state.v[i] / bias2;
        params[i] -= state.alpha * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

double clip_global_norm(std::span<double> grads, double max_norm) {
    double sq = 0.0;
    for (double g : grads) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (double& g : grads) g *= scale;
    }
    return norm;
}

std::vector<double> train(models::Model& model, const data::EmbeddedDataset& train_set,
                          const TrainConfig& config) {
    const std::size_t n = train_set.samples();
    if (n == 0) throw std::invalid_argument("train: empty training set");
    if (config.max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
    if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");

    std::vector<double> params = model.parameters();
    AdamState adam(params.size(), config.learning_rate);

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(config.max_epochs));

    const auto batch_size = static_cast<std::size_t>(config.batch_size);
    for (long epoch = 0; epoch < config.max_epochs; ++epoch) {
        Rng order_rng(config.shuffle_seed, static_cast<std::uint64_t>(epoch) + 1);
        const auto order = shuffled_indices(n, order_rng);

        double epoch_sq_sum = 0.0;
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t count = std::min(batch_size, n - start);
            Matrix inputs(count, train_set.inputs.cols());
            Matrix targets(count, train_set.targets.cols());
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t src = order[start + i];
                for (std::size_t j = 0; j < inputs.cols(); ++j) {
                    inputs(i, j) = train_set.inputs(src, j);
                }
                for (std::size_t j = 0; j < targets.cols(); ++j) {
                    targets(i, j) = train_set.targets(src, j);
                }
            }

            const Matrix pred = model.forward(inputs);
            const LossGrad lg = mse_loss(pred, targets);
            if (!std::isfinite(lg.loss)) {
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + " batch " +
                                         std::to_string(start / batch_size));
            }
            epoch_sq_sum += lg.loss * static_cast<double>(count);

            std::vector<double> grads = model.backward(lg.grad);
            if (config.gradient_clip) clip_global_norm(grads, *config.gradient_clip);
            if (config.optimizer == OptimizerKind::Sgd) {
                sgd_step(params, grads, config.learning_rate);
            } else {
                adam_step(adam, params, grads);
            }
            model.load_parameters(params);
        }
        history.push_back(epoch_sq_sum / static_cast<double>(n));
    }
    return history;
}

Matrix predict(const models::Model& model, const data::EmbeddedDataset& dataset) {
    return model.predict(dataset.inputs);
}

}  // namespace hb::learn
