#include "horizonbench/model.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "arch.hpp"

namespace hb::models {

namespace {

constexpr std::array<ModelKind, 7> kAllKinds = {
    ModelKind::FnnAdam, ModelKind::FnnSgd, ModelKind::Lstm, ModelKind::BdLstm,
    ModelKind::EdLstm,  ModelKind::Rnn,    ModelKind::Cnn,
};

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::FnnSgd: return "fnn_sgd";
        case ModelKind::FnnAdam: return "fnn_adam";
        case ModelKind::Rnn: return "rnn";
        case ModelKind::Lstm: return "lstm";
        case ModelKind::BdLstm: return "bd_lstm";
        case ModelKind::EdLstm: return "ed_lstm";
        case ModelKind::Cnn: return "cnn";
    }
    return "?";
}

std::string display_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::FnnSgd: return "FNN-SGD";
        case ModelKind::FnnAdam: return "FNN-Adam";
        case ModelKind::Rnn: return "RNN";
        case ModelKind::Lstm: return "LSTM";
        case ModelKind::BdLstm: return "BD-LSTM";
        case ModelKind::EdLstm: return "ED-LSTM";
        case ModelKind::Cnn: return "CNN";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    for (ModelKind k : kAllKinds) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown model kind: " + name);
}

std::span<const ModelKind> all_model_kinds() { return kAllKinds; }

std::size_t Model::param_count() const {
    std::size_t n = 0;
    const_cast<Model*>(this)->visit_params([&](std::span<double> block) { n += block.size(); });
    return n;
}

std::vector<double> Model::parameters() const {
    std::vector<double> out;
    const_cast<Model*>(this)->visit_params(
        [&](std::span<double> block) { out.insert(out.end(), block.begin(), block.end()); });
    return out;
}

void Model::load_parameters(std::span<const double> flat) {
    if (flat.size() != param_count()) {
        throw std::invalid_argument("load_parameters: expected " + std::to_string(param_count()) +
                                    " values, got " + std::to_string(flat.size()));
    }
    std::size_t off = 0;
    visit_params([&](std::span<double> block) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), block.size(), block.begin());
        off += block.size();
    });
}

void Model::check_inputs(const Matrix& inputs) const {
    if (inputs.rows() == 0) throw std::invalid_argument("forward: empty batch");
    if (inputs.cols() != static_cast<std::size_t>(spec_.input_dim)) {
        throw std::invalid_argument("forward: input width " + std::to_string(inputs.cols()) +
                                    " does not match window length " +
                                    std::to_string(spec_.input_dim));
    }
}

Matrix Model::forward(const Matrix& inputs) {
    check_inputs(inputs);
    has_cache_ = false;  // a throwing pass must not leave a stale cache valid
    Matrix y = do_forward(inputs);
    has_cache_ = true;
    cached_batch_ = inputs.rows();
    return y;
}

std::vector<double> Model::backward(const Matrix& loss_grad) {
    if (!has_cache_) throw std::logic_error("backward: no matching forward pass cached");
    if (loss_grad.rows() != cached_batch_ ||
        loss_grad.cols() != static_cast<std::size_t>(spec_.output_dim)) {
        throw std::invalid_argument("backward: loss gradient shape mismatch");
    }
    return do_backward(loss_grad);
}

Matrix Model::predict(const Matrix& inputs) const {
    check_inputs(inputs);
    return do_predict(inputs);
}

ModelSpec default_spec(ModelKind kind, int input_dim, int output_dim) {
    ModelSpec spec;
    spec.kind = kind;
    spec.input_dim = input_dim;
    spec.output_dim = output_dim;
    return spec;
}

std::unique_ptr<Model> build_model(const ModelSpec& spec, Rng& rng) {
    if (spec.input_dim < 1 || spec.output_dim < 1 || spec.hidden < 1) {
        throw std::invalid_argument("build_model: dimensions must be >= 1");
    }
    switch (spec.kind) {
        case ModelKind::FnnSgd:
        case ModelKind::FnnAdam: return detail::make_fnn(spec, rng);
        case ModelKind::Rnn: return detail::make_rnn(spec, rng);
        case ModelKind::Lstm: return detail::make_lstm(spec, rng);
        case ModelKind::BdLstm: return detail::make_bd_lstm(spec, rng);
        case ModelKind::EdLstm: return detail::make_ed_lstm(spec, rng);
        case ModelKind::Cnn: return detail::make_cnn(spec, rng);
    }
    throw std::invalid_argument("build_model: unknown model kind");
}

}  // namespace hb::models
