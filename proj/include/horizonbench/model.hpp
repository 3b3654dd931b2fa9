#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "horizonbench/activations.hpp"
#include "horizonbench/matrix.hpp"
#include "horizonbench/rng.hpp"

namespace hb::models {

enum class ModelKind { FnnSgd, FnnAdam, Rnn, Lstm, BdLstm, EdLstm, Cnn };

std::string to_string(ModelKind kind);          // fnn_sgd, lstm, ...
std::string display_name(ModelKind kind);       // FNN-SGD, LSTM, ...
ModelKind model_kind_from_string(const std::string& name);
std::span<const ModelKind> all_model_kinds();   // canonical column order

struct ModelSpec {
    ModelKind kind = ModelKind::Lstm;
    int input_dim = 5;    // window length D
    int output_dim = 10;  // horizon H
    int hidden = 10;      // hidden width shared by every architecture
    int conv_filters = 64;
    int conv_kernel = 3;
    int pool_width = 2;
    Activation fnn_hidden_activation = Activation::Relu;
    // Use the published cell update c_t = sigmoid(f*c + i*g) instead of the
    // conventional c_t = f*c + i*g.
    bool cell_state_sigmoid = false;
};

// A layered predictor mapping a batch of input windows (batch x D) to
// multi-step predictions (batch x H), with an exact-gradient backward pass.
// Single-owner during training: forward retains the intermediates that the
// next backward consumes.
class Model {
public:
    virtual ~Model() = default;

    const ModelSpec& spec() const { return spec_; }

    std::size_t param_count() const;
    std::vector<double> parameters() const;
    void load_parameters(std::span<const double> flat);

    Matrix forward(const Matrix& inputs);
    // Gradient of the scalar loss wrt every parameter, flat, in parameters()
    // order. loss_grad is d(loss)/d(predictions), batch x H.
    std::vector<double> backward(const Matrix& loss_grad);
    // Forward without retaining intermediates.
    Matrix predict(const Matrix& inputs) const;

protected:
    explicit Model(ModelSpec spec) : spec_(spec) {}

    using ParamVisitor = std::function<void(std::span<double>)>;
    // Visits every parameter block in a fixed order; defines the flat layout.
    virtual void visit_params(const ParamVisitor& visit) = 0;

    virtual Matrix do_forward(const Matrix& inputs) = 0;
    virtual std::vector<double> do_backward(const Matrix& loss_grad) = 0;
    virtual Matrix do_predict(const Matrix& inputs) const = 0;

private:
    void check_inputs(const Matrix& inputs) const;

    ModelSpec spec_;
    bool has_cache_ = false;
    std::size_t cached_batch_ = 0;
};

// Parameters drawn Glorot-uniform (biases zero) from rng in layout order.
std::unique_ptr<Model> build_model(const ModelSpec& spec, Rng& rng);

ModelSpec default_spec(ModelKind kind, int input_dim, int output_dim);

}  // namespace hb::models
