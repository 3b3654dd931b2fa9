#pragma once

#include <functional>
#include <span>
#include <vector>

#include "horizonbench/activations.hpp"
#include "horizonbench/matrix.hpp"
#include "horizonbench/rng.hpp"

// Layer-level building blocks shared by the model implementations. Weight
// matrices are stored out x in; batches are row-major (batch x features).

namespace hb::layers {

Matrix glorot_init(Rng& rng, std::size_t rows, std::size_t cols);

using ParamVisitor = std::function<void(std::span<double>)>;

struct Dense {
    Matrix w;               // out x in
    std::vector<double> b;  // out
    Activation act = Activation::Identity;

    Dense() = default;
    Dense(int out, int in, Activation a, Rng& rng);
    static Dense zeros_like(const Dense& d);

    void visit(const ParamVisitor& f);
};

struct DenseCache {
    Matrix x;  // input batch
    Matrix z;  // pre-activation
};

Matrix dense_forward(const Dense& d, const Matrix& x, DenseCache* cache);
// Returns d(loss)/d(input); accumulates parameter gradients into grad.
Matrix dense_backward(const Dense& d, const DenseCache& cache, const Matrix& d_out, Dense& grad);

// Elman recurrence h_t = tanh(w*x_t + u*h_{t-1} + b), h_0 = 0.
struct Elman {
    Matrix w;  // hidden x in
    Matrix u;  // hidden x hidden
    std::vector<double> b;

    Elman() = default;
    Elman(int hidden, int in, Rng& rng);
    static Elman zeros_like(const Elman& e);

    void visit(const ParamVisitor& f);
    int hidden() const { return static_cast<int>(w.rows()); }
};

struct ElmanCache {
    std::vector<Matrix> x;  // per-step inputs
    std::vector<Matrix> h;  // per-step hidden states
};

// Returns the hidden state of every step.
const std::vector<Matrix>& elman_forward(const Elman& e, const std::vector<Matrix>& xs,
                                         ElmanCache& cache);
// d_h[t] is the loss gradient arriving at h_t from above (empty matrix = none).
// Returns per-step input gradients; accumulates parameter gradients.
std::vector<Matrix> elman_backward(const Elman& e, const ElmanCache& cache,
                                   const std::vector<Matrix>& d_h, Elman& grad);

// LSTM cell, gates i/f/o sigmoid, candidate tanh, h_t = tanh(c_t) * o_t,
// zero initial h and c.
struct Lstm {
    Matrix ui, uf, uo, ug;  // hidden x in
    Matrix wi, wf, wo, wg;  // hidden x hidden
    std::vector<double> bi, bf, bo, bg;

    Lstm() = default;
    Lstm(int hidden, int in, Rng& rng);
    static Lstm zeros_like(const Lstm& l);

    void visit(const ParamVisitor& f);
    int hidden() const { return static_cast<int>(ui.rows()); }
};

struct LstmCache {
    std::vector<Matrix> x;
    std::vector<Matrix> i, f, o, g;  // gate/candidate outputs
    std::vector<Matrix> c;           // cell states
    std::vector<Matrix> h;           // hidden states
};

// cell_sigmoid selects c_t = sigmoid(f*c_{t-1} + i*g) over the conventional
// c_t = f*c_{t-1} + i*g.
const std::vector<Matrix>& lstm_forward(const Lstm& l, const std::vector<Matrix>& xs,
                                        bool cell_sigmoid, LstmCache& cache);
std::vector<Matrix> lstm_backward(const Lstm& l, const LstmCache& cache,
                                  const std::vector<Matrix>& d_h, bool cell_sigmoid, Lstm& grad);

// Splits a batch of windows (batch x D) into D per-step column matrices
// (batch x 1), oldest observation first.
std::vector<Matrix> window_steps(const Matrix& inputs);

void check_finite(const Matrix& m, const char* layer);

}  // namespace hb::layers
