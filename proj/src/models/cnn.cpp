#include <algorithm>
#include <optional>
#include <stdexcept>

#include "horizonbench/layers.hpp"
#include "horizonbench/model.hpp"

#include "arch.hpp"

namespace hb::models::detail {

namespace {

// Valid 1-d convolution over the window (one input channel), ReLU, max-pool
// with the remainder window dropped, then dense hidden and linear output.
class CnnModel final : public Model {
public:
    CnnModel(const ModelSpec& spec, Rng& rng)
        : Model(spec),
          conv_len_(spec.input_dim - spec.conv_kernel + 1),
          pool_len_(conv_len_ / spec.pool_width),
          conv_w_(layers::glorot_init(rng, static_cast<std::size_t>(spec.conv_filters),
                                      static_cast<std::size_t>(spec.conv_kernel))),
          conv_b_(static_cast<std::size_t>(spec.conv_filters), 0.0),
          fc_(spec.hidden, spec.conv_filters * pool_len_, Activation::Relu, rng),
          out_(spec.output_dim, spec.hidden, Activation::Identity, rng) {
        if (conv_len_ < 1) {
            throw std::invalid_argument("cnn: window length " + std::to_string(spec.input_dim) +
                                        " shorter than kernel " + std::to_string(spec.conv_kernel));
        }
        if (pool_len_ < 1) {
            throw std::invalid_argument("cnn: convolution output length " +
                                        std::to_string(conv_len_) + " shorter than pool width " +
                                        std::to_string(spec.pool_width));
        }
    }

protected:
    void visit_params(const ParamVisitor& f) override {
        f(conv_w_.flat());
        f(conv_b_);
        fc_.visit(f);
        out_.visit(f);
    }

    Matrix do_forward(const Matrix& x) override {
        cache_.emplace();
        return eval(x, &*cache_);
    }

    Matrix do_predict(const Matrix& x) const override { return eval(x, nullptr); }

    std::vector<double> do_backward(const Matrix& d_y) override {
        Cache& c = *cache_;
        Matrix g_conv_w(conv_w_.rows(), conv_w_.cols());
        std::vector<double> g_conv_b(conv_b_.size(), 0.0);
        auto g_fc = layers::Dense::zeros_like(fc_);
        auto g_out = layers::Dense::zeros_like(out_);

        const Matrix d_hidden = layers::dense_backward(out_, c.out, d_y, g_out);
        const Matrix d_pool = layers::dense_backward(fc_, c.fc, d_hidden, g_fc);

        const std::size_t batch = d_y.rows();
        const int filters = spec().conv_filters;
        const int kernel = spec().conv_kernel;
        for (std::size_t r = 0; r < batch; ++r) {
            for (int fi = 0; fi < filters; ++fi) {
                for (int w = 0; w < pool_len_; ++w) {
                    const double upstream = d_pool(r, static_cast<std::size_t>(fi * pool_len_ + w));
                    if (upstream == 0.0) continue;
                    const int p = c.argmax[(r * static_cast<std::size_t>(filters) +
                                            static_cast<std::size_t>(fi)) *
                                               static_cast<std::size_t>(pool_len_) +
                                           static_cast<std::size_t>(w)];
                    const double z = c.conv_z(r, static_cast<std::size_t>(fi * conv_len_ + p));
                    if (z <= 0.0) continue;  // relu gate
                    for (int k = 0; k < kernel; ++k) {
                        g_conv_w(static_cast<std::size_t>(fi), static_cast<std::size_t>(k)) +=
                            upstream * c.x(r, static_cast<std::size_t>(p + k));
                    }
                    g_conv_b[static_cast<std::size_t>(fi)] += upstream;
                }
            }
        }

        std::vector<double> flat;
        auto take = [&](std::span<double> b) { flat.insert(flat.end(), b.begin(), b.end()); };
        take(g_conv_w.flat());
        take(g_conv_b);
        g_fc.visit(take);
        g_out.visit(take);
        return flat;
    }

private:
    struct Cache {
        Matrix x;
        Matrix conv_z;            // batch x (filters * conv_len), pre-activation
        std::vector<int> argmax;  // batch * filters * pool_len positions
        layers::DenseCache fc, out;
    };

    Matrix eval(const Matrix& x, Cache* c) const {
        const std::size_t batch = x.rows();
        const int filters = spec().conv_filters;
        const int kernel = spec().conv_kernel;
        const int pool_width = spec().pool_width;

        Matrix conv_z(batch, static_cast<std::size_t>(filters * conv_len_));
        for (std::size_t r = 0; r < batch; ++r) {
            const double* xrow = x.row(r);
            for (int fi = 0; fi < filters; ++fi) {
                const double* w = conv_w_.row(static_cast<std::size_t>(fi));
                for (int p = 0; p < conv_len_; ++p) {
                    double acc = conv_b_[static_cast<std::size_t>(fi)];
                    for (int k = 0; k < kernel; ++k) acc += w[k] * xrow[p + k];
                    conv_z(r, static_cast<std::size_t>(fi * conv_len_ + p)) = acc;
                }
            }
        }
        layers::check_finite(conv_z, "cnn.conv");

        Matrix pooled(batch, static_cast<std::size_t>(filters * pool_len_));
        std::vector<int> argmax(batch * static_cast<std::size_t>(filters * pool_len_), 0);
        for (std::size_t r = 0; r < batch; ++r) {
            for (int fi = 0; fi < filters; ++fi) {
                for (int w = 0; w < pool_len_; ++w) {
                    int best = w * pool_width;
                    double best_v = relu(conv_z(r, static_cast<std::size_t>(fi * conv_len_ + best)));
                    for (int off = 1; off < pool_width; ++off) {
                        const int p = w * pool_width + off;
                        const double v = relu(conv_z(r, static_cast<std::size_t>(fi * conv_len_ + p)));
                        if (v > best_v) {
                            best_v = v;
                            best = p;
                        }
                    }
                    pooled(r, static_cast<std::size_t>(fi * pool_len_ + w)) = best_v;
                    argmax[(r * static_cast<std::size_t>(filters) + static_cast<std::size_t>(fi)) *
                               static_cast<std::size_t>(pool_len_) +
                           static_cast<std::size_t>(w)] = best;
                }
            }
        }

        layers::DenseCache local_fc, local_out;
        Matrix hidden = layers::dense_forward(fc_, pooled, c ? &c->fc : &local_fc);
        layers::check_finite(hidden, "cnn.hidden");
        Matrix y = layers::dense_forward(out_, hidden, c ? &c->out : &local_out);
        layers::check_finite(y, "cnn.output");

        if (c) {
            c->x = x;
            c->conv_z = std::move(conv_z);
            c->argmax = std::move(argmax);
        }
        return y;
    }

    static double relu(double v) { return v > 0.0 ? v : 0.0; }

    int conv_len_;
    int pool_len_;
    Matrix conv_w_;
    std::vector<double> conv_b_;
    layers::Dense fc_, out_;
    std::optional<Cache> cache_;
};

}  // namespace

std::unique_ptr<Model> make_cnn(const ModelSpec& spec, Rng& rng) {
    return std::make_unique<CnnModel>(spec, rng);
}

}  // namespace hb::models::detail
