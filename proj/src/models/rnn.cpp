#include <optional>

#include "horizonbench/layers.hpp"
#include "horizonbench/model.hpp"

#include "arch.hpp"

namespace hb::models::detail {

namespace {

// Two stacked Elman layers; the output map reads the final step of the second
// layer's hidden sequence.
class RnnModel final : public Model {
public:
    RnnModel(const ModelSpec& spec, Rng& rng)
        : Model(spec),
          first_(spec.hidden, 1, rng),
          second_(spec.hidden, spec.hidden, rng),
          out_(spec.output_dim, spec.hidden, Activation::Identity, rng) {}

protected:
    void visit_params(const ParamVisitor& f) override {
        first_.visit(f);
        second_.visit(f);
        out_.visit(f);
    }

    Matrix do_forward(const Matrix& x) override {
        cache_.emplace();
        return eval(x, &*cache_);
    }

    Matrix do_predict(const Matrix& x) const override { return eval(x, nullptr); }

    std::vector<double> do_backward(const Matrix& d_y) override {
        Cache& c = *cache_;
        auto g_first = layers::Elman::zeros_like(first_);
        auto g_second = layers::Elman::zeros_like(second_);
        auto g_out = layers::Dense::zeros_like(out_);

        const Matrix d_final = layers::dense_backward(out_, c.out, d_y, g_out);
        std::vector<Matrix> d_h2(c.e2.h.size());
        d_h2.back() = d_final;
        // the second layer's step inputs are the first layer's hidden states
        std::vector<Matrix> d_h1 = layers::elman_backward(second_, c.e2, d_h2, g_second);
        layers::elman_backward(first_, c.e1, d_h1, g_first);

        std::vector<double> flat;
        auto take = [&](std::span<double> b) { flat.insert(flat.end(), b.begin(), b.end()); };
        g_first.visit(take);
        g_second.visit(take);
        g_out.visit(take);
        return flat;
    }

private:
    struct Cache {
        layers::ElmanCache e1, e2;
        layers::DenseCache out;
    };

    Matrix eval(const Matrix& x, Cache* c) const {
        layers::ElmanCache local1, local2;
        layers::ElmanCache& c1 = c ? c->e1 : local1;
        layers::ElmanCache& c2 = c ? c->e2 : local2;

        const auto steps = layers::window_steps(x);
        const auto& h1 = layers::elman_forward(first_, steps, c1);
        layers::check_finite(h1.back(), "rnn.layer1");
        const auto& h2 = layers::elman_forward(second_, h1, c2);
        layers::check_finite(h2.back(), "rnn.layer2");
        Matrix y = layers::dense_forward(out_, h2.back(), c ? &c->out : nullptr);
        layers::check_finite(y, "rnn.output");
        return y;
    }

    layers::Elman first_, second_;
    layers::Dense out_;
    std::optional<Cache> cache_;
};

}  // namespace

std::unique_ptr<Model> make_rnn(const ModelSpec& spec, Rng& rng) {
    return std::make_unique<RnnModel>(spec, rng);
}

}  // namespace hb::models::detail
