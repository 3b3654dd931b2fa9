#include <optional>

#include "horizonbench/layers.hpp"
#include "horizonbench/model.hpp"

#include "arch.hpp"

namespace hb::models::detail {

namespace {

class FnnModel final : public Model {
public:
    FnnModel(const ModelSpec& spec, Rng& rng)
        : Model(spec),
          hidden_(spec.hidden, spec.input_dim, spec.fnn_hidden_activation, rng),
          out_(spec.output_dim, spec.hidden, Activation::Identity, rng) {}

protected:
    void visit_params(const ParamVisitor& f) override {
        hidden_.visit(f);
        out_.visit(f);
    }

    Matrix do_forward(const Matrix& x) override {
        cache_.emplace();
        return eval(x, &*cache_);
    }

    Matrix do_predict(const Matrix& x) const override { return eval(x, nullptr); }

    std::vector<double> do_backward(const Matrix& d_y) override {
        Cache& c = *cache_;
        auto g_hidden = layers::Dense::zeros_like(hidden_);
        auto g_out = layers::Dense::zeros_like(out_);
        const Matrix d_act = layers::dense_backward(out_, c.out, d_y, g_out);
        layers::dense_backward(hidden_, c.hidden, d_act, g_hidden);

        std::vector<double> flat;
        auto take = [&](std::span<double> b) { flat.insert(flat.end(), b.begin(), b.end()); };
        g_hidden.visit(take);
        g_out.visit(take);
        return flat;
    }

private:
    struct Cache {
        layers::DenseCache hidden, out;
    };

    Matrix eval(const Matrix& x, Cache* c) const {
        Matrix a = layers::dense_forward(hidden_, x, c ? &c->hidden : nullptr);
        layers::check_finite(a, "fnn.hidden");
        Matrix y = layers::dense_forward(out_, a, c ? &c->out : nullptr);
        layers::check_finite(y, "fnn.output");
        return y;
    }

    layers::Dense hidden_, out_;
    std::optional<Cache> cache_;
};

}  // namespace

std::unique_ptr<Model> make_fnn(const ModelSpec& spec, Rng& rng) {
    return std::make_unique<FnnModel>(spec, rng);
}

}  // namespace hb::models::detail
