#include <algorithm>
#include <optional>

#include "horizonbench/layers.hpp"
#include "horizonbench/model.hpp"

#include "arch.hpp"

namespace hb::models::detail {

namespace {

class LstmModel final : public Model {
public:
    LstmModel(const ModelSpec& spec, Rng& rng)
        : Model(spec),
          cell_(spec.hidden, 1, rng),
          out_(spec.output_dim, spec.hidden, Activation::Identity, rng) {}

protected:
    void visit_params(const ParamVisitor& f) override {
        cell_.visit(f);
        out_.visit(f);
    }

    Matrix do_forward(const Matrix& x) override {
        cache_.emplace();
        return eval(x, &*cache_);
    }

    Matrix do_predict(const Matrix& x) const override { return eval(x, nullptr); }

    std::vector<double> do_backward(const Matrix& d_y) override {
        Cache& c = *cache_;
        auto g_cell = layers::Lstm::zeros_like(cell_);
        auto g_out = layers::Dense::zeros_like(out_);

        const Matrix d_final = layers::dense_backward(out_, c.out, d_y, g_out);
        std::vector<Matrix> d_h(c.seq.h.size());
        d_h.back() = d_final;
        layers::lstm_backward(cell_, c.seq, d_h, spec().cell_state_sigmoid, g_cell);

        std::vector<double> flat;
        auto take = [&](std::span<double> b) { flat.insert(flat.end(), b.begin(), b.end()); };
        g_cell.visit(take);
        g_out.visit(take);
        return flat;
    }

private:
    struct Cache {
        layers::LstmCache seq;
        layers::DenseCache out;
    };

    Matrix eval(const Matrix& x, Cache* c) const {
        layers::LstmCache local;
        layers::LstmCache& seq = c ? c->seq : local;
        const auto steps = layers::window_steps(x);
        const auto& h = layers::lstm_forward(cell_, steps, spec().cell_state_sigmoid, seq);
        layers::check_finite(h.back(), "lstm.cell");
        Matrix y = layers::dense_forward(out_, h.back(), c ? &c->out : nullptr);
        layers::check_finite(y, "lstm.output");
        return y;
    }

    layers::Lstm cell_;
    layers::Dense out_;
    std::optional<Cache> cache_;
};

// Forward and backward passes over the same window; the output map reads the
// concatenated final states [h_fwd | h_bwd].
class BdLstmModel final : public Model {
public:
    BdLstmModel(const ModelSpec& spec, Rng& rng)
        : Model(spec),
          fwd_(spec.hidden, 1, rng),
          bwd_(spec.hidden, 1, rng),
          out_(spec.output_dim, 2 * spec.hidden, Activation::Identity, rng) {}

protected:
    void visit_params(const ParamVisitor& f) override {
        fwd_.visit(f);
        bwd_.visit(f);
        out_.visit(f);
    }

    Matrix do_forward(const Matrix& x) override {
        cache_.emplace();
        return eval(x, &*cache_);
    }

    Matrix do_predict(const Matrix& x) const override { return eval(x, nullptr); }

    std::vector<double> do_backward(const Matrix& d_y) override {
        Cache& c = *cache_;
        auto g_fwd = layers::Lstm::zeros_like(fwd_);
        auto g_bwd = layers::Lstm::zeros_like(bwd_);
        auto g_out = layers::Dense::zeros_like(out_);

        const Matrix d_concat = layers::dense_backward(out_, c.out, d_y, g_out);
        const std::size_t batch = d_concat.rows();
        const std::size_t hidden = static_cast<std::size_t>(spec().hidden);
        Matrix d_hf(batch, hidden), d_hb(batch, hidden);
        for (std::size_t r = 0; r < batch; ++r) {
            for (std::size_t k = 0; k < hidden; ++k) {
                d_hf(r, k) = d_concat(r, k);
                d_hb(r, k) = d_concat(r, hidden + k);
            }
        }
        const bool sig = spec().cell_state_sigmoid;
        std::vector<Matrix> d_h(c.fwd.h.size());
        d_h.back() = std::move(d_hf);
        layers::lstm_backward(fwd_, c.fwd, d_h, sig, g_fwd);
        std::vector<Matrix> d_h_rev(c.bwd.h.size());
        d_h_rev.back() = std::move(d_hb);
        layers::lstm_backward(bwd_, c.bwd, d_h_rev, sig, g_bwd);

        std::vector<double> flat;
        auto take = [&](std::span<double> b) { flat.insert(flat.end(), b.begin(), b.end()); };
        g_fwd.visit(take);
        g_bwd.visit(take);
        g_out.visit(take);
        return flat;
    }

private:
    struct Cache {
        layers::LstmCache fwd, bwd;
        layers::DenseCache out;
    };

    Matrix eval(const Matrix& x, Cache* c) const {
        layers::LstmCache local_f, local_b;
        layers::LstmCache& cf = c ? c->fwd : local_f;
        layers::LstmCache& cb = c ? c->bwd : local_b;

        auto steps = layers::window_steps(x);
        const bool sig = spec().cell_state_sigmoid;
        const auto& h_f = layers::lstm_forward(fwd_, steps, sig, cf);
        std::reverse(steps.begin(), steps.end());
        const auto& h_b = layers::lstm_forward(bwd_, steps, sig, cb);
        layers::check_finite(h_f.back(), "bd_lstm.forward");
        layers::check_finite(h_b.back(), "bd_lstm.backward");

        const std::size_t batch = x.rows();
        const std::size_t hidden = static_cast<std::size_t>(spec().hidden);
        Matrix concat(batch, 2 * hidden);
        for (std::size_t r = 0; r < batch; ++r) {
            for (std::size_t k = 0; k < hidden; ++k) {
                concat(r, k) = h_f.back()(r, k);
                concat(r, hidden + k) = h_b.back()(r, k);
            }
        }
        Matrix y = layers::dense_forward(out_, concat, c ? &c->out : nullptr);
        layers::check_finite(y, "bd_lstm.output");
        return y;
    }

    layers::Lstm fwd_, bwd_;
    layers::Dense out_;
    std::optional<Cache> cache_;
};

// Encoder LSTM compresses the window into its final hidden state; that state
// is repeated as the decoder input for each of the H output steps, and a
// shared per-step affine map emits one scalar per horizon.
class EdLstmModel final : public Model {
public:
    EdLstmModel(const ModelSpec& spec, Rng& rng)
        : Model(spec),
          encoder_(spec.hidden, 1, rng),
          decoder_(spec.hidden, spec.hidden, rng),
          head_(1, spec.hidden, Activation::Identity, rng) {}

protected:
    void visit_params(const ParamVisitor& f) override {
        encoder_.visit(f);
        decoder_.visit(f);
        head_.visit(f);
    }

    Matrix do_forward(const Matrix& x) override {
        cache_.emplace();
        return eval(x, &*cache_);
    }

    Matrix do_predict(const Matrix& x) const override { return eval(x, nullptr); }

    std::vector<double> do_backward(const Matrix& d_y) override {
        Cache& c = *cache_;
        auto g_enc = layers::Lstm::zeros_like(encoder_);
        auto g_dec = layers::Lstm::zeros_like(decoder_);
        auto g_head = layers::Dense::zeros_like(head_);

        const std::size_t batch = d_y.rows();
        const int horizon = spec().output_dim;
        std::vector<Matrix> d_h_dec(static_cast<std::size_t>(horizon));
        for (int t = 0; t < horizon; ++t) {
            Matrix d_col(batch, 1);
            for (std::size_t r = 0; r < batch; ++r) d_col(r, 0) = d_y(r, static_cast<std::size_t>(t));
            d_h_dec[static_cast<std::size_t>(t)] =
                layers::dense_backward(head_, c.head[static_cast<std::size_t>(t)], d_col, g_head);
        }

        const bool sig = spec().cell_state_sigmoid;
        // decoder input at every step is the encoder's final hidden state
        const auto d_latents = layers::lstm_backward(decoder_, c.dec, d_h_dec, sig, g_dec);
        Matrix d_latent(batch, static_cast<std::size_t>(spec().hidden));
        for (const Matrix& d : d_latents) {
            for (std::size_t k = 0; k < d_latent.size(); ++k) d_latent.flat()[k] += d.flat()[k];
        }

        std::vector<Matrix> d_h_enc(c.enc.h.size());
        d_h_enc.back() = std::move(d_latent);
        layers::lstm_backward(encoder_, c.enc, d_h_enc, sig, g_enc);

        std::vector<double> flat;
        auto take = [&](std::span<double> b) { flat.insert(flat.end(), b.begin(), b.end()); };
        g_enc.visit(take);
        g_dec.visit(take);
        g_head.visit(take);
        return flat;
    }

private:
    struct Cache {
        layers::LstmCache enc, dec;
        std::vector<layers::DenseCache> head;
    };

    Matrix eval(const Matrix& x, Cache* c) const {
        layers::LstmCache local_e, local_d;
        layers::LstmCache& ce = c ? c->enc : local_e;
        layers::LstmCache& cd = c ? c->dec : local_d;

        const bool sig = spec().cell_state_sigmoid;
        const auto steps = layers::window_steps(x);
        const auto& h_enc = layers::lstm_forward(encoder_, steps, sig, ce);
        layers::check_finite(h_enc.back(), "ed_lstm.encoder");

        const int horizon = spec().output_dim;
        const std::vector<Matrix> repeated(static_cast<std::size_t>(horizon), h_enc.back());
        const auto& h_dec = layers::lstm_forward(decoder_, repeated, sig, cd);
        layers::check_finite(h_dec.back(), "ed_lstm.decoder");

        if (c) c->head.assign(static_cast<std::size_t>(horizon), {});
        const std::size_t batch = x.rows();
        Matrix y(batch, static_cast<std::size_t>(horizon));
        for (int t = 0; t < horizon; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            Matrix col = layers::dense_forward(head_, h_dec[ts], c ? &c->head[ts] : nullptr);
            for (std::size_t r = 0; r < batch; ++r) y(r, ts) = col(r, 0);
        }
        layers::check_finite(y, "ed_lstm.output");
        return y;
    }

    layers::Lstm encoder_, decoder_;
    layers::Dense head_;
    std::optional<Cache> cache_;
};

}  // namespace

std::unique_ptr<Model> make_lstm(const ModelSpec& spec, Rng& rng) {
    return std::make_unique<LstmModel>(spec, rng);
}

std::unique_ptr<Model> make_bd_lstm(const ModelSpec& spec, Rng& rng) {
    return std::make_unique<BdLstmModel>(spec, rng);
}

std::unique_ptr<Model> make_ed_lstm(const ModelSpec& spec, Rng& rng) {
    return std::make_unique<EdLstmModel>(spec, rng);
}

}  // namespace hb::models::detail
