#include "horizonbench/layers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hb::layers {

namespace {

void add_bias_rows(Matrix& m, const std::vector<double>& b) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double* row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) row[c] += b[c];
    }
}

void add_colsum(std::vector<double>& acc, const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) acc[c] += row[c];
    }
}

void add_into(Matrix& acc, const Matrix& m) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc.flat()[k] += m.flat()[k];
}

Matrix apply_map(const Matrix& m, double (*fn)(double)) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t k = 0; k < m.size(); ++k) out.flat()[k] = fn(m.flat()[k]);
    return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double tanh_fn(double x) { return std::tanh(x); }

}  // namespace

Matrix glorot_init(Rng& rng, std::size_t rows, std::size_t cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("glorot_init: empty shape");
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (std::size_t k = 0; k < m.size(); ++k) m.flat()[k] = rng.uniform(-limit, limit);
    return m;
}

void check_finite(const Matrix& m, const char* layer) {
    if (!m.all_finite()) {
        throw std::runtime_error(std::string("forward: non-finite activation in ") + layer);
    }
}

Dense::Dense(int out, int in, Activation a, Rng& rng)
    : w(glorot_init(rng, static_cast<std::size_t>(out), static_cast<std::size_t>(in))),
      b(static_cast<std::size_t>(out), 0.0),
      act(a) {}

Dense Dense::zeros_like(const Dense& d) {
    Dense z;
    z.w = Matrix(d.w.rows(), d.w.cols());
    z.b.assign(d.b.size(), 0.0);
    z.act = d.act;
    return z;
}

void Dense::visit(const ParamVisitor& f) {
    f(w.flat());
    f(b);
}

Matrix dense_forward(const Dense& d, const Matrix& x, DenseCache* cache) {
    Matrix z = matmul_nt(x, d.w);
    add_bias_rows(z, d.b);
    Matrix a(z.rows(), z.cols());
    for (std::size_t k = 0; k < z.size(); ++k) a.flat()[k] = activate(d.act, z.flat()[k]);
    if (cache) {
        cache->x = x;
        cache->z = std::move(z);
    }
    return a;
}

Matrix dense_backward(const Dense& d, const DenseCache& cache, const Matrix& d_out, Dense& grad) {
    Matrix dz(d_out.rows(), d_out.cols());
    for (std::size_t k = 0; k < dz.size(); ++k) {
        dz.flat()[k] = d_out.flat()[k] * activate_deriv(d.act, cache.z.flat()[k]);
    }
    add_into(grad.w, matmul_tn(dz, cache.x));
    add_colsum(grad.b, dz);
    return matmul(dz, d.w);
}

Elman::Elman(int hidden, int in, Rng& rng)
    : w(glorot_init(rng, static_cast<std::size_t>(hidden), static_cast<std::size_t>(in))),
      u(glorot_init(rng, static_cast<std::size_t>(hidden), static_cast<std::size_t>(hidden))),
      b(static_cast<std::size_t>(hidden), 0.0) {}

Elman Elman::zeros_like(const Elman& e) {
    Elman z;
    z.w = Matrix(e.w.rows(), e.w.cols());
    z.u = Matrix(e.u.rows(), e.u.cols());
    z.b.assign(e.b.size(), 0.0);
    return z;
}

void Elman::visit(const ParamVisitor& f) {
    f(w.flat());
    f(u.flat());
    f(b);
}

const std::vector<Matrix>& elman_forward(const Elman& e, const std::vector<Matrix>& xs,
                                         ElmanCache& cache) {
    cache.x = xs;
    cache.h.clear();
    cache.h.reserve(xs.size());
    const std::size_t batch = xs.empty() ? 0 : xs[0].rows();
    Matrix h_prev(batch, e.w.rows());
    for (const Matrix& x : xs) {
        Matrix a = matmul_nt(x, e.w);
        add_into(a, matmul_nt(h_prev, e.u));
        add_bias_rows(a, e.b);
        Matrix h = apply_map(a, tanh_fn);
        cache.h.push_back(h);
        h_prev = std::move(h);
    }
    return cache.h;
}

std::vector<Matrix> elman_backward(const Elman& e, const ElmanCache& cache,
                                   const std::vector<Matrix>& d_h, Elman& grad) {
    const std::size_t steps = cache.h.size();
    if (d_h.size() != steps) throw std::invalid_argument("elman_backward: step count mismatch");
    const std::size_t batch = steps == 0 ? 0 : cache.h[0].rows();
    const std::size_t hidden = e.w.rows();

    std::vector<Matrix> dx(steps);
    Matrix carry(batch, hidden);
    for (std::size_t t = steps; t-- > 0;) {
        Matrix dh = carry;
        if (!d_h[t].empty()) add_into(dh, d_h[t]);
        // tanh' from the activation value
        Matrix da(batch, hidden);
        for (std::size_t k = 0; k < da.size(); ++k) {
            const double h = cache.h[t].flat()[k];
            da.flat()[k] = dh.flat()[k] * (1.0 - h * h);
        }
        add_into(grad.w, matmul_tn(da, cache.x[t]));
        if (t > 0) add_into(grad.u, matmul_tn(da, cache.h[t - 1]));
        add_colsum(grad.b, da);
        carry = matmul(da, e.u);
        dx[t] = matmul(da, e.w);
    }
    return dx;
}

Lstm::Lstm(int hidden, int in, Rng& rng) {
    const auto h = static_cast<std::size_t>(hidden);
    const auto i = static_cast<std::size_t>(in);
    ui = glorot_init(rng, h, i);
    uf = glorot_init(rng, h, i);
    uo = glorot_init(rng, h, i);
    ug = glorot_init(rng, h, i);
    wi = glorot_init(rng, h, h);
    wf = glorot_init(rng, h, h);
    wo = glorot_init(rng, h, h);
    wg = glorot_init(rng, h, h);
    bi.assign(h, 0.0);
    bf.assign(h, 0.0);
    bo.assign(h, 0.0);
    bg.assign(h, 0.0);
}

Lstm Lstm::zeros_like(const Lstm& l) {
    Lstm z;
    z.ui = Matrix(l.ui.rows(), l.ui.cols());
    z.uf = Matrix(l.uf.rows(), l.uf.cols());
    z.uo = Matrix(l.uo.rows(), l.uo.cols());
    z.ug = Matrix(l.ug.rows(), l.ug.cols());
    z.wi = Matrix(l.wi.rows(), l.wi.cols());
    z.wf = Matrix(l.wf.rows(), l.wf.cols());
    z.wo = Matrix(l.wo.rows(), l.wo.cols());
    z.wg = Matrix(l.wg.rows(), l.wg.cols());
    z.bi.assign(l.bi.size(), 0.0);
    z.bf.assign(l.bf.size(), 0.0);
    z.bo.assign(l.bo.size(), 0.0);
    z.bg.assign(l.bg.size(), 0.0);
    return z;
}

void Lstm::visit(const ParamVisitor& f) {
    f(ui.flat());
    f(uf.flat());
    f(uo.flat());
    f(ug.flat());
    f(wi.flat());
    f(wf.flat());
    f(wo.flat());
    f(wg.flat());
    f(bi);
    f(bf);
    f(bo);
    f(bg);
}

const std::vector<Matrix>& lstm_forward(const Lstm& l, const std::vector<Matrix>& xs,
                                        bool cell_sigmoid, LstmCache& cache) {
    cache.x = xs;
    const std::size_t steps = xs.size();
    cache.i.assign(steps, {});
    cache.f.assign(steps, {});
    cache.o.assign(steps, {});
    cache.g.assign(steps, {});
    cache.c.assign(steps, {});
    cache.h.assign(steps, {});

    const std::size_t batch = steps == 0 ? 0 : xs[0].rows();
    const std::size_t hidden = l.hidden();
    Matrix h_prev(batch, hidden);
    Matrix c_prev(batch, hidden);

    auto gate = [&](const Matrix& x, const Matrix& u, const Matrix& w,
                    const std::vector<double>& b, double (*squash)(double)) {
        Matrix a = matmul_nt(x, u);
        add_into(a, matmul_nt(h_prev, w));
        add_bias_rows(a, b);
        return apply_map(a, squash);
    };

    for (std::size_t t = 0; t < steps; ++t) {
        const Matrix& x = xs[t];
        Matrix i = gate(x, l.ui, l.wi, l.bi, sigmoid);
        Matrix f = gate(x, l.uf, l.wf, l.bf, sigmoid);
        Matrix o = gate(x, l.uo, l.wo, l.bo, sigmoid);
        Matrix g = gate(x, l.ug, l.wg, l.bg, tanh_fn);

        Matrix c(batch, hidden);
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double raw = f.flat()[k] * c_prev.flat()[k] + i.flat()[k] * g.flat()[k];
            c.flat()[k] = cell_sigmoid ? sigmoid(raw) : raw;
        }
        Matrix h(batch, hidden);
        for (std::size_t k = 0; k < h.size(); ++k) {
            h.flat()[k] = std::tanh(c.flat()[k]) * o.flat()[k];
        }

        cache.i[t] = std::move(i);
        cache.f[t] = std::move(f);
        cache.o[t] = std::move(o);
        cache.g[t] = std::move(g);
        cache.c[t] = c;
        cache.h[t] = h;
        c_prev = std::move(c);
        h_prev = std::move(h);
    }
    return cache.h;
}

std::vector<Matrix> lstm_backward(const Lstm& l, const LstmCache& cache,
                                  const std::vector<Matrix>& d_h, bool cell_sigmoid, Lstm& grad) {
    const std::size_t steps = cache.h.size();
    if (d_h.size() != steps) throw std::invalid_argument("lstm_backward: step count mismatch");
    const std::size_t batch = steps == 0 ? 0 : cache.h[0].rows();
    const std::size_t hidden = l.hidden();

    std::vector<Matrix> dx(steps);
    Matrix dh_next(batch, hidden);
    Matrix dc_next(batch, hidden);

    for (std::size_t t = steps; t-- > 0;) {
        Matrix dh = dh_next;
        if (!d_h[t].empty()) add_into(dh, d_h[t]);

        const Matrix& i = cache.i[t];
        const Matrix& f = cache.f[t];
        const Matrix& o = cache.o[t];
        const Matrix& g = cache.g[t];
        const Matrix& c = cache.c[t];

        Matrix da_i(batch, hidden), da_f(batch, hidden), da_o(batch, hidden), da_g(batch, hidden);
        Matrix ds(batch, hidden);
        for (std::size_t k = 0; k < dh.size(); ++k) {
            const double cv = c.flat()[k];
            const double tc = std::tanh(cv);
            const double ov = o.flat()[k];
            const double c_prev = t > 0 ? cache.c[t - 1].flat()[k] : 0.0;

            double dc = dh.flat()[k] * ov * (1.0 - tc * tc) + dc_next.flat()[k];
            // through c = sigmoid(s) when the published update is selected
            const double ds_k = cell_sigmoid ? dc * cv * (1.0 - cv) : dc;

            const double iv = i.flat()[k];
            const double fv = f.flat()[k];
            const double gv = g.flat()[k];

            da_o.flat()[k] = dh.flat()[k] * tc * ov * (1.0 - ov);
            da_f.flat()[k] = ds_k * c_prev * fv * (1.0 - fv);
            da_i.flat()[k] = ds_k * gv * iv * (1.0 - iv);
            da_g.flat()[k] = ds_k * iv * (1.0 - gv * gv);
            ds.flat()[k] = ds_k * fv;  // becomes dc_{t-1}
        }

        const Matrix& x = cache.x[t];
        Matrix h_prev = t > 0 ? cache.h[t - 1] : Matrix(batch, hidden);

        add_into(grad.ui, matmul_tn(da_i, x));
        add_into(grad.uf, matmul_tn(da_f, x));
        add_into(grad.uo, matmul_tn(da_o, x));
        add_into(grad.ug, matmul_tn(da_g, x));
        add_into(grad.wi, matmul_tn(da_i, h_prev));
        add_into(grad.wf, matmul_tn(da_f, h_prev));
        add_into(grad.wo, matmul_tn(da_o, h_prev));
        add_into(grad.wg, matmul_tn(da_g, h_prev));
        add_colsum(grad.bi, da_i);
        add_colsum(grad.bf, da_f);
        add_colsum(grad.bo, da_o);
        add_colsum(grad.bg, da_g);

        Matrix dxt = matmul(da_i, l.ui);
        add_into(dxt, matmul(da_f, l.uf));
        add_into(dxt, matmul(da_o, l.uo));
        add_into(dxt, matmul(da_g, l.ug));
        dx[t] = std::move(dxt);

        Matrix dh_prev = matmul(da_i, l.wi);
        add_into(dh_prev, matmul(da_f, l.wf));
        add_into(dh_prev, matmul(da_o, l.wo));
        add_into(dh_prev, matmul(da_g, l.wg));
        dh_next = std::move(dh_prev);
        dc_next = std::move(ds);
    }
    return dx;
}

std::vector<Matrix> window_steps(const Matrix& inputs) {
    std::vector<Matrix> steps(inputs.cols());
    for (std::size_t t = 0; t < inputs.cols(); ++t) {
        Matrix col(inputs.rows(), 1);
        for (std::size_t r = 0; r < inputs.rows(); ++r) col(r, 0) = inputs(r, t);
        steps[t] = std::move(col);
    }
    return steps;
}

}  // namespace hb::layers
