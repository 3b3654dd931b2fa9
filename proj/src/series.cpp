#include "horizonbench/series.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hb::series {

namespace {

constexpr double kDivergenceBound = 1e6;

[[noreturn]] void divergence_error(const std::string& system, long index) {
    throw std::runtime_error(system + ": state diverged at iterate " + std::to_string(index));
}

void check_finite_state(const std::string& system, long index, double magnitude) {
    if (!std::isfinite(magnitude) || magnitude > kDivergenceBound) {
        divergence_error(system, index);
    }
}

void require_samples(const char* op, long n) {
    if (n < 1) throw std::invalid_argument(std::string(op) + ": n must be >= 1");
}

using State3 = std::array<double, 3>;

template <typename Deriv>
State3 rk4_step(const State3& s, double dt, const Deriv& f) {
    const State3 k1 = f(s);
    State3 t;
    for (int i = 0; i < 3; ++i) t[i] = s[i] + 0.5 * dt * k1[i];
    const State3 k2 = f(t);
    for (int i = 0; i < 3; ++i) t[i] = s[i] + 0.5 * dt * k2[i];
    const State3 k3 = f(t);
    for (int i = 0; i < 3; ++i) t[i] = s[i] + dt * k3[i];
    const State3 k4 = f(t);
    State3 out;
    for (int i = 0; i < 3; ++i) {
        out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

// Samples the x component every sample_stride steps, dropping the first
// transient_discard samples; sample 0 is the initial state.
template <typename Deriv>
std::vector<double> integrate_sampled(const std::string& system, State3 state, double dt,
                                      long stride, long discard, long n, const Deriv& f) {
    if (!(dt > 0.0) || dt > 0.05) {
        throw std::invalid_argument(system + ": dt must be in (0, 0.05]");
    }
    if (stride < 1) throw std::invalid_argument(system + ": sample_stride must be >= 1");
    if (discard < 0) throw std::invalid_argument(system + ": transient_discard must be >= 0");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    long step = 0;
    for (long sample = 0; sample < discard + n; ++sample) {
        if (sample >= discard) out.push_back(state[0]);
        if (sample + 1 == discard + n) break;
        for (long k = 0; k < stride; ++k) {
            state = rk4_step(state, dt, f);
            ++step;
            check_finite_state(system, step,
                               std::max({std::abs(state[0]), std::abs(state[1]),
                                         std::abs(state[2])}));
        }
    }
    return out;
}

}  // namespace

TimeSeries gen_henon(const HenonParams& p, long n) {
    require_samples("gen_henon", n);
    if (p.transient_discard < 0) throw std::invalid_argument("gen_henon: negative discard");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    double x = p.x0, y = p.y0;
    const long total = p.transient_discard + n;
    for (long i = 0; i < total; ++i) {
        if (i >= p.transient_discard) out.push_back(x);
        if (i + 1 == total) break;
        const double xn = 1.0 - p.a * x * x + y;
        const double yn = p.b * x;
        x = xn;
        y = yn;
        check_finite_state("gen_henon", i + 1, std::abs(x));
    }
    std::ostringstream src;
    src << "generated(henon a=" << p.a << " b=" << p.b << ")";
    return {"henon", std::move(out), src.str()};
}

TimeSeries gen_lorenz(const LorenzParams& p, long n) {
    require_samples("gen_lorenz", n);
    auto f = [&p](const State3& s) -> State3 {
        return {p.sigma * (s[1] - s[0]), s[0] * (p.rho - s[2]) - s[1], s[0] * s[1] - p.beta * s[2]};
    };
    auto values = integrate_sampled("gen_lorenz", {p.x0, p.y0, p.z0}, p.dt, p.sample_stride,
                                    p.transient_discard, n, f);
    std::ostringstream src;
    src << "generated(lorenz sigma=" << p.sigma << " rho=" << p.rho << " beta=" << p.beta << ")";
    return {"lorenz", std::move(values), src.str()};
}

TimeSeries gen_rossler(const RosslerParams& p, long n) {
    require_samples("gen_rossler", n);
    auto f = [&p](const State3& s) -> State3 {
        return {-s[1] - s[2], s[0] + p.a * s[1], p.b + s[2] * (s[0] - p.c)};
    };
    auto values = integrate_sampled("gen_rossler", {p.x0, p.y0, p.z0}, p.dt, p.sample_stride,
                                    p.transient_discard, n, f);
    std::ostringstream src;
    src << "generated(rossler a=" << p.a << " b=" << p.b << " c=" << p.c << ")";
    return {"rossler", std::move(values), src.str()};
}

TimeSeries gen_mackey_glass(const MackeyGlassParams& p, long n) {
    require_samples("gen_mackey_glass", n);
    if (!(p.tau > 0.0)) throw std::invalid_argument("gen_mackey_glass: tau must be positive");
    if (!(p.dt > 0.0)) throw std::invalid_argument("gen_mackey_glass: dt must be positive");
    const double steps_per_delay = p.tau / p.dt;
    const long delay_steps = std::lround(steps_per_delay);
    if (delay_steps < 1 || std::abs(steps_per_delay - static_cast<double>(delay_steps)) > 1e-9) {
        throw std::invalid_argument("gen_mackey_glass: dt must divide tau exactly");
    }
    if (p.sample_stride < 1) throw std::invalid_argument("gen_mackey_glass: stride must be >= 1");
    if (p.transient_discard < 0) throw std::invalid_argument("gen_mackey_glass: negative discard");

    // Ring buffer of past states on the dt grid; delayed values at half steps
    // are linearly interpolated between neighbouring grid points.
    std::vector<double> ring(static_cast<std::size_t>(delay_steps) + 1, p.history);
    std::size_t head = 0;  // position of x(t - tau)
    auto delayed = [&](double frac) {
        const std::size_t next = (head + 1) % ring.size();
        return (1.0 - frac) * ring[head] + frac * ring[next];
    };
    auto rhs = [&p](double x, double x_tau) {
        return p.a * x_tau / (1.0 + std::pow(x_tau, p.c)) - p.b * x;
    };

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    double x = p.history;
    long step = 0;
    for (long sample = 0; sample < p.transient_discard + n; ++sample) {
        if (sample >= p.transient_discard) out.push_back(x);
        if (sample + 1 == p.transient_discard + n) break;
        for (long k = 0; k < p.sample_stride; ++k) {
            const double x_tau0 = delayed(0.0);
            const double x_tau_half = delayed(0.5);
            const std::size_t next = (head + 1) % ring.size();
            const double x_tau1 = ring[next];
            const double k1 = rhs(x, x_tau0);
            const double k2 = rhs(x + 0.5 * p.dt * k1, x_tau_half);
            const double k3 = rhs(x + 0.5 * p.dt * k2, x_tau_half);
            const double k4 = rhs(x + p.dt * k3, x_tau1);
            x += p.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            ++step;
            check_finite_state("gen_mackey_glass", step, std::abs(x));
            // overwrite the oldest slot with the new state
            ring[head] = x;
            head = next;
        }
    }
    std::ostringstream src;
    src << "generated(mackey_glass a=" << p.a << " b=" << p.b << " c=" << p.c << " tau=" << p.tau
        << ")";
    return {"mackey_glass", std::move(out), src.str()};
}

TimeSeries load_csv(const std::string& path, std::size_t column, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);
    std::vector<double> values;
    std::string line;
    long row = 0;
    bool skipped = false;
    while (std::getline(in, line)) {
        ++row;
        if (skip_header && !skipped) {
            skipped = true;
            continue;
        }
        // normalize delimiters to spaces, then take the column-th token
        for (char& ch : line) {
            if (ch == ',' || ch == '\t' || ch == ';') ch = ' ';
        }
        std::istringstream ss(line);
        std::string token;
        bool blank = true;
        std::size_t col = 0;
        bool found = false;
        while (ss >> token) {
            blank = false;
            if (col == column) {
                found = true;
                break;
            }
            ++col;
        }
        if (blank) continue;
        if (!found) {
            throw std::runtime_error("load_csv: " + path + " row " + std::to_string(row) +
                                     ": column " + std::to_string(column) + " missing");
        }
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0' || !std::isfinite(v)) {
            throw std::runtime_error("load_csv: " + path + " row " + std::to_string(row) +
                                     ": cannot parse '" + token + "'");
        }
        values.push_back(v);
    }
    if (values.empty()) throw std::runtime_error("load_csv: " + path + ": no data rows");
    std::string name = path;
    if (const auto slash = name.find_last_of('/'); slash != std::string::npos) {
        name = name.substr(slash + 1);
    }
    if (const auto dot = name.find_last_of('.'); dot != std::string::npos) {
        name = name.substr(0, dot);
    }
    return {name, std::move(values), "file(" + path + ", " + std::to_string(column) + ")"};
}

bool is_simulated(const std::string& name) {
    return name == "henon" || name == "lorenz" || name == "rossler" || name == "mackey_glass";
}

std::vector<std::string> simulated_names() {
    return {"mackey_glass", "lorenz", "henon", "rossler"};
}

TimeSeries generate_named(const std::string& name, long n) {
    if (name == "henon") return gen_henon({}, n);
    if (name == "lorenz") return gen_lorenz({}, n);
    if (name == "rossler") return gen_rossler({}, n);
    if (name == "mackey_glass") return gen_mackey_glass({}, n);
    throw std::invalid_argument("unknown simulated system: " + name);
}

}  // namespace hb::series
