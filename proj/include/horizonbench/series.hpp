#pragma once

#include <string>
#include <vector>

namespace hb::series {

struct TimeSeries {
    std::string name;
    std::vector<double> values;
    std::string source;  // "generated(...)" or "file(path, column)"
};

// Canonical chaotic regimes; every field can be overridden before generating.
struct HenonParams {
    double a = 1.4, b = 0.3;
    double x0 = 0.0, y0 = 0.0;
    long transient_discard = 100;
};

struct LorenzParams {
    double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
    double x0 = 1.0, y0 = 1.0, z0 = 1.0;
    double dt = 0.01;
    long sample_stride = 2;
    long transient_discard = 1000;
};

struct RosslerParams {
    double a = 0.2, b = 0.2, c = 5.7;
    double x0 = 0.0, y0 = 1.0, z0 = 0.0;
    double dt = 0.01;
    long sample_stride = 10;
    long transient_discard = 1000;
};

struct MackeyGlassParams {
    double a = 0.2, b = 0.1, c = 10.0;
    double tau = 17.0;
    double dt = 0.1;  // must divide tau exactly
    double history = 1.2;
    long sample_stride = 10;
    long transient_discard = 1000;
};

// Sample k of the returned series is the state at iterate/time index
// (transient_discard + k) * sample_stride (stride 1 and the map itself for Henon),
// so with no discard the initial state is the first sample.
TimeSeries gen_henon(const HenonParams& params, long n);
TimeSeries gen_lorenz(const LorenzParams& params, long n);
TimeSeries gen_rossler(const RosslerParams& params, long n);
TimeSeries gen_mackey_glass(const MackeyGlassParams& params, long n);

// One value per selected column per line; comma- or whitespace-delimited.
TimeSeries load_csv(const std::string& path, std::size_t column = 0, bool skip_header = false);

// Name-based dispatch over the four simulated systems with canonical parameters.
bool is_simulated(const std::string& name);
TimeSeries generate_named(const std::string& name, long n);
std::vector<std::string> simulated_names();

}  // namespace hb::series
