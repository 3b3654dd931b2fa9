#include "horizonbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hb::data {

std::pair<series::TimeSeries, ScaleParams> fit_scale(const series::TimeSeries& s) {
    if (s.values.empty()) throw std::invalid_argument("fit_scale: empty series");
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    if (!(*hi > *lo)) {
        throw std::invalid_argument("fit_scale: constant series '" + s.name +
                                    "' cannot be scaled");
    }
    const ScaleParams p{*lo, *hi};
    return {apply_scale(s, p), p};
}

series::TimeSeries apply_scale(const series::TimeSeries& s, const ScaleParams& p) {
    if (!(p.max > p.min)) throw std::invalid_argument("apply_scale: degenerate scale");
    series::TimeSeries out = s;
    const double span = p.max - p.min;
    for (double& v : out.values) v = (v - p.min) / span;
    return out;
}

double inverse_scale(double v, const ScaleParams& p) {
    return v * (p.max - p.min) + p.min;
}

std::vector<double> inverse_scale(std::span<const double> v, const ScaleParams& p) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = inverse_scale(v[i], p);
    return out;
}

EmbeddedDataset embed(const series::TimeSeries& s, int embed_dim, int lag, int horizon) {
    if (embed_dim < 1 || lag < 1 || horizon < 1) {
        throw std::invalid_argument("embed: D, T and H must all be >= 1");
    }
    const long n_series = static_cast<long>(s.values.size());
    const long window_span = static_cast<long>(embed_dim - 1) * lag;
    const long n_samples = n_series - window_span - horizon;
    if (n_samples < 1) {
        throw std::invalid_argument("embed: series of length " + std::to_string(n_series) +
                                    " too short; need at least " +
                                    std::to_string(window_span + horizon + 1) + " points");
    }

    EmbeddedDataset d;
    d.embed_dim = embed_dim;
    d.lag = lag;
    d.horizon = horizon;
    d.inputs = Matrix(static_cast<std::size_t>(n_samples), static_cast<std::size_t>(embed_dim));
    d.targets = Matrix(static_cast<std::size_t>(n_samples), static_cast<std::size_t>(horizon));
    for (long i = 0; i < n_samples; ++i) {
        for (int j = 0; j < embed_dim; ++j) {
            d.inputs(i, j) = s.values[static_cast<std::size_t>(i + static_cast<long>(j) * lag)];
        }
        const long last = i + window_span;
        for (int h = 0; h < horizon; ++h) {
            d.targets(i, h) = s.values[static_cast<std::size_t>(last + 1 + h)];
        }
    }
    return d;
}

std::pair<EmbeddedDataset, EmbeddedDataset> split(const EmbeddedDataset& d, double train_frac) {
    if (!(train_frac > 0.0) || !(train_frac < 1.0)) {
        throw std::invalid_argument("split: train_frac must be in (0, 1)");
    }
    const std::size_t n = d.samples();
    const std::size_t n_train = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n)));
    if (n_train == 0 || n_train == n) {
        throw std::invalid_argument("split: fraction " + std::to_string(train_frac) +
                                    " leaves an empty side for " + std::to_string(n) + " samples");
    }

    auto take = [&](std::size_t begin, std::size_t count) {
        EmbeddedDataset part;
        part.embed_dim = d.embed_dim;
        part.lag = d.lag;
        part.horizon = d.horizon;
        part.inputs = Matrix(count, d.inputs.cols());
        part.targets = Matrix(count, d.targets.cols());
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t j = 0; j < d.inputs.cols(); ++j) {
                part.inputs(i, j) = d.inputs(begin + i, j);
            }
            for (std::size_t j = 0; j < d.targets.cols(); ++j) {
                part.targets(i, j) = d.targets(begin + i, j);
            }
        }
        return part;
    };
    return {take(0, n_train), take(n_train, n - n_train)};
}

}  // namespace hb::data
