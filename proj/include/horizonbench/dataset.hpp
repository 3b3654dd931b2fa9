#pragma once

#include <span>
#include <utility>
#include <vector>

#include "horizonbench/matrix.hpp"
#include "horizonbench/series.hpp"

namespace hb::data {

struct ScaleParams {
    double min = 0.0;
    double max = 1.0;
};

// Maps the series onto [0,1]; throws on a constant series.
std::pair<series::TimeSeries, ScaleParams> fit_scale(const series::TimeSeries& s);
series::TimeSeries apply_scale(const series::TimeSeries& s, const ScaleParams& p);

double inverse_scale(double v, const ScaleParams& p);
std::vector<double> inverse_scale(std::span<const double> v, const ScaleParams& p);

// Sliding-window state-space reconstruction paired with the next H values as
// targets (direct multi-output form). Row i of inputs is
// s[i], s[i+T], ..., s[i+(D-1)T]; row i of targets is the H values that follow
// the last input element.
struct EmbeddedDataset {
    Matrix inputs;   // n_samples x D
    Matrix targets;  // n_samples x H
    int embed_dim = 0;
    int lag = 0;
    int horizon = 0;

    std::size_t samples() const { return inputs.rows(); }
};

EmbeddedDataset embed(const series::TimeSeries& s, int embed_dim, int lag, int horizon);

// Chronological split: first floor(train_frac * n) rows train, rest test.
std::pair<EmbeddedDataset, EmbeddedDataset> split(const EmbeddedDataset& d, double train_frac);

}  // namespace hb::data
