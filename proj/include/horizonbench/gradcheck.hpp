#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hb {

using LossFn = std::function<double(std::span<const double>)>;

// Central finite differences (f(p + eps*e_i) - f(p - eps*e_i)) / (2*eps).
// Throws if the loss is non-finite at any perturbation, naming the coordinate.
std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> params,
                                     double eps = 1e-5);

// |a - b| / max(|a|, |b|, floor); the comparison used by the gradient checks.
double rel_error(double a, double b, double floor = 1e-4);

// Largest rel_error over two equally sized vectors.
double max_rel_error(std::span<const double> a, std::span<const double> b, double floor = 1e-4);

}  // namespace hb
