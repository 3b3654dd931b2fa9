#pragma once

#include <span>
#include <vector>

namespace hb::bench {

// Quantile of Student's t distribution with dof degrees of freedom,
// via the regularized incomplete beta function.
double student_t_ppf(double p, int dof);

double regularized_incomplete_beta(double a, double b, double x);

struct Aggregate {
    double mean = 0.0;
    double ci_half = 0.0;  // t(0.975, n-1) * s / sqrt(n)
};

// Mean and 95% t-interval half-width over independent runs; throws for n < 2.
Aggregate aggregate(std::span<const double> values);

double mean_of(std::span<const double> values);
double sample_std(std::span<const double> values);

// Spearman rank correlation, average ranks on ties.
double spearman_rho(std::span<const double> a, std::span<const double> b);

// Ascending tied-min ranks: equal scores share the smallest rank and the
// following ranks are skipped (1, 1, 3, ...). Equality is bitwise.
std::vector<int> rank_with_ties(std::span<const double> scores);

}  // namespace hb::bench
