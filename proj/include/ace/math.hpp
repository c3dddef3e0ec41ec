#pragma once

#include <span>

namespace ace {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0,1].
double regularized_incomplete_beta(double x, double a, double b);

/// Inverse of I_x(a, b) in x, solved by bracketed bisection;
/// absolute error below 1e-12.
double beta_quantile(double p, double a, double b);

/// CDF of Student's t distribution with `dof` degrees of freedom.
double student_t_cdf(double x, double dof);

/// Standard normal CDF.
double normal_cdf(double x);

/// 1 / (1 + exp(-x)), overflow-safe.
double logistic(double x);

/// log(1 + exp(x)) without overflow.
double log1p_exp(double x);

/// log(sum(exp(v))) with max-shift stabilization; -inf for an empty or
/// all-(-inf) input.
double log_sum_exp(std::span<const double> values);

/// log Poisson pmf at count y with the given mean; mean 0 is a point mass
/// at y = 0.
double log_poisson_pmf(double y, double mean);

} // namespace ace
