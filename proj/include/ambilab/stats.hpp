#pragma once

namespace ambilab::stats {

/// Standard normal CDF.
double normal_cdf(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double reg_gamma_lower(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double reg_beta(double a, double b, double x);

/// Chi-square CDF with k degrees of freedom.
double chi_squared_cdf(double x, double k);

/// Two-sided p-value of a chi-square statistic (survival function).
double chi_squared_sf(double x, double k);

/// Student-t CDF with df degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided p-value for a t statistic.
double t_test_p_value(double t, double df);

} // namespace ambilab::stats
