#pragma once

namespace bagbound {

double normal_pdf(double x);
double normal_cdf(double x);
/// Inverse standard normal CDF, absolute error below 1e-9 on (0, 1).
/// Throws std::domain_error outside the open unit interval.
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double x, double df);
/// Inverse Student-t CDF with `df` degrees of freedom (df >= 1), absolute
/// error below 1e-6.
double t_quantile(double p, double df);

}  // namespace bagbound
