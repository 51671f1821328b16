#pragma once

namespace bntune {

/// ln Γ(x) for x > 0 (Lanczos, g = 7, relative error below 1e-13).
double log_gamma(double x);

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a), a > 0, x >= 0.
double gamma_q(double a, double x);

/// Upper tail P(X >= statistic) of a chi-square variable with `dof` degrees
/// of freedom. dof == 0 yields 1.
double chi_square_sf(double statistic, double dof);

}  // namespace bntune
