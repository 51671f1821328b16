#include "bntune/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "bntune/error.hpp"

namespace bntune {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 100000;

double lower_series(double a, double x) {
  // P(a, x) by its power series; converges quickly for x < a + 1.
  double term = 1.0 / a;
  double sum = term;
  for (int i = 1; i < kMaxIterations; ++i) {
    term *= x / (a + i);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

double upper_fraction(double a, double x) {
  // Q(a, x) by modified Lentz continued fraction; valid for x >= a + 1.
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw ArgumentError("log_gamma requires x > 0");
  if (x < 0.5) {
    // Reflection keeps the Lanczos sum in its accurate range.
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw ArgumentError("gamma_q requires a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return std::max(0.0, 1.0 - lower_series(a, x));
  return std::min(1.0, upper_fraction(a, x));
}

double chi_square_sf(double statistic, double dof) {
  if (dof <= 0.0) return 1.0;
  if (!(statistic > 0.0)) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

}  // namespace bntune
