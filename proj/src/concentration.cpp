#include "qkdrate/concentration.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "qkdrate/errors.hpp"

namespace qkdrate {
namespace {

void check_domain(double trials, double estimate, double eps) {
  if (!(trials >= 1.0)) {
    throw DomainError("Kato coefficients: trial count must be >= 1, got " +
                      std::to_string(trials));
  }
  if (!(estimate >= 0.0 && estimate <= trials)) {
    throw DomainError("Kato coefficients: estimate must lie in [0, N], got " +
                      std::to_string(estimate));
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("Kato coefficients: eps must lie in (0, 1), got " +
                      std::to_string(eps));
  }
}

// Shared pieces of the two closed forms. `sign` is +1 for the upper-tail
// coefficient and -1 for the lower-tail one; only the first two numerator
// terms flip.
double optimal_a(double n, double c, double eps, double sign) {
  const double log_eps = std::log(eps);  // < 0
  const double sqrt_n = std::sqrt(n);
  const double spread = 9.0 * c * (n - c) - 2.0 * n * log_eps;  // > 0
  const double radicand = -log_eps * spread;
  assert(radicand >= 0.0);
  const double root = n * std::sqrt(radicand);

  const double numerator =
      sign * (216.0 * sqrt_n * c * (n - c) * log_eps -
              48.0 * n * sqrt_n * log_eps * log_eps) +
      27.0 * std::sqrt(2.0) * (n - 2.0 * c) * root;
  const double denominator = 4.0 * (9.0 * n - 8.0 * log_eps) * spread;
  return numerator / denominator;
}

double level_set_b(double a, double n, double eps, double sign) {
  const double tilt = 1.0 + sign * 4.0 * a / (3.0 * std::sqrt(n));
  return std::sqrt(a * a + 0.5 * tilt * tilt * std::log(1.0 / eps));
}

void check_input(const DeviationInput& in) {
  if (!(in.realized >= 0.0 && in.realized <= in.trials)) {
    throw DomainError("deviation term: realized count must lie in [0, N], got " +
                      std::to_string(in.realized));
  }
}

}  // namespace

double kato_upper_b(double a, double trials, double eps) {
  return level_set_b(a, trials, eps, +1.0);
}

double kato_lower_b(double a, double trials, double eps) {
  return level_set_b(a, trials, eps, -1.0);
}

KatoCoefficients kato_upper_coeffs(double trials, double estimate, double eps) {
  check_domain(trials, estimate, eps);
  const double a = optimal_a(trials, estimate, eps, +1.0);
  return {a, kato_upper_b(a, trials, eps)};
}

KatoCoefficients kato_lower_coeffs(double trials, double estimate, double eps) {
  check_domain(trials, estimate, eps);
  const double a = optimal_a(trials, estimate, eps, -1.0);
  return {a, kato_lower_b(a, trials, eps)};
}

double deviation_upper(const DeviationInput& in) {
  const auto k = kato_upper_coeffs(in.trials, in.estimate, in.eps);
  check_input(in);
  return (k.b * in.trials + k.a * (2.0 * in.realized - in.trials)) /
         std::sqrt(in.trials);
}

double deviation_lower(const DeviationInput& in) {
  const auto k = kato_lower_coeffs(in.trials, in.estimate, in.eps);
  check_input(in);
  return (k.b * in.trials + k.a * (2.0 * in.realized - in.trials)) /
         std::sqrt(in.trials);
}

}  // namespace qkdrate
