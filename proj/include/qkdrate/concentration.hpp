#pragma once

// Kato's martingale concentration inequality.
//
// For Bernoulli variables xi_1..xi_N adapted to a filtration F, with realized
// sum M = sum_i xi_i, and any b >= |a|:
//
//   P{ sum_i P(xi_i=1|F_{i-1}) >= M + [bN + a(2M-N)]/sqrt(N) }
//       <= exp(-(2b^2 - 2a^2) / (1 + 4a/(3 sqrt N))^2)
//
// and the mirrored statement (xi -> 1-xi, a -> -a) for the lower tail. Fixing
// the right-hand side to eps determines b from a; the coefficients below are
// the closed-form minimizers of bN + a(2C-N) for a pre-run estimate C of M.

namespace qkdrate {

struct KatoCoefficients {
  double a = 0.0;
  double b = 0.0;
};

// Inputs of a deviation term. `realized` is the observed count M, `estimate`
// the value fixed before the run, `trials` the number of rounds N.
struct DeviationInput {
  double realized = 0.0;
  double estimate = 0.0;
  double trials = 1.0;
  double eps = 0.5;
};

// Optimal (a, b) for upper-bounding a sum of conditional probabilities.
// Throws DomainError unless trials >= 1, 0 <= estimate <= trials, 0 < eps < 1.
KatoCoefficients kato_upper_coeffs(double trials, double estimate, double eps);

// Optimal (a, b) for lower-bounding a sum of conditional probabilities.
KatoCoefficients kato_lower_coeffs(double trials, double estimate, double eps);

// b as a function of a on the eps level set, upper-tail variant.
double kato_upper_b(double a, double trials, double eps);
// b as a function of a on the eps level set, lower-tail variant.
double kato_lower_b(double a, double trials, double eps);

// sum_i P(xi_i=1|F) <= M + deviation_upper(...) except with probability eps.
double deviation_upper(const DeviationInput& in);

// sum_i P(xi_i=1|F) >= M - deviation_lower(...) except with probability eps.
double deviation_lower(const DeviationInput& in);

}  // namespace qkdrate
