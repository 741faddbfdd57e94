#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qkdrate/concentration.hpp"
#include "qkdrate/errors.hpp"

namespace {

using namespace qkdrate;

// Independent oracle: the objective phi(a) = b(a) N + a (2C - N) with b(a)
// fixed by the eps level set, minimized numerically in long double.
struct Objective {
  long double n;
  long double c;
  long double log_inv_eps;
  int sign;  // +1 upper tail, -1 lower tail

  long double k() const { return 4.0L / (3.0L * std::sqrt(n)); }
  long double b(long double a) const {
    const long double s = 1.0L + sign * k() * a;
    return std::sqrt(a * a + 0.5L * s * s * log_inv_eps);
  }
  long double phi(long double a) const { return b(a) * n + a * (2.0L * c - n); }
  long double dphi(long double a) const {
    const long double s = 1.0L + sign * k() * a;
    const long double db = (a + 0.5L * s * sign * k() * log_inv_eps) / b(a);
    return n * db + 2.0L * c - n;
  }
};

long double golden_min(const Objective& f, long double lo, long double hi) {
  const long double r = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  long double f1 = f.phi(x1), f2 = f.phi(x2);
  for (int i = 0; i < 300; ++i) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f.phi(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f.phi(x2);
    }
  }
  return (lo + hi) / 2.0L;
}

// phi is convex, so the minimizer is the unique root of phi'.
long double derivative_root(const Objective& f, long double lo, long double hi) {
  for (int i = 0; i < 400; ++i) {
    const long double mid = (lo + hi) / 2.0L;
    if (f.dphi(mid) > 0.0L) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return (lo + hi) / 2.0L;
}

double rel(double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

void check_against_oracle(double n, double c, double eps, int sign) {
  const Objective f{n, c, std::log(1.0L / eps), sign};
  const long double span = 3.0L * std::sqrt(static_cast<long double>(n));
  const auto coeffs = sign > 0 ? kato_upper_coeffs(n, c, eps) : kato_lower_coeffs(n, c, eps);

  const long double a_golden = golden_min(f, -span, span);
  const long double a_root = derivative_root(f, -span, span);
  EXPECT_LT(rel(f.phi(coeffs.a), f.phi(a_golden)), 1e-9);
  EXPECT_LE(f.phi(coeffs.a), f.phi(a_golden) * (1.0L + 1e-12L));
  EXPECT_LT(rel(coeffs.a, a_root), 1e-9);
  EXPECT_LT(rel(coeffs.b, f.b(a_root)), 1e-9);
}

TEST(KatoCoefficients, UpperMatchesNumericMinimizer) {
  check_against_oracle(1e6, 1e3, 1e-10, +1);
  check_against_oracle(1e10, 3.7e5, 1e-20 / 144, +1);
  check_against_oracle(1e4, 9.9e3, 0.3, +1);
}

TEST(KatoCoefficients, LowerMatchesNumericMinimizer) {
  check_against_oracle(1e6, 1e3, 1e-10, -1);
  check_against_oracle(1e10, 3.7e5, 1e-20 / 144, -1);
  check_against_oracle(1e4, 12.0, 0.3, -1);
}

TEST(KatoCoefficients, FrozenClosedFormValues) {
  // High-precision evaluation of the closed forms at (1e6, 1e3, 1e-10).
  const auto up = kato_upper_coeffs(1e6, 1e3, 1e-10);
  EXPECT_NEAR(up.a, 53.415535600616208, 1e-9 * 53.4);
  EXPECT_NEAR(up.b, 53.539057561390133, 1e-9 * 53.5);
  const auto lo = kato_lower_coeffs(1e6, 1e3, 1e-10);
  EXPECT_NEAR(lo.a, 53.446236106829214, 1e-9 * 53.4);
}

TEST(KatoCoefficients, BeatsHoeffdingPoint) {
  const double n = 1e4, c = 5e3, eps = 0.01;
  const Objective f{n, c, std::log(1.0 / eps), +1};
  const auto k = kato_upper_coeffs(n, c, eps);
  EXPECT_LE(f.phi(k.a), n * std::sqrt(std::log(1.0 / eps) / 2.0) * (1 + 1e-12));
}

TEST(KatoCoefficients, BFollowsFromLevelSet) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double n = std::floor(std::pow(10.0, 1.0 + 9.0 * u(gen)));
    const double c = n * u(gen);
    const double eps = std::pow(10.0, -20.0 * u(gen) - 1e-3);
    const auto up = kato_upper_coeffs(n, c, eps);
    const double s = 1.0 + 4.0 * up.a / (3.0 * std::sqrt(n));
    EXPECT_DOUBLE_EQ(up.b, std::sqrt(up.a * up.a + 0.5 * s * s * std::log(1.0 / eps)));
    EXPECT_DOUBLE_EQ(up.b, kato_upper_b(up.a, n, eps));
    const auto lo = kato_lower_coeffs(n, c, eps);
    EXPECT_DOUBLE_EQ(lo.b, kato_lower_b(lo.a, n, eps));
    EXPECT_GE(lo.b, std::abs(lo.a));
    EXPECT_GE(up.b, std::abs(up.a));
  }
}

TEST(KatoCoefficients, LowerIsMirrorOfUpper) {
  for (double n : {1.0, 10.0, 1e3, 1e6, 1e10}) {
    for (double frac : {0.0, 1e-6, 0.01, 0.3, 0.5, 0.9, 1.0}) {
      for (double eps : {0.9, 1e-3, 1e-12, 1e-22}) {
        const double c = std::round(n * frac);
        const double a_lo = kato_lower_coeffs(n, c, eps).a;
        const double a_up = kato_upper_coeffs(n, n - c, eps).a;
        EXPECT_NEAR(a_lo, -a_up, 1e-9 * std::max(1.0, std::abs(a_up)))
            << n << " " << c << " " << eps;
      }
    }
  }
}

TEST(KatoCoefficients, ClosedFormNeverLosesToSampledPoint) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double n = std::floor(std::pow(10.0, 12.0 * u(gen))) + 1.0;
    const double c = n * u(gen);
    const double eps = std::pow(10.0, -25.0 * u(gen)) * 0.999;
    const int sign = (t % 2 == 0) ? +1 : -1;
    const Objective f{n, c, std::log(1.0L / eps), sign};
    const auto k = sign > 0 ? kato_upper_coeffs(n, c, eps) : kato_lower_coeffs(n, c, eps);
    const long double best = f.phi(k.a);
    const double span = 3.0 * std::sqrt(n);
    for (int s = 0; s < 100; ++s) {
      const double a = -span + 2.0 * span * u(gen);
      ASSERT_LE(best, f.phi(a) * (1.0L + 1e-9L)) << n << " " << c << " " << eps;
    }
  }
}

TEST(KatoCoefficients, RejectsInvalidDomain) {
  EXPECT_THROW(kato_upper_coeffs(0.5, 0.1, 0.1), DomainError);
  EXPECT_THROW(kato_upper_coeffs(10, -1, 0.1), DomainError);
  EXPECT_THROW(kato_upper_coeffs(10, 11, 0.1), DomainError);
  EXPECT_THROW(kato_upper_coeffs(10, 5, 0.0), DomainError);
  EXPECT_THROW(kato_lower_coeffs(10, 5, 1.0), DomainError);
  EXPECT_THROW(kato_lower_coeffs(10, 5, std::nan("")), DomainError);
  EXPECT_THROW(deviation_upper({11, 5, 10, 0.1}), DomainError);
  EXPECT_THROW(deviation_lower({-1, 5, 10, 0.1}), DomainError);
}

TEST(Deviation, FrozenValuesAtSmallN) {
  // Both equal 0.91853685204229575 by an independent 40-digit evaluation.
  EXPECT_NEAR(deviation_upper({0, 0, 100, 0.5}), 0.91853685204229575, 1e-13);
  EXPECT_NEAR(deviation_lower({100, 100, 100, 0.5}), 0.91853685204229575, 1e-13);
}

TEST(Deviation, RecomposesFromCoefficients) {
  const double n = 1e8, m = 12345.0, est = 13000.0, eps = 1e-9;
  const auto up = kato_upper_coeffs(n, est, eps);
  EXPECT_DOUBLE_EQ(deviation_upper({m, est, n, eps}),
                   (up.b * n + up.a * (2 * m - n)) / std::sqrt(n));
  const auto lo = kato_lower_coeffs(n, est, eps);
  EXPECT_DOUBLE_EQ(deviation_lower({m, est, n, eps}),
                   (lo.b * n + lo.a * (2 * m - n)) / std::sqrt(n));
}

TEST(Deviation, BoundedByHoeffdingAndNonNegative) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double n = std::floor(std::pow(10.0, 12.0 * u(gen))) + 1.0;
    const double m = std::floor(n * u(gen));
    const double eps = std::pow(10.0, -25.0 * u(gen)) * 0.999;
    const double hoeffding = std::sqrt(n * std::log(1.0 / eps) / 2.0);
    const double du = deviation_upper({m, m, n, eps});
    const double dl = deviation_lower({m, m, n, eps});
    EXPECT_GE(du, 0.0);
    EXPECT_GE(dl, 0.0);
    EXPECT_LE(du, hoeffding * (1 + 1e-9));
    EXPECT_LE(dl, hoeffding * (1 + 1e-9));
  }
}

TEST(Deviation, VanishesMonotonicallyAsEpsApproachesOne) {
  const double n = 1e5, m = 3e3;
  double previous = deviation_upper({m, m, n, 0.5});
  for (double gap : {1e-1, 1e-2, 1e-4, 1e-6, 1e-9, 1e-12}) {
    const double d = deviation_upper({m, m, n, 1.0 - gap});
    EXPECT_LT(d, previous);
    previous = d;
  }
  EXPECT_LT(previous, 1e-4);
}

// For i.i.d. Bernoulli(p) rounds the sum of conditional probabilities is Np.
struct Coverage {
  int upper = 0;
  int lower = 0;
};

Coverage coverage(double n, double p, double eps, int trials, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::binomial_distribution<long long> draw(static_cast<long long>(n), p);
  Coverage c;
  const double mean = n * p;
  for (int t = 0; t < trials; ++t) {
    const double m = static_cast<double>(draw(gen));
    if (mean >= m + deviation_upper({m, mean, n, eps})) ++c.upper;
    if (mean <= m - deviation_lower({m, mean, n, eps})) ++c.lower;
  }
  return c;
}

TEST(Deviation, EmpiricalCoverage) {
  const int trials = 600;
  for (double eps : {0.05, 0.2}) {
    const auto c = coverage(1e3, 0.1, eps, trials, 11);
    const double allowed = eps + 3.0 * std::sqrt(eps * (1 - eps) / trials);
    EXPECT_LE(c.upper / double(trials), allowed);
    EXPECT_LE(c.lower / double(trials), allowed);
  }
}

}  // namespace
