#include "qkdrate/keyrate.hpp"

#include <algorithm>
#include <cmath>

#include "qkdrate/errors.hpp"

namespace qkdrate {

std::string to_string(Mode m) { return m == Mode::finite ? "finite" : "asymptotic"; }

std::string to_string(Baseline b) {
  return b == Baseline::passive ? "passive" : "active-approx";
}

Mode parse_mode(const std::string& s) {
  if (s == "finite") return Mode::finite;
  if (s == "asymptotic") return Mode::asymptotic;
  throw DomainError("unknown mode '" + s + "' (expected finite|asymptotic)");
}

Baseline parse_baseline(const std::string& s) {
  if (s == "passive") return Baseline::passive;
  if (s == "active-approx") return Baseline::active_approx;
  throw DomainError("unknown baseline '" + s + "' (expected passive|active-approx)");
}

SecurityParams secrecy_epsilons(double eps, double eps_c, double xi) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  if (!(eps_c > 0.0 && eps_c < 1.0)) throw DomainError("eps_c must lie in (0,1)");
  if (!(xi > 0.0)) throw DomainError("xi must be positive");
  SecurityParams s;
  s.eps = eps;
  s.eps_c = eps_c;
  s.xi = xi;
  s.eps_ph = 9.0 * eps;
  s.eps_s = std::sqrt(2.0) * std::sqrt(s.eps_ph + std::exp2(-xi));
  s.eps_sec = s.eps_c + s.eps_s;
  return s;
}

SecurityParams default_security() { return secrecy_epsilons(1e-20 / 144.0, 1e-10 / 2.0, 71.0); }

double binary_entropy(double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("binary entropy: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x >= 0.5) return 1.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double error_correction_cost(double n_sift, double e_bit, double f) {
  return f * n_sift * binary_entropy(e_bit);
}

double key_length(double n_z1_lower, double n_ph1_upper, double xi, double n_ec) {
  if (n_z1_lower <= 0.0) return -xi - n_ec;
  return n_z1_lower * (1.0 - binary_entropy(n_ph1_upper / n_z1_lower)) - xi - n_ec;
}

KeyRateResult key_rate_from_counts(const ObservedCounts& counts, const EstimateSet& est,
                                   const ProtocolParams& params, const SecurityParams& sec,
                                   Mode mode, Baseline baseline) {
  BoundOptions opts;
  opts.asymptotic = mode == Mode::asymptotic;
  opts.include_cross_term = baseline == Baseline::passive;

  KeyRateResult r;
  r.mode = mode;
  r.baseline = baseline;
  r.bounds = evaluate_bounds(counts, est, params, sec.eps, opts);
  r.n_z1_lower = r.bounds.n_z1_lower;
  r.n_ph1_upper = r.bounds.n_ph1_upper;
  r.phase_error_ratio = r.n_z1_lower > 0.0 ? r.n_ph1_upper / r.n_z1_lower : 0.0;
  r.e_bit = counts.e_bit;
  r.n_sift = counts.n_sift;
  r.n_ec = error_correction_cost(counts.n_sift, std::min(counts.e_bit, 1.0),
                                 params.ec_inefficiency);
  const double xi = opts.asymptotic ? 0.0 : sec.xi;
  r.key_length = key_length(r.n_z1_lower, r.n_ph1_upper, xi, r.n_ec);
  r.rate = std::max(r.key_length, 0.0) / static_cast<double>(params.pulses);
  return r;
}

KeyRateResult key_rate(const ProtocolParams& params, const ChannelParams& channel,
                       const SecurityParams& sec, Mode mode, Baseline baseline) {
  require_valid(params);
  require_valid(channel);
  const auto counts = expected_counts(params, channel);
  const auto est = default_estimates(params, channel);
  return key_rate_from_counts(counts, est, params, sec, mode, baseline);
}

}  // namespace qkdrate
