#pragma once

#include <string>

#include "qkdrate/bounds.hpp"
#include "qkdrate/channel.hpp"
#include "qkdrate/protocol.hpp"

namespace qkdrate {

enum class Mode { finite, asymptotic };
enum class Baseline { passive, active_approx };

std::string to_string(Mode m);
std::string to_string(Baseline b);
// Throw DomainError on unknown names.
Mode parse_mode(const std::string& s);
Baseline parse_baseline(const std::string& s);

// Failure budget. eps is the failure probability of a single concentration
// step; the phase-error estimate spends nine of them. Build it with
// secrecy_epsilons() so the derived fields are consistent.
struct SecurityParams {
  double eps = 0.0;
  double eps_c = 0.0;
  double xi = 0.0;  // bits
  double eps_ph = 0.0;
  double eps_s = 0.0;
  double eps_sec = 0.0;
};

// Fills eps_ph = 9 eps, eps_s = sqrt(2) sqrt(eps_ph + 2^-xi), eps_sec = eps_c + eps_s.
// Throws DomainError unless eps, eps_c lie in (0,1) and xi > 0.
SecurityParams secrecy_epsilons(double eps, double eps_c, double xi);

// eps = 1e-20/144, eps_c = 1e-10/2, xi = 71: eps_sec just under 1e-10.
SecurityParams default_security();

struct KeyRateResult {
  double n_z1_lower = 0.0;
  double n_ph1_upper = 0.0;
  double phase_error_ratio = 0.0;
  double n_ec = 0.0;
  double key_length = 0.0;  // may be negative
  double rate = 0.0;        // max(key_length, 0) / N
  double e_bit = 0.0;
  double n_sift = 0.0;
  Mode mode = Mode::finite;
  Baseline baseline = Baseline::passive;
  BoundsResult bounds;
};

// -x log2 x - (1-x) log2(1-x) on [0, 1/2], saturating at 1 above 1/2.
// Throws DomainError for x < 0.
double binary_entropy(double x);

double error_correction_cost(double n_sift, double e_bit, double f);

// n_z1_lower (1 - h(n_ph1_upper / n_z1_lower)) - xi - n_ec.
double key_length(double n_z1_lower, double n_ph1_upper, double xi, double n_ec);

// Full pipeline on expectation-valued counts: channel model -> estimates ->
// bounds -> key length. Asymptotic mode drops every finite-size term and xi.
KeyRateResult key_rate(const ProtocolParams& params, const ChannelParams& channel,
                       const SecurityParams& sec, Mode mode, Baseline baseline);

// Same assembly on caller-supplied counts and estimates.
KeyRateResult key_rate_from_counts(const ObservedCounts& counts, const EstimateSet& est,
                                   const ProtocolParams& params, const SecurityParams& sec,
                                   Mode mode, Baseline baseline);

}  // namespace qkdrate
