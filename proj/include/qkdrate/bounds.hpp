#pragma once

#include "qkdrate/channel.hpp"
#include "qkdrate/protocol.hpp"

namespace qkdrate {

// Values of the observed quantities fixed before the run. They only center
// the concentration coefficients: a poor estimate loosens the bounds but
// never invalidates them.
struct EstimateSet {
  double est_ph1 = 0.0;  // single-photon phase errors
  double est_z1 = 0.0;   // single-photon Z detections
  double est_x_error_D = 0.0;
  double est_x_error_V = 0.0;
  double est_cross_D = 0.0;
  double est_cross_V = 0.0;
  double est_z_S = 0.0;
  double est_z_D = 0.0;
  double est_z_V = 0.0;
};

struct LemmaConstants {
  double c1 = 0.0;  // weight of the X-basis single-photon error rate
  double c2 = 0.0;  // weight of the single-photon cross-click rate
};

// Coefficients of the decoy relation
//   P(single-photon Z detection) >= sum_w t_w P(Z detection with label w).
struct DecoyCoefficients {
  double t_S = 0.0;  // <= 0
  double t_D = 0.0;  // >= 0
  double t_V = 0.0;  // <= 0
};

struct BoundOptions {
  // Drop every finite-size term: deviations, the Kato prefactors and the
  // (b-a)sqrt(N) offsets. This is the N -> infinity limit per pulse.
  bool asymptotic = false;
  // When false the cross-click (c2) contribution is removed, which yields
  // the phase-error count of the active basis-choice protocol.
  bool include_cross_term = true;
};

struct BoundsResult {
  double n_ph1_upper = 0.0;
  double n_z1_lower = 0.0;
  bool phase_saturated = false;  // Kato coefficient forced the trivial bound N
  bool z_floored = false;        // Kato coefficient forced the trivial bound 0
};

// Throws DomainError if p_X = 0, q = 0 (division by zero) or q >= 0.5.
LemmaConstants lemma_constants(const ProtocolParams& params);

// Throws DomainError if mu_S == mu_D or any intensity probability is zero.
DecoyCoefficients decoy_coefficients(const ProtocolParams& params);

// Expectation-valued estimates under the channel model. The two single-photon
// quantities are evaluated exactly for a one-photon emission: the photon is
// lost, routed to the Z line or routed to the X line, with dark counts on all
// four detectors and a phase error of delta_mis for a photon-triggered single
// click and 1/2 otherwise.
EstimateSet default_estimates(const ProtocolParams& params, const ChannelParams& channel);

// Upper bound on the number of single-photon phase errors in the sifted key;
// holds except with probability 5 eps. Result is clamped to [0, N].
double phase_error_upper(const ObservedCounts& counts, const EstimateSet& est,
                         const ProtocolParams& params, double eps,
                         const BoundOptions& opts = {});

// Lower bound on the number of single-photon Z detections; holds except with
// probability 4 eps. Result is clamped to [0, N].
double single_photon_z_lower(const ObservedCounts& counts, const EstimateSet& est,
                             const ProtocolParams& params, double eps,
                             const BoundOptions& opts = {});

// Both bounds plus which trivial branch fired.
BoundsResult evaluate_bounds(const ObservedCounts& counts, const EstimateSet& est,
                             const ProtocolParams& params, double eps,
                             const BoundOptions& opts = {});

}  // namespace qkdrate
