#include "qkdrate/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "qkdrate/concentration.hpp"
#include "qkdrate/errors.hpp"

namespace qkdrate {
namespace {

struct Branch {
  double value = 0.0;
  bool trivial = false;
};

double clamp_count(double x, double n) { return std::clamp(x, 0.0, n); }

// Deviation terms collapse to zero in the asymptotic limit.
struct Deviations {
  double n;
  double eps;
  bool asymptotic;

  double upper(double realized, double estimate) const {
    if (asymptotic) return 0.0;
    return deviation_upper({realized, clamp_count(estimate, n), n, eps});
  }
  double lower(double realized, double estimate) const {
    if (asymptotic) return 0.0;
    return deviation_lower({realized, clamp_count(estimate, n), n, eps});
  }
};

Branch phase_error_branch(const ObservedCounts& counts, const EstimateSet& est,
                          const ProtocolParams& params, double eps,
                          const BoundOptions& opts) {
  const double n = static_cast<double>(params.pulses);
  const double sqrt_n = std::sqrt(n);
  const Deviations dev{n, eps, opts.asymptotic};

  KatoCoefficients kato{};
  if (!opts.asymptotic) {
    kato = kato_lower_coeffs(n, clamp_count(est.est_ph1, n), eps);
    if (kato.a >= sqrt_n / 2.0) return {n, true};
  }

  const auto [c1, c2] = lemma_constants(params);
  const double p1 = single_photon_prob(params);
  const double boost = std::exp(params.mu_decoy);
  const auto D = Intensity::decoy;
  const auto V = Intensity::vacuum;

  const double x_error_term =
      boost * (counts.n_x_error[D] + dev.upper(counts.n_x_error[D], est.est_x_error_D)) /
          params.p_decoy -
      (counts.n_x_error[V] - dev.lower(counts.n_x_error[V], est.est_x_error_V)) /
          params.p_vacuum;

  double cross_term = 0.0;
  if (opts.include_cross_term) {
    cross_term =
        boost * (counts.n_cross[D] + dev.upper(counts.n_cross[D], est.est_cross_D)) /
            params.p_decoy -
        (counts.n_cross[V] - dev.lower(counts.n_cross[V], est.est_cross_V)) /
            params.p_vacuum;
  }

  const double lemma_sum =
      p1 / params.mu_decoy * (c1 * x_error_term + c2 * cross_term);
  if (opts.asymptotic) return {clamp_count(lemma_sum, n), false};

  const double raw =
      (lemma_sum + (kato.b - kato.a) * sqrt_n) / (1.0 - 2.0 * kato.a / sqrt_n);
  return {clamp_count(raw, n), false};
}

Branch z_lower_branch(const ObservedCounts& counts, const EstimateSet& est,
                      const ProtocolParams& params, double eps,
                      const BoundOptions& opts) {
  const double n = static_cast<double>(params.pulses);
  const double sqrt_n = std::sqrt(n);
  const Deviations dev{n, eps, opts.asymptotic};

  KatoCoefficients kato{};
  if (!opts.asymptotic) {
    kato = kato_upper_coeffs(n, clamp_count(est.est_z1, n), eps);
    if (kato.a <= -sqrt_n / 2.0) return {0.0, true};
  }

  const auto t = decoy_coefficients(params);
  const auto S = Intensity::signal;
  const auto D = Intensity::decoy;
  const auto V = Intensity::vacuum;

  const double decoy_sum =
      t.t_S * (counts.n_z[S] + dev.upper(counts.n_z[S], est.est_z_S)) +
      t.t_D * (counts.n_z[D] - dev.lower(counts.n_z[D], est.est_z_D)) +
      t.t_V * (counts.n_z[V] + dev.upper(counts.n_z[V], est.est_z_V));
  if (opts.asymptotic) return {clamp_count(decoy_sum, n), false};

  const double raw =
      (decoy_sum - (kato.b - kato.a) * sqrt_n) / (1.0 + 2.0 * kato.a / sqrt_n);
  return {clamp_count(raw, n), false};
}

}  // namespace

LemmaConstants lemma_constants(const ProtocolParams& params) {
  const double q = params.q;
  if (params.p_x == 0.0 || q == 0.0) {
    throw DomainError("lemma constants: division by zero (p_X = 0 or q = 0)");
  }
  if (q >= 0.5) {
    throw DomainError("lemma constants: require q < 0.5");
  }
  const double quiet = (1.0 - params.dark_count) * (1.0 - params.dark_count);
  const double c1 = (1.0 - q) / q * params.p_z / params.p_x;
  const double c2 = params.p_z * (1.0 - q) * (1.0 - 2.0 * q) * quiet /
                    (1.0 - (q * q + (1.0 - q) * (1.0 - q)) * quiet);
  return {c1, c2};
}

DecoyCoefficients decoy_coefficients(const ProtocolParams& params) {
  const double mu_s = params.mu_signal;
  const double mu_d = params.mu_decoy;
  if (mu_s == mu_d) {
    throw DomainError("decoy coefficients: division by zero (mu_S = mu_D)");
  }
  if (params.p_signal == 0.0 || params.p_decoy == 0.0 || params.p_vacuum == 0.0) {
    throw DomainError("decoy coefficients: every intensity probability must be positive");
  }
  if (mu_d == 0.0 || mu_s == 0.0) {
    throw DomainError("decoy coefficients: intensities must be positive");
  }
  const double p1 = single_photon_prob(params);
  const double gap = mu_s - mu_d;
  return {
      -p1 / params.p_signal * mu_d * std::exp(mu_s) / (mu_s * gap),
      p1 / params.p_decoy * mu_s * std::exp(mu_d) / (mu_d * gap),
      -p1 / params.p_vacuum * mu_s / (mu_d * gap),
  };
}

EstimateSet default_estimates(const ProtocolParams& params, const ChannelParams& channel) {
  const auto counts = expected_counts(params, channel);
  const double n = static_cast<double>(params.pulses);
  const double d = params.dark_count;
  const double eta = channel.eta;
  const double quiet = (1.0 - d) * (1.0 - d);
  const double dark_line = 1.0 - quiet;
  const double emitted = n * params.p_z * single_photon_prob(params);

  // Photon lost: only a dark count on the Z line, X line silent.
  // Photon on the Z line: Z line fires, X line silent.
  const double z_yield = quiet * ((1.0 - eta) * dark_line + eta * (1.0 - params.q));
  const double photon_phase = (1.0 - d) * params.misalignment + d / 2.0;
  const double ph_yield =
      quiet * ((1.0 - eta) * dark_line / 2.0 + eta * (1.0 - params.q) * photon_phase);

  const auto S = Intensity::signal;
  const auto D = Intensity::decoy;
  const auto V = Intensity::vacuum;
  EstimateSet est;
  est.est_z1 = std::min(emitted * z_yield, n);
  est.est_ph1 = std::min(emitted * ph_yield, n);
  est.est_x_error_D = counts.n_x_error[D];
  est.est_x_error_V = counts.n_x_error[V];
  est.est_cross_D = counts.n_cross[D];
  est.est_cross_V = counts.n_cross[V];
  est.est_z_S = counts.n_z[S];
  est.est_z_D = counts.n_z[D];
  est.est_z_V = counts.n_z[V];
  return est;
}

double phase_error_upper(const ObservedCounts& counts, const EstimateSet& est,
                         const ProtocolParams& params, double eps,
                         const BoundOptions& opts) {
  return phase_error_branch(counts, est, params, eps, opts).value;
}

double single_photon_z_lower(const ObservedCounts& counts, const EstimateSet& est,
                             const ProtocolParams& params, double eps,
                             const BoundOptions& opts) {
  return z_lower_branch(counts, est, params, eps, opts).value;
}

BoundsResult evaluate_bounds(const ObservedCounts& counts, const EstimateSet& est,
                             const ProtocolParams& params, double eps,
                             const BoundOptions& opts) {
  const auto ph = phase_error_branch(counts, est, params, eps, opts);
  const auto z1 = z_lower_branch(counts, est, params, eps, opts);
  return {ph.value, z1.value, ph.trivial, z1.trivial};
}

}  // namespace qkdrate
