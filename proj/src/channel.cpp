#include "qkdrate/channel.hpp"

#include <cmath>

#include "qkdrate/errors.hpp"

namespace qkdrate {
namespace {

// Vacuum probabilities of the two receiver lines for label w.
struct LineVacuum {
  double z = 1.0;  // exp(-mu eta (1-q))
  double x = 1.0;  // exp(-mu eta q)
};

LineVacuum line_vacuum(Intensity w, const ProtocolParams& params,
                       const ChannelParams& channel) {
  const double arrive = params.mean_photons(w) * channel.eta;
  return {std::exp(-arrive * (1.0 - params.q)), std::exp(-arrive * params.q)};
}

}  // namespace

double conditional_click_prob(Basis basis, Intensity w, const ProtocolParams& params,
                              const ChannelParams& channel) {
  const auto vac = line_vacuum(w, params, channel);
  const double quiet = (1.0 - params.dark_count) * (1.0 - params.dark_count);
  const double own = basis == Basis::z ? vac.z : vac.x;
  const double other = basis == Basis::z ? vac.x : vac.z;
  return other * quiet * (1.0 - own * quiet);
}

double conditional_error_prob(Basis basis, Intensity w, const ProtocolParams& params,
                              const ChannelParams& channel) {
  const auto vac = line_vacuum(w, params, channel);
  const double d = params.dark_count;
  const double quiet = (1.0 - d) * (1.0 - d);
  const double own = basis == Basis::z ? vac.z : vac.x;
  const double other = basis == Basis::z ? vac.x : vac.z;
  // Own line empty: dark count on the wrong detector alone, or on both.
  const double empty_line = own * (d * (1.0 - d) + d * d / 2.0);
  // Own line lit: wrong detector dark-fires, random bit on the double click.
  const double lit_line = (1.0 - own) * d / 2.0;
  return other * quiet * (empty_line + lit_line);
}

double cross_click_prob(Intensity w, const ProtocolParams& params,
                        const ChannelParams& channel) {
  const auto vac = line_vacuum(w, params, channel);
  const double d = params.dark_count;
  const double dark_line = 1.0 - (1.0 - d) * (1.0 - d);
  return (1.0 - vac.z) * (1.0 - vac.x) + (1.0 - vac.z) * vac.x * dark_line +
         (1.0 - vac.x) * vac.z * dark_line + vac.z * vac.x * dark_line * dark_line;
}

double no_click_prob(Intensity w, const ProtocolParams& params,
                     const ChannelParams& channel) {
  const auto vac = line_vacuum(w, params, channel);
  const double quiet = (1.0 - params.dark_count) * (1.0 - params.dark_count);
  return vac.z * vac.x * quiet * quiet;
}

ObservedCounts expected_counts_unchecked(const ProtocolParams& params,
                                         const ChannelParams& channel) {
  const double n = static_cast<double>(params.pulses);
  ObservedCounts out;
  double sift_errors = 0.0;
  for (auto w : kIntensities) {
    const double pw = params.intensity_prob(w);
    out.n_z[w] = n * params.p_z * pw * conditional_click_prob(Basis::z, w, params, channel);
    out.n_x[w] = n * params.p_x * pw * conditional_click_prob(Basis::x, w, params, channel);
    out.n_x_error[w] =
        n * pw * params.p_x * conditional_error_prob(Basis::x, w, params, channel) +
        params.misalignment * out.n_x[w];
    out.n_cross[w] = n * pw * cross_click_prob(w, params, channel);
    sift_errors += n * pw * params.p_z * conditional_error_prob(Basis::z, w, params, channel);
  }
  out.n_sift = out.n_z.sum();
  out.e_bit = out.n_sift > 0.0 ? sift_errors / out.n_sift + params.misalignment
                               : params.misalignment;
  return out;
}

ObservedCounts expected_counts(const ProtocolParams& params, const ChannelParams& channel) {
  auto out = expected_counts_unchecked(params, channel);
  if (!(out.n_sift > 0.0)) {
    throw DegenerateChannelError(
        "expected sifted key is empty; bit error rate undefined");
  }
  return out;
}

}  // namespace qkdrate
