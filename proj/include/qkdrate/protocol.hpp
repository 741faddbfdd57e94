#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qkdrate {

enum class Basis { z, x };

// Intensity labels of the decoy-state source; the weakest is the vacuum.
enum class Intensity { signal = 0, decoy = 1, vacuum = 2 };

inline constexpr std::array<Intensity, 3> kIntensities = {
    Intensity::signal, Intensity::decoy, Intensity::vacuum};

inline constexpr std::size_t index(Intensity w) {
  return static_cast<std::size_t>(w);
}

// One value per intensity label, indexed by Intensity.
template <typename T>
struct PerIntensity {
  std::array<T, 3> values{};

  T& operator[](Intensity w) { return values[index(w)]; }
  const T& operator[](Intensity w) const { return values[index(w)]; }

  T sum() const { return values[0] + values[1] + values[2]; }
  bool operator==(const PerIntensity&) const = default;
};

std::string to_string(Intensity w);
std::string to_string(Basis b);

// Source, receiver and post-processing configuration.
//
// The receiver's passive beam splitter sends each photon to the X-basis line
// with probability q and to the Z-basis line with probability 1-q. The
// detector efficiency is not a separate field: fold it into the channel
// transmission (eta = eta_fiber * eta_det).
struct ProtocolParams {
  std::uint64_t pulses = 10'000'000'000ULL;  // N
  double p_z = 0.9;
  double p_x = 0.1;
  double p_signal = 0.8;
  double p_decoy = 0.1;
  double p_vacuum = 0.1;
  double mu_signal = 0.5;
  double mu_decoy = 0.05;
  double mu_vacuum = 0.0;
  double q = 0.1;                 // beam-splitter transmittance toward X line
  double dark_count = 1e-9;       // per detector, per gate
  double ec_inefficiency = 1.16;  // f
  double misalignment = 0.03;     // delta_mis

  double intensity_prob(Intensity w) const;
  double mean_photons(Intensity w) const;
};

struct ChannelParams {
  double eta = 1.0;  // overall transmission including detection efficiency
};

// Violated invariants as human-readable lines; empty means valid.
std::vector<std::string> validate_params(const ProtocolParams& params);
std::vector<std::string> validate_channel(const ChannelParams& channel);

// Throws DomainError listing every violation when the report is non-empty.
void require_valid(const ProtocolParams& params);
void require_valid(const ChannelParams& channel);

// Poisson photon-number distribution of the phase-randomized source.
double poisson_photon_prob(Intensity w, unsigned n, const ProtocolParams& params);

// Probability that a round emits exactly one photon, averaged over labels.
double single_photon_prob(const ProtocolParams& params);

}  // namespace qkdrate
