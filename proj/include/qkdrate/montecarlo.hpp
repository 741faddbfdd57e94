#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkdrate/channel.hpp"
#include "qkdrate/keyrate.hpp"
#include "qkdrate/protocol.hpp"

namespace qkdrate {

// Counter-based random stream: every (seed, trial, pulse) triple owns an
// independent SplitMix64 sequence, so pulses can be simulated in any order.
class PulseStream {
 public:
  PulseStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t pulse);

  std::uint64_t next_u64();
  double uniform();  // [0, 1), 53-bit resolution
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

enum class Outcome { no_click, z_click, x_click, cross_click };
enum class PhaseError { no, yes, not_applicable };

struct PulseRecord {
  int a = 0;  // Alice's bit
  Basis alpha = Basis::z;
  Intensity omega = Intensity::signal;
  unsigned n = 0;  // photons emitted
  unsigned m = 0;  // photons reaching Bob's beam splitter
  Outcome outcome = Outcome::no_click;
  int bob_bit = 0;  // meaningful for z_click and x_click
  // Virtual X-basis disagreement; set only for single-photon Z emissions
  // that end in a Z-line click.
  PhaseError phase_error = PhaseError::not_applicable;
};

struct TrialCounts {
  ObservedCounts observed;         // integer-valued
  std::uint64_t n_ph1 = 0;         // single-photon phase errors
  std::uint64_t n_z1 = 0;          // single-photon Z detections
  std::uint64_t sift_errors = 0;   // Z-basis bit errors in the sifted key
};

// One pulse of the physical protocol plus the virtual single-photon phase
// error. Loss is Binomial(n, eta) thinning; each surviving photon goes to the
// X line with probability q. A photon on its own basis line hits detector a
// (flipped with probability delta_mis), otherwise a uniformly random one.
PulseRecord simulate_pulse(const ProtocolParams& params, const ChannelParams& channel,
                           PulseStream& rng);

// N = params.pulses pulses with streams keyed by (seed, trial, pulse index).
TrialCounts run_trial(const ProtocolParams& params, const ChannelParams& channel,
                      std::uint64_t seed, std::uint64_t trial = 0, unsigned threads = 1);

struct BoundCheck {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double frequency = 0.0;
  double ci_low = 0.0;   // Wilson 95% interval of the violation frequency
  double ci_high = 0.0;
  double budget = 0.0;   // failure probability the bound allows
  double allowed = 0.0;  // budget * trials + 3 sigma
  bool pass = false;
};

struct SoundnessSample {
  std::uint64_t n_ph1 = 0;
  double n_ph1_upper = 0.0;
  std::uint64_t n_z1 = 0;
  double n_z1_lower = 0.0;
};

struct SoundnessReport {
  std::uint64_t seed = 0;
  std::uint64_t pulses = 0;
  double eps = 0.0;
  BoundCheck phase_error;
  BoundCheck single_photon_z;
  std::vector<SoundnessSample> samples;
  bool pass() const { return phase_error.pass && single_photon_z.pass; }
};

struct SoundnessOptions {
  // Multipliers applied to the computed bounds; values other than 1 are
  // only useful for checking that the harness detects a broken bound.
  double phase_bound_scale = 1.0;
  double z_bound_scale = 1.0;
  unsigned threads = 1;
};

// Runs `trials` independent trials and counts how often the realized
// single-photon quantities escape the bounds computed from the trial's own
// counts (with expectation-valued estimates).
SoundnessReport validate_bounds(const ProtocolParams& params, const ChannelParams& channel,
                                const SecurityParams& sec, std::uint64_t trials,
                                std::uint64_t seed, const SoundnessOptions& opts = {});

struct AgreementEntry {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double z = 0.0;
};

struct AgreementReport {
  std::uint64_t seed = 0;
  std::uint64_t pulses = 0;
  std::vector<AgreementEntry> entries;
  double max_abs_z = 0.0;
  bool pass = false;  // every |z| <= 5
};

inline constexpr double kAgreementZ = 5.0;

// z-score of every count entry against per-pulse Bernoulli variance, and of
// the sifted error count against the expected bit error rate.
AgreementReport agreement_report(const TrialCounts& simulated, const ObservedCounts& expected,
                                 std::uint64_t pulses);

// Simulates `pulses` pulses and compares them against the channel model.
// Throws PreconditionError when delta_mis != 0: the model adds misalignment
// at the count level, the simulator per photon.
AgreementReport validate_channel_model(const ProtocolParams& params,
                                       const ChannelParams& channel, std::uint64_t pulses,
                                       std::uint64_t seed, unsigned threads = 1);

}  // namespace qkdrate
