#include "qkdrate/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "qkdrate/bounds.hpp"
#include "qkdrate/errors.hpp"
#include "qkdrate/parallel.hpp"

namespace qkdrate {
namespace {

constexpr std::uint64_t kChunk = 1u << 16;
constexpr unsigned kMaxPhotons = 1000;
constexpr double kWilsonZ = 1.96;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

unsigned sample_poisson(double mu, PulseStream& rng) {
  if (mu <= 0.0) return 0;
  const double u = rng.uniform();
  double term = std::exp(-mu);
  double cdf = term;
  unsigned k = 0;
  while (u >= cdf && k < kMaxPhotons) {
    ++k;
    term *= mu / k;
    cdf += term;
  }
  return k;
}

Intensity sample_intensity(const ProtocolParams& p, PulseStream& rng) {
  const double u = rng.uniform();
  if (u < p.p_signal) return Intensity::signal;
  if (u < p.p_signal + p.p_decoy) return Intensity::decoy;
  return Intensity::vacuum;
}

struct Tally {
  std::array<std::uint64_t, 3> n_z{};
  std::array<std::uint64_t, 3> n_x{};
  std::array<std::uint64_t, 3> n_x_error{};
  std::array<std::uint64_t, 3> n_cross{};
  std::uint64_t sift_errors = 0;
  std::uint64_t n_ph1 = 0;
  std::uint64_t n_z1 = 0;

  void add(const PulseRecord& r) {
    const auto w = index(r.omega);
    switch (r.outcome) {
      case Outcome::z_click:
        if (r.alpha == Basis::z) {
          ++n_z[w];
          if (r.bob_bit != r.a) ++sift_errors;
          if (r.n == 1) ++n_z1;
          if (r.phase_error == PhaseError::yes) ++n_ph1;
        }
        break;
      case Outcome::x_click:
        if (r.alpha == Basis::x) {
          ++n_x[w];
          if (r.bob_bit != r.a) ++n_x_error[w];
        }
        break;
      case Outcome::cross_click:
        ++n_cross[w];
        break;
      case Outcome::no_click:
        break;
    }
  }

  void merge(const Tally& o) {
    for (std::size_t i = 0; i < 3; ++i) {
      n_z[i] += o.n_z[i];
      n_x[i] += o.n_x[i];
      n_x_error[i] += o.n_x_error[i];
      n_cross[i] += o.n_cross[i];
    }
    sift_errors += o.sift_errors;
    n_ph1 += o.n_ph1;
    n_z1 += o.n_z1;
  }
};

// An empty run (N = 0) is simulable; everything else must be a valid config.
void require_simulable(ProtocolParams params, const ChannelParams& channel) {
  params.pulses = std::max<std::uint64_t>(params.pulses, 1);
  require_valid(params);
  if (!(channel.eta >= 0.0 && channel.eta <= 1.0)) {
    throw DomainError("simulation: eta must lie in [0,1]");
  }
}

double bernoulli_z(double observed, double expected, double trials) {
  if (trials <= 0.0) return observed == expected ? 0.0 : std::numeric_limits<double>::infinity();
  const double p = std::clamp(expected / trials, 0.0, 1.0);
  const double var = trials * p * (1.0 - p);
  if (var <= 0.0) {
    return observed == expected ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return (observed - expected) / std::sqrt(var);
}

BoundCheck make_check(std::string name, std::uint64_t trials, std::uint64_t violations,
                      double budget) {
  BoundCheck c;
  c.name = std::move(name);
  c.trials = trials;
  c.violations = violations;
  c.budget = std::min(budget, 1.0);
  const double t = static_cast<double>(trials);
  c.frequency = t > 0 ? violations / t : 0.0;
  if (t > 0) {
    const double z2 = kWilsonZ * kWilsonZ;
    const double denom = 1.0 + z2 / t;
    const double center = (c.frequency + z2 / (2.0 * t)) / denom;
    const double half =
        kWilsonZ * std::sqrt(c.frequency * (1.0 - c.frequency) / t + z2 / (4.0 * t * t)) /
        denom;
    c.ci_low = std::max(0.0, center - half);
    c.ci_high = std::min(1.0, center + half);
  }
  c.allowed = c.budget * t + 3.0 * std::sqrt(t * c.budget * (1.0 - c.budget));
  c.pass = static_cast<double>(violations) <= c.allowed;
  return c;
}

}  // namespace

PulseStream::PulseStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t pulse)
    : state_(splitmix64(splitmix64(splitmix64(seed) ^ trial) ^ pulse)) {}

std::uint64_t PulseStream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double PulseStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

PulseRecord simulate_pulse(const ProtocolParams& params, const ChannelParams& channel,
                           PulseStream& rng) {
  PulseRecord r;
  r.a = rng.bernoulli(0.5) ? 1 : 0;
  r.alpha = rng.bernoulli(params.p_z) ? Basis::z : Basis::x;
  r.omega = sample_intensity(params, rng);
  r.n = sample_poisson(params.mean_photons(r.omega), rng);

  for (unsigned i = 0; i < r.n; ++i) {
    if (rng.bernoulli(channel.eta)) ++r.m;
  }

  // fired[line][detector], line 0 = Z, 1 = X
  std::array<std::array<bool, 2>, 2> fired{};
  unsigned photons_on_z = 0;
  for (unsigned i = 0; i < r.m; ++i) {
    const bool to_x = rng.bernoulli(params.q);
    const Basis line = to_x ? Basis::x : Basis::z;
    if (!to_x) ++photons_on_z;
    int detector = 0;
    if (line == r.alpha) {
      detector = r.a ^ (rng.bernoulli(params.misalignment) ? 1 : 0);
    } else {
      detector = rng.bernoulli(0.5) ? 1 : 0;
    }
    fired[to_x ? 1 : 0][detector] = true;
  }
  for (auto& line : fired) {
    for (auto&& det : line) {
      if (rng.bernoulli(params.dark_count)) det = true;
    }
  }

  const bool z_fired = fired[0][0] || fired[0][1];
  const bool x_fired = fired[1][0] || fired[1][1];
  auto resolve = [&](const std::array<bool, 2>& line) {
    if (line[0] && line[1]) return rng.bernoulli(0.5) ? 1 : 0;
    return line[1] ? 1 : 0;
  };

  if (z_fired && x_fired) {
    r.outcome = Outcome::cross_click;
  } else if (z_fired) {
    r.outcome = Outcome::z_click;
    r.bob_bit = resolve(fired[0]);
  } else if (x_fired) {
    r.outcome = Outcome::x_click;
    r.bob_bit = resolve(fired[1]);
  }

  if (r.alpha == Basis::z && r.n == 1 && r.outcome == Outcome::z_click) {
    const bool double_click = fired[0][0] && fired[0][1];
    const bool photon_click = photons_on_z == 1 && !double_click;
    const double p_error = photon_click ? params.misalignment : 0.5;
    r.phase_error = rng.bernoulli(p_error) ? PhaseError::yes : PhaseError::no;
  }
  return r;
}

TrialCounts run_trial(const ProtocolParams& params, const ChannelParams& channel,
                      std::uint64_t seed, std::uint64_t trial, unsigned threads) {
  require_simulable(params, channel);
  const std::uint64_t pulses = params.pulses;
  const std::uint64_t chunks = (pulses + kChunk - 1) / kChunk;
  std::vector<Tally> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(pulses, begin + kChunk);
    Tally& t = partial[c];
    for (std::uint64_t i = begin; i < end; ++i) {
      PulseStream rng(seed, trial, i);
      t.add(simulate_pulse(params, channel, rng));
    }
  });
  Tally total;
  for (const auto& t : partial) total.merge(t);

  TrialCounts out;
  for (auto w : kIntensities) {
    const auto i = index(w);
    out.observed.n_z[w] = static_cast<double>(total.n_z[i]);
    out.observed.n_x[w] = static_cast<double>(total.n_x[i]);
    out.observed.n_x_error[w] = static_cast<double>(total.n_x_error[i]);
    out.observed.n_cross[w] = static_cast<double>(total.n_cross[i]);
  }
  out.observed.n_sift = out.observed.n_z.sum();
  out.observed.e_bit = out.observed.n_sift > 0.0
                           ? static_cast<double>(total.sift_errors) / out.observed.n_sift
                           : 0.0;
  out.sift_errors = total.sift_errors;
  out.n_ph1 = total.n_ph1;
  out.n_z1 = total.n_z1;
  return out;
}

SoundnessReport validate_bounds(const ProtocolParams& params, const ChannelParams& channel,
                                const SecurityParams& sec, std::uint64_t trials,
                                std::uint64_t seed, const SoundnessOptions& opts) {
  require_simulable(params, channel);
  const auto est = default_estimates(params, channel);

  SoundnessReport report;
  report.seed = seed;
  report.pulses = params.pulses;
  report.eps = sec.eps;
  report.samples.resize(trials);
  parallel_for(trials, opts.threads, [&](std::size_t t) {
    const auto counts = run_trial(params, channel, seed, t);
    const auto bounds = evaluate_bounds(counts.observed, est, params, sec.eps);
    auto& s = report.samples[t];
    s.n_ph1 = counts.n_ph1;
    s.n_z1 = counts.n_z1;
    s.n_ph1_upper = bounds.n_ph1_upper * opts.phase_bound_scale;
    s.n_z1_lower = bounds.n_z1_lower * opts.z_bound_scale;
  });

  std::uint64_t ph_violations = 0;
  std::uint64_t z_violations = 0;
  for (const auto& s : report.samples) {
    if (static_cast<double>(s.n_ph1) > s.n_ph1_upper) ++ph_violations;
    if (static_cast<double>(s.n_z1) < s.n_z1_lower) ++z_violations;
  }
  report.phase_error = make_check("phase_error_upper", trials, ph_violations, 5.0 * sec.eps);
  report.single_photon_z =
      make_check("single_photon_z_lower", trials, z_violations, 4.0 * sec.eps);
  return report;
}

AgreementReport agreement_report(const TrialCounts& simulated, const ObservedCounts& expected,
                                 std::uint64_t pulses) {
  AgreementReport report;
  report.pulses = pulses;
  const double n = static_cast<double>(pulses);
  const auto& obs = simulated.observed;

  auto add_family = [&](const std::string& name, const PerIntensity<double>& o,
                        const PerIntensity<double>& e) {
    for (auto w : kIntensities) {
      report.entries.push_back(
          {name + "_" + to_string(w), o[w], e[w], bernoulli_z(o[w], e[w], n)});
    }
  };
  add_family("n_z", obs.n_z, expected.n_z);
  add_family("n_x", obs.n_x, expected.n_x);
  add_family("n_x_error", obs.n_x_error, expected.n_x_error);
  add_family("n_cross", obs.n_cross, expected.n_cross);
  report.entries.push_back(
      {"n_sift", obs.n_sift, expected.n_sift, bernoulli_z(obs.n_sift, expected.n_sift, n)});

  // Sifted errors given the realized sift length.
  const double e_bit_z = bernoulli_z(static_cast<double>(simulated.sift_errors),
                                     expected.e_bit * obs.n_sift, obs.n_sift);
  report.entries.push_back({"e_bit", obs.e_bit, expected.e_bit, e_bit_z});

  report.max_abs_z = 0.0;
  for (const auto& e : report.entries) {
    report.max_abs_z = std::max(report.max_abs_z, std::abs(e.z));
  }
  report.pass = report.max_abs_z <= kAgreementZ;
  return report;
}

AgreementReport validate_channel_model(const ProtocolParams& params,
                                       const ChannelParams& channel, std::uint64_t pulses,
                                       std::uint64_t seed, unsigned threads) {
  if (params.misalignment != 0.0) {
    throw PreconditionError(
        "channel-model validation requires delta_mis = 0: the model adds misalignment "
        "per count, the simulator per photon");
  }
  ProtocolParams p = params;
  p.pulses = pulses;
  require_simulable(p, channel);
  const auto simulated = run_trial(p, channel, seed, 0, threads);
  auto report = agreement_report(simulated, expected_counts_unchecked(p, channel), pulses);
  report.seed = seed;
  return report;
}

}  // namespace qkdrate
