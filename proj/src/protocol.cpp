#include "qkdrate/protocol.hpp"

#include <cmath>
#include <sstream>

#include "qkdrate/errors.hpp"

namespace qkdrate {
namespace {

constexpr double kSumTolerance = 1e-12;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string join_lines(const std::vector<std::string>& lines) {
  std::ostringstream out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i != 0) out << '\n';
    out << lines[i];
  }
  return out.str();
}

}  // namespace

std::string to_string(Intensity w) {
  switch (w) {
    case Intensity::signal:
      return "S";
    case Intensity::decoy:
      return "D";
    case Intensity::vacuum:
      return "V";
  }
  return "?";
}

std::string to_string(Basis b) { return b == Basis::z ? "Z" : "X"; }

double ProtocolParams::intensity_prob(Intensity w) const {
  switch (w) {
    case Intensity::signal:
      return p_signal;
    case Intensity::decoy:
      return p_decoy;
    case Intensity::vacuum:
      return p_vacuum;
  }
  return 0.0;
}

double ProtocolParams::mean_photons(Intensity w) const {
  switch (w) {
    case Intensity::signal:
      return mu_signal;
    case Intensity::decoy:
      return mu_decoy;
    case Intensity::vacuum:
      return mu_vacuum;
  }
  return 0.0;
}

std::vector<std::string> validate_params(const ProtocolParams& p) {
  std::vector<std::string> out;
  if (p.pulses < 1) out.emplace_back("N must be a positive integer");

  for (auto [name, value] : {std::pair{"p_Z", p.p_z},
                             {"p_X", p.p_x},
                             {"p_S", p.p_signal},
                             {"p_D", p.p_decoy},
                             {"p_V", p.p_vacuum}}) {
    if (!is_probability(value)) {
      out.emplace_back(std::string(name) + " must lie in [0,1]");
    }
  }
  if (std::abs(p.p_z + p.p_x - 1.0) > kSumTolerance) {
    out.emplace_back("basis probabilities must satisfy p_Z+p_X=1");
  }
  if (std::abs(p.p_signal + p.p_decoy + p.p_vacuum - 1.0) > kSumTolerance) {
    out.emplace_back("intensity probabilities must satisfy p_S+p_D+p_V=1");
  }
  if (p.mu_vacuum != 0.0) out.emplace_back("mu_V must be 0 (vacuum decoy)");
  if (!(p.mu_decoy > 0.0)) out.emplace_back("mu_D must satisfy 0<mu_D");
  if (!(p.mu_decoy < p.mu_signal)) {
    out.emplace_back("mu_D must satisfy mu_D<mu_S");
  }
  if (!(p.q > 0.0 && p.q < 0.5)) out.emplace_back("q must satisfy 0<q<0.5");
  if (!(p.dark_count >= 0.0 && p.dark_count < 1.0)) {
    out.emplace_back("d must satisfy 0<=d<1");
  }
  if (!(p.ec_inefficiency >= 1.0)) out.emplace_back("f must satisfy f>=1");
  if (!(p.misalignment >= 0.0 && p.misalignment < 0.5)) {
    out.emplace_back("delta_mis must satisfy 0<=delta_mis<0.5");
  }
  return out;
}

std::vector<std::string> validate_channel(const ChannelParams& c) {
  std::vector<std::string> out;
  if (!(c.eta > 0.0 && c.eta <= 1.0)) {
    out.emplace_back("eta must satisfy 0<eta<=1");
  }
  return out;
}

void require_valid(const ProtocolParams& params) {
  if (auto v = validate_params(params); !v.empty()) {
    throw DomainError("invalid protocol parameters:\n" + join_lines(v));
  }
}

void require_valid(const ChannelParams& channel) {
  if (auto v = validate_channel(channel); !v.empty()) {
    throw DomainError("invalid channel parameters:\n" + join_lines(v));
  }
}

double poisson_photon_prob(Intensity w, unsigned n, const ProtocolParams& params) {
  const double mu = params.mean_photons(w);
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n <= 170) return std::exp(-mu) * std::pow(mu, n) / std::tgamma(n + 1.0);
  return std::exp(n * std::log(mu) - mu - std::lgamma(n + 1.0));
}

double single_photon_prob(const ProtocolParams& params) {
  double total = 0.0;
  for (auto w : kIntensities) {
    total += params.intensity_prob(w) * poisson_photon_prob(w, 1, params);
  }
  return total;
}

}  // namespace qkdrate
