#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkdrate/keyrate.hpp"
#include "qkdrate/optimizer.hpp"
#include "qkdrate/protocol.hpp"

namespace qkdrate {

// Malformed or structurally invalid configuration document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable input or unwritable output.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SecurityInputs {
  double eps = 1e-20 / 144.0;
  double eps_c = 1e-10 / 2.0;
  double xi = 71.0;
};

struct SweepConfig {
  double eta_min = 1e-5;
  double eta_max = 1.0;
  unsigned points = 20;
  bool log_spacing = true;
};

struct MonteCarloConfig {
  std::uint64_t trials = 200;
  std::uint64_t seed = 1;
  double eta = 0.3;
  std::uint64_t channel_pulses = 1'000'000;
  bool check_channel = true;
  bool check_bounds = true;
};

// Everything a CLI run needs. JSON layout:
//
//   {
//     "protocol":  {"N", "p_Z", "p_X", "p_S", "p_D", "p_V", "mu_S", "mu_D",
//                   "mu_V", "q", "d", "f", "delta_mis"},
//     "security":  {"eps", "eps_c", "xi"},
//     "sweep":     {"eta_min", "eta_max", "points", "log_spacing"},
//     "optimizer": {"pz_range": [lo, hi], "mu_s_range": [lo, hi],
//                   "grid_resolution", "refine_iterations"},
//     "montecarlo": {"trials", "seed", "eta", "channel_pulses",
//                    "check_channel", "check_bounds"},
//     "mode": "finite" | "asymptotic",
//     "baseline": "passive" | "active-approx",
//     "optimize_each": bool,
//     "threads": int,
//     "output_path": string
//   }
//
// Every key is optional; omitted keys keep the defaults below. Unknown keys
// are rejected.
struct RunConfig {
  ProtocolParams protocol;
  SecurityInputs security;
  SweepConfig sweep;
  OptimizationSpec optimizer;
  MonteCarloConfig montecarlo;
  Mode mode = Mode::finite;
  Baseline baseline = Baseline::passive;
  bool optimize_each = true;
  unsigned threads = 1;
  std::string output_path;
};

// Throws ConfigError on malformed JSON, wrong types or unknown keys.
RunConfig parse_config(const std::string& json_text);
// Throws IoError when the file cannot be read.
RunConfig load_config(const std::string& path);

// Invariant violations, one line each; empty means runnable.
std::vector<std::string> validate_config(const RunConfig& config);

std::string config_to_json(const RunConfig& config);

}  // namespace qkdrate
