#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qkdrate/config.hpp"
#include "qkdrate/montecarlo.hpp"
#include "qkdrate/optimizer.hpp"

namespace qkdrate {

// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitStatistics = 3,
};

inline constexpr const char* kCsvHeader =
    "eta,rate,key_length,n_z1_lower,n_ph1_upper,e_bit,p_z,mu_s,mode,baseline";

// Shortest-safe rendering: 17 significant digits round-trips any double.
std::string format_double(double x);

std::string render_csv(const std::vector<SweepRow>& rows);

// Writes to `path + ".tmp"` and renames over `path`; throws IoError.
void write_atomic(const std::string& path, const std::string& content);

struct McValidation {
  std::optional<AgreementReport> channel;
  std::optional<SoundnessReport> soundness;
  bool pass() const {
    return (!channel || channel->pass) && (!soundness || soundness->pass());
  }
};

McValidation run_mc_validation(const RunConfig& config);
std::string mc_report_json(const McValidation& v, const RunConfig& config);

// Entry point of the `qkdrate` tool. Subcommands:
//   keyrate      --config PATH [--mode M] [--baseline B] [--out PATH] [--pulses N]
//   mc-validate  --config PATH [--out PATH] [--pulses N]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qkdrate
