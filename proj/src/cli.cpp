#include "qkdrate/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkdrate/errors.hpp"

namespace qkdrate {
namespace {

using nlohmann::json;

struct Overrides {
  std::string config_path;
  std::string mode;
  std::string baseline;
  std::string out;
  std::uint64_t pulses = 0;
};

// Loads the config and applies command-line overrides. Returns an exit code
// on failure, after printing the reason.
std::optional<int> prepare(const Overrides& o, RunConfig& config, std::ostream& err) {
  try {
    config = load_config(o.config_path);
    if (!o.mode.empty()) config.mode = parse_mode(o.mode);
    if (!o.baseline.empty()) config.baseline = parse_baseline(o.baseline);
  } catch (const IoError& e) {
    err << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  if (!o.out.empty()) config.output_path = o.out;
  if (o.pulses != 0) config.protocol.pulses = o.pulses;

  if (auto violations = validate_config(config); !violations.empty()) {
    for (const auto& v : violations) err << v << '\n';
    return kExitConfig;
  }
  return std::nullopt;
}

int emit(const std::string& content, const RunConfig& config, std::ostream& out,
         std::ostream& err) {
  if (config.output_path.empty()) {
    out << content;
    return kExitOk;
  }
  try {
    write_atomic(config.output_path, content);
  } catch (const IoError& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int cmd_keyrate(const Overrides& o, std::ostream& out, std::ostream& err) {
  RunConfig config;
  if (auto code = prepare(o, config, err)) return *code;

  const auto sec =
      secrecy_epsilons(config.security.eps, config.security.eps_c, config.security.xi);
  const auto grid = make_grid(config.sweep.eta_min, config.sweep.eta_max, config.sweep.points,
                              config.sweep.log_spacing);
  OptimizationSpec spec = config.optimizer;
  spec.threads = config.threads;
  const auto rows =
      sweep(config.protocol, sec, grid, config.mode, config.baseline, config.optimize_each, spec);
  return emit(render_csv(rows), config, out, err);
}

int cmd_mc_validate(const Overrides& o, std::ostream& out, std::ostream& err) {
  RunConfig config;
  if (auto code = prepare(o, config, err)) return *code;
  if (config.montecarlo.check_channel && config.protocol.misalignment != 0.0) {
    err << "channel-model validation requires delta_mis = 0\n";
    return kExitConfig;
  }
  const auto result = run_mc_validation(config);
  if (int code = emit(mc_report_json(result, config), config, out, err); code != kExitOk) {
    return code;
  }
  return result.pass() ? kExitOk : kExitStatistics;
}

json check_json(const BoundCheck& c) {
  return {{"name", c.name},         {"trials", c.trials},   {"violations", c.violations},
          {"frequency", c.frequency}, {"ci_low", c.ci_low}, {"ci_high", c.ci_high},
          {"budget", c.budget},     {"allowed", c.allowed}, {"pass", c.pass}};
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string render_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream s;
  s << kCsvHeader << '\n';
  for (const auto& r : rows) {
    s << format_double(r.eta) << ',' << format_double(r.result.rate) << ','
      << format_double(r.result.key_length) << ',' << format_double(r.result.n_z1_lower) << ','
      << format_double(r.result.n_ph1_upper) << ',' << format_double(r.result.e_bit) << ','
      << format_double(r.params.p_z) << ',' << format_double(r.params.mu_signal) << ','
      << to_string(r.result.mode) << ',' << to_string(r.result.baseline) << '\n';
  }
  return s.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp + "' for writing");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("error while writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

McValidation run_mc_validation(const RunConfig& config) {
  McValidation v;
  const ChannelParams channel{config.montecarlo.eta};
  if (config.montecarlo.check_channel) {
    v.channel = validate_channel_model(config.protocol, channel,
                                       config.montecarlo.channel_pulses,
                                       config.montecarlo.seed, config.threads);
  }
  if (config.montecarlo.check_bounds) {
    const auto sec =
        secrecy_epsilons(config.security.eps, config.security.eps_c, config.security.xi);
    SoundnessOptions opts;
    opts.threads = config.threads;
    v.soundness = validate_bounds(config.protocol, channel, sec, config.montecarlo.trials,
                                  config.montecarlo.seed, opts);
  }
  return v;
}

std::string mc_report_json(const McValidation& v, const RunConfig& config) {
  json j;
  j["seed"] = config.montecarlo.seed;
  j["eta"] = config.montecarlo.eta;
  j["pass"] = v.pass();
  if (v.channel) {
    json entries = json::array();
    for (const auto& e : v.channel->entries) {
      entries.push_back(
          {{"name", e.name}, {"observed", e.observed}, {"expected", e.expected}, {"z", e.z}});
    }
    j["channel"] = {{"pulses", v.channel->pulses},
                    {"seed", v.channel->seed},
                    {"max_abs_z", v.channel->max_abs_z},
                    {"threshold", kAgreementZ},
                    {"pass", v.channel->pass},
                    {"entries", entries}};
  }
  if (v.soundness) {
    const auto& s = *v.soundness;
    json samples = json::array();
    for (const auto& x : s.samples) {
      samples.push_back({{"n_ph1", x.n_ph1},
                         {"n_ph1_upper", x.n_ph1_upper},
                         {"n_z1", x.n_z1},
                         {"n_z1_lower", x.n_z1_lower}});
    }
    j["soundness"] = {{"pulses", s.pulses},
                      {"seed", s.seed},
                      {"eps", s.eps},
                      {"pass", s.pass()},
                      {"phase_error", check_json(s.phase_error)},
                      {"single_photon_z", check_json(s.single_photon_z)},
                      {"samples", samples}};
  }
  return j.dump(2) + "\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-key rate engine for passive-basis decoy-state BB84", "qkdrate"};
  app.require_subcommand(1);

  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON run configuration")->required();
    sub->add_option("--out", o.out, "Output path (stdout when omitted)");
    sub->add_option("--pulses", o.pulses, "Override the pulse count N");
  };
  auto* keyrate = app.add_subcommand("keyrate", "Key rate versus channel transmission (CSV)");
  add_common(keyrate);
  keyrate->add_option("--mode", o.mode, "finite|asymptotic");
  keyrate->add_option("--baseline", o.baseline, "passive|active-approx");

  auto* mc = app.add_subcommand("mc-validate", "Monte-Carlo validation report (JSON)");
  add_common(mc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (keyrate->parsed()) return cmd_keyrate(o, out, err);
    return cmd_mc_validate(o, out, err);
  } catch (const PreconditionError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace qkdrate
