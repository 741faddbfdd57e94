#include "qkdrate/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "qkdrate/errors.hpp"

namespace qkdrate {
namespace {

using nlohmann::json;

// Walks one JSON object, consuming known keys and rejecting the rest.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.emplace_back(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    out = convert<T>(*it, key);
  }

  template <typename Fn>
  void read_with(const char* key, Fn&& fn) {
    seen_.emplace_back(key);
    auto it = j_.find(key);
    if (it != j_.end()) fn(*it, where_ + "." + key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool known = false;
      for (const auto& k : seen_) known = known || k == it.key();
      if (!known) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  template <typename T>
  T convert(const json& v, const char* key) const {
    const std::string path = where_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path + ": expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number()) throw ConfigError(path + ": expected an integer");
      const double x = v.get<double>();
      if (x < 0 || x != std::floor(x) || x > 1.8e19) {
        throw ConfigError(path + ": expected a non-negative integer");
      }
      return v.is_number_unsigned() ? v.get<T>() : static_cast<T>(x);
    } else {
      if (!v.is_number()) throw ConfigError(path + ": expected a number");
      return v.get<T>();
    }
  }

  const json& j_;
  std::string where_;
  std::vector<std::string> seen_;
};

Interval read_interval(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(path + ": expected [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

void read_protocol(const json& j, ProtocolParams& p) {
  ObjectReader r(j, "protocol");
  r.read("N", p.pulses);
  r.read("p_Z", p.p_z);
  r.read("p_X", p.p_x);
  r.read("p_S", p.p_signal);
  r.read("p_D", p.p_decoy);
  r.read("p_V", p.p_vacuum);
  r.read("mu_S", p.mu_signal);
  r.read("mu_D", p.mu_decoy);
  r.read("mu_V", p.mu_vacuum);
  r.read("q", p.q);
  r.read("d", p.dark_count);
  r.read("f", p.ec_inefficiency);
  r.read("delta_mis", p.misalignment);
  r.finish();
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }

  RunConfig c;
  try {
    ObjectReader r(root, "config");
    r.read_with("protocol", [&](const json& v, const std::string&) { read_protocol(v, c.protocol); });
    r.read_with("security", [&](const json& v, const std::string& path) {
      ObjectReader s(v, path);
      s.read("eps", c.security.eps);
      s.read("eps_c", c.security.eps_c);
      s.read("xi", c.security.xi);
      s.finish();
    });
    r.read_with("sweep", [&](const json& v, const std::string& path) {
      ObjectReader s(v, path);
      s.read("eta_min", c.sweep.eta_min);
      s.read("eta_max", c.sweep.eta_max);
      s.read("points", c.sweep.points);
      s.read("log_spacing", c.sweep.log_spacing);
      s.finish();
    });
    r.read_with("optimizer", [&](const json& v, const std::string& path) {
      ObjectReader s(v, path);
      s.read_with("pz_range", [&](const json& x, const std::string& p) {
        c.optimizer.pz_range = read_interval(x, p);
      });
      s.read_with("mu_s_range", [&](const json& x, const std::string& p) {
        c.optimizer.mu_s_range = read_interval(x, p);
      });
      s.read("grid_resolution", c.optimizer.grid_resolution);
      s.read("refine_iterations", c.optimizer.refine_iterations);
      s.finish();
    });
    r.read_with("montecarlo", [&](const json& v, const std::string& path) {
      ObjectReader s(v, path);
      s.read("trials", c.montecarlo.trials);
      s.read("seed", c.montecarlo.seed);
      s.read("eta", c.montecarlo.eta);
      s.read("channel_pulses", c.montecarlo.channel_pulses);
      s.read("check_channel", c.montecarlo.check_channel);
      s.read("check_bounds", c.montecarlo.check_bounds);
      s.finish();
    });
    std::string mode = to_string(c.mode);
    std::string baseline = to_string(c.baseline);
    r.read("mode", mode);
    r.read("baseline", baseline);
    r.read("optimize_each", c.optimize_each);
    r.read("threads", c.threads);
    r.read("output_path", c.output_path);
    r.finish();
    c.mode = parse_mode(mode);
    c.baseline = parse_baseline(baseline);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  c.optimizer.threads = c.threads;
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("error while reading config file '" + path + "'");
  return parse_config(text.str());
}

std::vector<std::string> validate_config(const RunConfig& c) {
  auto out = validate_params(c.protocol);
  const auto& s = c.sweep;
  if (!(s.eta_min > 0.0 && s.eta_min <= 1.0)) out.emplace_back("eta_min must lie in (0,1]");
  if (!(s.eta_max > 0.0 && s.eta_max <= 1.0)) out.emplace_back("eta_max must lie in (0,1]");
  if (!(s.eta_min <= s.eta_max)) out.emplace_back("eta_min must not exceed eta_max");
  if (s.points < 1) out.emplace_back("points must be at least 1");

  try {
    secrecy_epsilons(c.security.eps, c.security.eps_c, c.security.xi);
  } catch (const DomainError& e) {
    out.emplace_back(e.what());
  }
  if (c.optimize_each) {
    try {
      validate_spec(c.optimizer, c.protocol);
    } catch (const DomainError& e) {
      out.emplace_back(e.what());
    }
  }
  const auto& mc = c.montecarlo;
  if (!(mc.eta >= 0.0 && mc.eta <= 1.0)) out.emplace_back("montecarlo.eta must lie in [0,1]");
  if (mc.trials < 1) out.emplace_back("montecarlo.trials must be at least 1");
  if (mc.channel_pulses < 1) out.emplace_back("montecarlo.channel_pulses must be at least 1");
  return out;
}

std::string config_to_json(const RunConfig& c) {
  const auto& p = c.protocol;
  json j;
  j["protocol"] = {{"N", p.pulses},       {"p_Z", p.p_z},        {"p_X", p.p_x},
                   {"p_S", p.p_signal},   {"p_D", p.p_decoy},    {"p_V", p.p_vacuum},
                   {"mu_S", p.mu_signal}, {"mu_D", p.mu_decoy},  {"mu_V", p.mu_vacuum},
                   {"q", p.q},            {"d", p.dark_count},   {"f", p.ec_inefficiency},
                   {"delta_mis", p.misalignment}};
  j["security"] = {{"eps", c.security.eps}, {"eps_c", c.security.eps_c}, {"xi", c.security.xi}};
  j["sweep"] = {{"eta_min", c.sweep.eta_min},
                {"eta_max", c.sweep.eta_max},
                {"points", c.sweep.points},
                {"log_spacing", c.sweep.log_spacing}};
  j["optimizer"] = {{"pz_range", {c.optimizer.pz_range.lo, c.optimizer.pz_range.hi}},
                    {"mu_s_range", {c.optimizer.mu_s_range.lo, c.optimizer.mu_s_range.hi}},
                    {"grid_resolution", c.optimizer.grid_resolution},
                    {"refine_iterations", c.optimizer.refine_iterations}};
  j["montecarlo"] = {{"trials", c.montecarlo.trials},
                     {"seed", c.montecarlo.seed},
                     {"eta", c.montecarlo.eta},
                     {"channel_pulses", c.montecarlo.channel_pulses},
                     {"check_channel", c.montecarlo.check_channel},
                     {"check_bounds", c.montecarlo.check_bounds}};
  j["mode"] = to_string(c.mode);
  j["baseline"] = to_string(c.baseline);
  j["optimize_each"] = c.optimize_each;
  j["threads"] = c.threads;
  j["output_path"] = c.output_path;
  return j.dump(2);
}

}  // namespace qkdrate
