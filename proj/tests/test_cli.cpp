#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkdrate/cli.hpp"
#include "qkdrate/errors.hpp"

namespace {

using namespace qkdrate;
namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qkdrate_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "qkdrate");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cells_in(line);
    std::string cell;
    while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

constexpr const char* kTableConfig = R"({
  "protocol": {"d": 1e-9, "delta_mis": 0.03, "f": 1.16},
  "security": {"eps": 6.944444444444444e-23, "eps_c": 5e-11, "xi": 71},
  "sweep": {"eta_min": 1e-4, "eta_max": 1, "points": 4, "log_spacing": true},
  "optimizer": {"grid_resolution": 7, "refine_iterations": 10},
  "mode": "asymptotic"
})";

TEST_F(CliTest, KeyrateWritesOneRowPerPoint) {
  const auto cfg = write("c.json", kTableConfig);
  const auto out = (dir_ / "curve.csv").string();
  ASSERT_EQ(run({"keyrate", "--config", cfg, "--out", out}), kExitOk) << err_.str();
  const auto rows = parse_csv(slurp(out));
  ASSERT_EQ(rows.size(), 5u);
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
  EXPECT_EQ(header, kCsvHeader);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    ASSERT_EQ(rows[r].size(), 10u);
    for (std::size_t c = 0; c < 8; ++c) {
      char* end = nullptr;
      std::strtod(rows[r][c].c_str(), &end);
      EXPECT_EQ(*end, '\0') << rows[r][c];
    }
    EXPECT_EQ(rows[r][8], "asymptotic");
    EXPECT_EQ(rows[r][9], "passive");
  }
  EXPECT_FALSE(fs::exists(out + ".tmp"));
}

TEST_F(CliTest, SinglePointAndFlagOverrides) {
  const auto cfg = write("c.json", R"({
    "sweep": {"eta_min": 1, "eta_max": 1, "points": 1},
    "optimize_each": false
  })");
  ASSERT_EQ(run({"keyrate", "--config", cfg, "--mode", "finite", "--baseline", "active-approx",
                 "--pulses", "100000000"}),
            kExitOk)
      << err_.str();
  const auto rows = parse_csv(out_.str());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "1");
  EXPECT_EQ(rows[1][8], "finite");
  EXPECT_EQ(rows[1][9], "active-approx");

  ProtocolParams p;
  p.pulses = 100'000'000;
  const auto direct = key_rate(p, {1.0}, default_security(), Mode::finite, Baseline::active_approx);
  EXPECT_EQ(std::strtod(rows[1][1].c_str(), nullptr), direct.rate);
  EXPECT_EQ(std::strtod(rows[1][2].c_str(), nullptr), direct.key_length);
}

TEST_F(CliTest, RenderingRoundTripsExactly) {
  const auto grid = make_grid(1e-5, 1.0, 7, true);
  const auto rows = sweep({}, default_security(), grid, Mode::finite, Baseline::passive, false);
  const auto parsed = parse_csv(render_csv(rows));
  ASSERT_EQ(parsed.size(), rows.size() + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& cells = parsed[i + 1];
    const auto& r = rows[i];
    EXPECT_EQ(std::strtod(cells[0].c_str(), nullptr), r.eta);
    EXPECT_EQ(std::strtod(cells[1].c_str(), nullptr), r.result.rate);
    EXPECT_EQ(std::strtod(cells[2].c_str(), nullptr), r.result.key_length);
    EXPECT_EQ(std::strtod(cells[3].c_str(), nullptr), r.result.n_z1_lower);
    EXPECT_EQ(std::strtod(cells[4].c_str(), nullptr), r.result.n_ph1_upper);
    EXPECT_EQ(std::strtod(cells[5].c_str(), nullptr), r.result.e_bit);
  }
  for (double x : {0.1, 1.0 / 3.0, 6.944444444444444e-23, 1e308, -2.5e-300}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
}

TEST_F(CliTest, MalformedJsonLeavesNoOutput) {
  const auto cfg = write("bad.json", "{\"protocol\": {\"q\": 0.1,,}");
  const auto out = (dir_ / "curve.csv").string();
  EXPECT_EQ(run({"keyrate", "--config", cfg, "--out", out}), kExitConfig);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(fs::exists(out + ".tmp"));
}

TEST_F(CliTest, ViolationsPrintedOnePerLine) {
  const auto cfg = write("c.json", R"({"protocol": {"q": 0.5, "mu_D": 0.6}})");
  EXPECT_EQ(run({"keyrate", "--config", cfg}), kExitConfig);
  const auto text = err_.str();
  EXPECT_NE(text.find("q must satisfy 0<q<0.5\n"), std::string::npos) << text;
  EXPECT_NE(text.find("mu_D must satisfy mu_D<mu_S\n"), std::string::npos) << text;
  EXPECT_TRUE(out_.str().empty());
}

TEST_F(CliTest, UnknownKeysAndBadTypesRejected) {
  EXPECT_EQ(run({"keyrate", "--config", write("a.json", R"({"protocl": {}})")}), kExitConfig);
  EXPECT_EQ(run({"keyrate", "--config", write("b.json", R"({"protocol": {"q": "x"}})")}),
            kExitConfig);
  EXPECT_EQ(run({"keyrate", "--config", write("c.json", R"({"mode": "fast"})")}), kExitConfig);
  EXPECT_EQ(run({"keyrate", "--config", write("d.json", "{}"), "--mode", "slow"}), kExitConfig);
}

TEST_F(CliTest, IoFailures) {
  EXPECT_EQ(run({"keyrate", "--config", (dir_ / "missing.json").string()}), kExitIo);
  const auto cfg = write("c.json", R"({"sweep": {"points": 1}, "optimize_each": false})");
  EXPECT_EQ(run({"keyrate", "--config", cfg, "--out", (dir_ / "no/such/dir/x.csv").string()}),
            kExitIo);
  EXPECT_THROW(write_atomic((dir_ / "no/such/dir/y").string(), "x"), IoError);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), kExitConfig);
  EXPECT_EQ(run({"keyrate"}), kExitConfig);
  EXPECT_EQ(run({"frobnicate", "--config", "x"}), kExitConfig);
  EXPECT_EQ(run({"--help"}), kExitOk);
}

TEST_F(CliTest, AtomicWriteReplacesContent) {
  const auto path = (dir_ / "f.txt").string();
  write_atomic(path, "first");
  write_atomic(path, "second");
  EXPECT_EQ(slurp(path), "second");
  EXPECT_FALSE(fs::exists(path + ".tmp"));
}

constexpr const char* kMcConfig = R"({
  "protocol": {"N": 20000, "p_Z": 0.75, "p_X": 0.25, "q": 0.25, "d": 1e-3, "delta_mis": 0},
  "security": {"eps": 1e-3, "eps_c": 1e-6, "xi": 10},
  "montecarlo": {"trials": 5, "seed": 42, "eta": 0.3, "channel_pulses": 200000}
})";

TEST_F(CliTest, McValidatePassesAndIsReproducible) {
  const auto cfg = write("mc.json", kMcConfig);
  const auto a = (dir_ / "a.json").string();
  const auto b = (dir_ / "b.json").string();
  ASSERT_EQ(run({"mc-validate", "--config", cfg, "--out", a}), kExitOk) << err_.str();
  ASSERT_EQ(run({"mc-validate", "--config", cfg, "--out", b}), kExitOk) << err_.str();
  const auto text = slurp(a);
  EXPECT_EQ(text, slurp(b));
  EXPECT_NE(text.find("\"max_abs_z\""), std::string::npos);
  EXPECT_NE(text.find("\"single_photon_z\""), std::string::npos);
  EXPECT_NE(text.find("\"seed\": 42"), std::string::npos);
}

TEST_F(CliTest, McValidateRejectsMisalignmentForChannelCheck) {
  const auto cfg = write("mc.json", R"({
    "protocol": {"delta_mis": 0.03},
    "montecarlo": {"check_channel": true, "check_bounds": false}
  })");
  EXPECT_EQ(run({"mc-validate", "--config", cfg}), kExitConfig);
  EXPECT_NE(err_.str().find("delta_mis"), std::string::npos);
}

TEST_F(CliTest, McValidateReportsStatisticalFailure) {
  // A one-pulse run that happens to produce a cross-click (probability about
  // 0.03) sits more than 5 sigma from its expectation.
  ProtocolParams p;
  p.pulses = 1;
  p.p_z = 0.75;
  p.p_x = 0.25;
  p.q = 0.25;
  p.dark_count = 0.0;
  p.misalignment = 0.0;
  std::uint64_t seed = 0;
  while (run_trial(p, {1.0}, seed).observed.n_cross[Intensity::signal] == 0.0) ++seed;

  const auto cfg = write("mc.json", R"({
    "protocol": {"p_Z": 0.75, "p_X": 0.25, "q": 0.25, "d": 0, "delta_mis": 0},
    "montecarlo": {"check_bounds": false, "channel_pulses": 1, "eta": 1.0, "seed": )" +
                                        std::to_string(seed) + "}}");
  EXPECT_EQ(run({"mc-validate", "--config", cfg}), kExitStatistics) << err_.str();
  EXPECT_NE(out_.str().find("\"pass\": false"), std::string::npos);
}

TEST(ConfigRoundTrip, SerializedConfigParsesBack) {
  RunConfig c;
  c.protocol.q = 0.2;
  c.protocol.pulses = 123456789012ULL;
  c.mode = Mode::asymptotic;
  c.baseline = Baseline::active_approx;
  c.sweep.points = 7;
  c.optimizer.pz_range = {0.6, 0.95};
  const auto back = parse_config(config_to_json(c));
  EXPECT_EQ(back.protocol.q, 0.2);
  EXPECT_EQ(back.protocol.pulses, 123456789012ULL);
  EXPECT_EQ(back.mode, Mode::asymptotic);
  EXPECT_EQ(back.baseline, Baseline::active_approx);
  EXPECT_EQ(back.sweep.points, 7u);
  EXPECT_EQ(back.optimizer.pz_range.lo, 0.6);
  EXPECT_TRUE(validate_config(back).empty());
}

}  // namespace
