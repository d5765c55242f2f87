#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using paththerm::cli::run;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const auto dir = fs::temp_directory_path() / "paththerm_cli_tests" / (std::string(info->test_suite_name()) + "." +
                                                                       info->name() + "." + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

nlohmann::json load_json(const fs::path& path) { return nlohmann::json::parse(slurp(path)); }

class EnvGuard {
 public:
  explicit EnvGuard(const char* value) {
    if (const char* old = std::getenv("PATHTHERM_SEED")) saved_ = old;
    if (value) {
      setenv("PATHTHERM_SEED", value, 1);
    } else {
      unsetenv("PATHTHERM_SEED");
    }
  }
  ~EnvGuard() {
    if (saved_.empty()) {
      unsetenv("PATHTHERM_SEED");
    } else {
      setenv("PATHTHERM_SEED", saved_.c_str(), 1);
    }
  }

 private:
  std::string saved_;
};

}  // namespace

TEST(CliConfig, ParsesFlatKeyValue) {
  const auto entries = paththerm::cli::parse_config_text("# comment\nt-final = 5\n\nparam = k1=2  # trailing\nseed=3\n");
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].first, "t_final");
  EXPECT_EQ(entries[0].second, "5");
  EXPECT_EQ(entries[1].second, "k1=2");
  EXPECT_EQ(entries[2].first, "seed");
  EXPECT_THROW(paththerm::cli::parse_config_text("no equals sign"), paththerm::cli::UsageError);
}

TEST(CliConfig, FlagsOverrideConfigOverridePreset) {
  const EnvGuard env(nullptr);
  const auto dir = scratch("out");
  const auto conf = dir / "run.conf";
  std::ofstream(conf) << "preset = birth_death\nwindow = 2\nseed = 5\nt_final = 50\nparam = k_f=3\n";
  const auto r = invoke({"simulate", "--config", conf.string(), "--seed", "9", "--out", dir.string(), "--no-trajectory"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load_json(dir / "run.json");
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["seed_source"], "flag");
  EXPECT_EQ(j["window"], 2.0);
  EXPECT_EQ(j["t_final"], 50.0);
  EXPECT_EQ(j["params"]["k_f"], 3.0);
  EXPECT_EQ(j["x0"], std::vector<int>{10});
}

TEST(CliConfig, SeedFallsBackToEnvironment) {
  const EnvGuard env("4242");
  const auto dir = scratch("out");
  ASSERT_EQ(invoke({"simulate", "--preset", "birth_death", "--t-final", "1", "--out", dir.string()}).code, 0);
  const auto j = load_json(dir / "run.json");
  EXPECT_EQ(j["seed"], 4242);
  EXPECT_EQ(j["seed_source"], "env");
  EXPECT_NE(slurp(dir / "trajectory.jsonl").find("\"seed\":4242"), std::string::npos);
}

TEST(CliConfig, UsageErrorsExitOne) {
  const auto dir = scratch("out");
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"stationary"}).code, 1);
  EXPECT_EQ(invoke({"stationary", "--preset", "nosuch"}).code, 1);
  EXPECT_EQ(invoke({"stationary", "--preset", "birth_death", "--model", "x.net"}).code, 1);
  EXPECT_EQ(invoke({"simulate", "--preset", "birth_death", "--window", "5", "--t-final", "1"}).code, 1);
  EXPECT_EQ(invoke({"simulate", "--preset", "birth_death", "--mode", "fast"}).code, 1);
  EXPECT_EQ(invoke({"stationary", "--preset", "birth_death", "--param", "bogus=1"}).code, 1);
  std::ofstream(dir / "bad.conf") << "colour = blue\n";
  EXPECT_EQ(invoke({"stationary", "--config", (dir / "bad.conf").string()}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(CliInspect, MultigraphVerdicts) {
  auto r = invoke({"inspect", "--preset", "xy_pair", "--require-simple"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("MULTIGRAPH"), std::string::npos);
  r = invoke({"inspect", "--preset", "xy_pair"});
  EXPECT_EQ(r.code, 0);
  r = invoke({"inspect", "--preset", "birth_death", "--require-simple"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verdict: simple"), std::string::npos);
}

TEST(CliInspect, MalformedFileReportsLocation) {
  const auto dir = scratch("out");
  const auto file = dir / "bad.net";
  std::ofstream(file) << "species X\nreaction X -> + : 1\n";
  const auto r = invoke({"inspect", "--model", file.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.net: line 2"), std::string::npos) << r.err;
}

TEST(CliStationary, ReportsBalanceAndBoundary) {
  const auto dir = scratch("out");
  ASSERT_EQ(invoke({"stationary", "--preset", "birth_death", "--out", dir.string(), "--check"}).code, 0);
  auto j = load_json(dir / "stationary_report.json");
  EXPECT_LE(j["detailed_balance_residual"].get<double>(), 1e-10);
  EXPECT_LT(j["boundary_mass"].get<double>(), 1e-10);
  EXPECT_NEAR(j["entropy_production_rate"].get<double>(), 0.0, 1e-12);

  ASSERT_EQ(invoke({"stationary", "--preset", "schlogl", "--out", dir.string(), "--check"}).code, 0);
  j = load_json(dir / "stationary_report.json");
  EXPECT_LE(j["detailed_balance_residual"].get<double>(), 1e-10);
  // 201 states plus the header.
  const auto csv = slurp(dir / "stationary.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 202);

  const auto r = invoke({"stationary", "--preset", "driven_cycle", "--out", dir.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("detailed balance violated"), std::string::npos);
  j = load_json(dir / "stationary_report.json");
  EXPECT_GT(j["detailed_balance_residual"].get<double>(), 1e-3);
  EXPECT_EQ(j["detailed_balance"], "detailed balance violated");
  EXPECT_EQ(invoke({"stationary", "--preset", "driven_cycle", "--out", dir.string(), "--check"}).code, 3);
}

TEST(CliStationary, SmallBoxIsNumericalFailure) {
  const auto dir = scratch("out");
  const auto r = invoke({"stationary", "--preset", "schlogl", "--xmax", "40", "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("truncation too small"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "stationary_report.json"));
}

TEST(CliSimulate, MillionEventsMatchCme) {
  const auto dir = scratch("out");
  const auto r = invoke({"simulate", "--preset", "birth_death", "--events", "1000000", "--compare", "--check",
                         "--no-trajectory", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load_json(dir / "simulate_report.json");
  EXPECT_EQ(j["events"], 1000000);
  EXPECT_LT(j["tv_distance"].get<double>(), 0.02);
  EXPECT_FALSE(fs::exists(dir / "trajectory.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "histogram.csv"));
}

TEST(CliSimulate, ZeroReactionModelIsFlagged) {
  const auto dir = scratch("out");
  std::ofstream(dir / "still.net") << "species X\n";
  const auto r = invoke({"simulate", "--model", (dir / "still.net").string(), "--xmax", "4", "--x0", "2", "--out",
                         dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("absorbed"), std::string::npos);
  const auto j = load_json(dir / "simulate_report.json");
  EXPECT_TRUE(j["absorbed"].get<bool>());
  EXPECT_EQ(j["events"], 0);
}

TEST(CliSimulate, SameSeedSameBytes) {
  const auto a = scratch("a");
  const auto b = scratch("b");
  for (const auto& dir : {a, b}) {
    ASSERT_EQ(invoke({"simulate", "--preset", "schlogl", "--t-final", "20", "--seed", "11", "--mode", "two_stage",
                      "--out", dir.string()})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(a / "trajectory.jsonl"), slurp(b / "trajectory.jsonl"));
  EXPECT_EQ(slurp(a / "histogram.csv"), slurp(b / "histogram.csv"));
  EXPECT_FALSE(slurp(a / "trajectory.jsonl").empty());
}

TEST(CliFt, SchloglLumpedIsDegenerate) {
  const auto dir = scratch("out");
  const auto r = invoke({"ft", "--preset", "schlogl", "--kind", "lumped", "--n-windows", "2000", "--out", dir.string(),
                         "--check"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load_json(dir / "ft_report.json");
  EXPECT_TRUE(j["degenerate"].get<bool>());
  EXPECT_TRUE(j["slope"].is_null());
  EXPECT_EQ(j["n_samples"], 2000);
  EXPECT_NEAR(j["mean"].get<double>(), 0.0, 1e-12);
}

TEST(CliFt, DrivenCycleSlopeCoversOne) {
  const auto dir = scratch("out");
  const auto r = invoke({"ft", "--preset", "driven_cycle", "--n-windows", "30000", "--jobs", "2", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load_json(dir / "ft_report.json");
  for (const char* key : {"kind", "n_samples", "slope", "slope_ci", "ks_stat", "p_value", "histogram"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  const double lo = j["slope_ci"][0], hi = j["slope_ci"][1];
  EXPECT_LE(lo, 1.0);
  EXPECT_GE(hi, 1.0);
  EXPECT_LT(j["p_value"].get<double>(), 0.01);
  EXPECT_TRUE(j["within_3sigma"].get<bool>());
  const auto csv = slurp(dir / "zeta_histogram.csv");
  EXPECT_EQ(csv.rfind("bin_left,bin_right,count\n", 0), 0u);
}

TEST(CliFt, ConditionalKindIsUsageError) {
  EXPECT_EQ(invoke({"ft", "--preset", "birth_death", "--kind", "conditional", "--out",
                    scratch("out").string()})
                .code,
            1);
}

TEST(CliReversibility, SchloglAndDrivenCycle) {
  const auto dir = scratch("out");
  ASSERT_EQ(invoke({"reversibility", "--preset", "schlogl", "--xmax", "30", "--steps", "4", "--check", "--out",
                    dir.string()})
                .code,
            0);
  auto j = load_json(dir / "reversibility_report.json");
  EXPECT_LE(j["max_gap"].get<double>(), 1e-10);

  EXPECT_EQ(invoke({"reversibility", "--preset", "driven_cycle", "--steps", "3", "--check", "--out", dir.string()}).code,
            3);
  j = load_json(dir / "reversibility_report.json");
  EXPECT_GT(j["max_gap"].get<double>(), 0.1);

  ASSERT_EQ(invoke({"reversibility", "--preset", "schlogl", "--xmax", "30", "--steps", "0", "--out", dir.string()}).code,
            0);
  EXPECT_EQ(load_json(dir / "reversibility_report.json")["max_gap"], 0.0);
}
