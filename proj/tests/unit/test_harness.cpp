#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "logsub/config.hpp"
#include "logsub/error.hpp"
#include "logsub/harness.hpp"
#include "logsub/report.hpp"

using namespace logsub;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "grid": {"n": 4096, "overrides": {"decoupling": {"n": 4096}, "recoupling": {"n": 4096}, "lp_sweep": {"n": 16384}}},
  "local": {"level_offsets": [4, 5, 6]}
})";

HarnessConfig small() { return parse_config(kSmall); }

const Check* find_check(const Report& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("logsub_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Config, DefaultsAndEcho) {
  const HarnessConfig d = parse_config("");
  EXPECT_EQ(d.resolution.n, std::size_t{1} << 18);
  EXPECT_EQ(d.experiments, experiment_names());
  EXPECT_EQ(experiment_names().size(), 9u);
  const HarnessConfig s = small();
  const HarnessConfig back = parse_config(config_to_json(s));
  EXPECT_EQ(config_to_json(back), config_to_json(s));
  EXPECT_EQ(resolution_for(s, "decoupling").n, 4096u);
  EXPECT_EQ(resolution_for(s, "lp_sweep").n, 16384u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"bogus": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"grid": {"n": 1000}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"params": {"gamma": 0.5}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiments": ["nope"]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"kind": "nope"}})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/logsub.json"), ConfigError);
  EXPECT_THROW(verify("nope", small()), ConfigError);
}

TEST(Harness, EmptyExperimentListGivesEmptyBundle) {
  const HarnessConfig cfg = parse_config(R"({"experiments": []})");
  const auto reports = run_all(cfg);
  EXPECT_TRUE(reports.empty());
  const fs::path dir = scratch("empty");
  write_bundle(dir, reports, false);
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
}

TEST(Harness, PointwiseIdentityControl) {
  HarnessConfig cfg = small();
  const Report r = verify_pointwise(cfg);
  EXPECT_TRUE(r.passed()) << (r.failed_check() ? r.failed_check()->name : "");
  const Check* c = find_check(r, "identity_control");
  ASSERT_NE(c, nullptr);
  EXPECT_LE(c->value, std::pow(2.0, cfg.params.d * cfg.params.lambda / 2.0));
  EXPECT_TRUE(r.provisional);
  EXPECT_FALSE(r.series.empty());
  EXPECT_FALSE(r.histogram.empty());
}

TEST(Harness, WeightedControlAndComposition) {
  const Report r = verify_weighted_multiplier(small());
  EXPECT_TRUE(r.passed()) << (r.failed_check() ? r.failed_check()->name : "");
  const Check* ctl = find_check(r, "unimodular_constant_weight_control");
  ASSERT_NE(ctl, nullptr);
  EXPECT_LE(ctl->value, 1.0 + 1e-10);
  ASSERT_NE(find_check(r, "stage_composition"), nullptr);
}

TEST(Harness, MaximalClosedForm) {
  const Report r = verify_maximal_lr(small());
  EXPECT_TRUE(r.passed()) << (r.failed_check() ? r.failed_check()->name : "");
  const Check* c = find_check(r, "constant_weight_closed_form");
  ASSERT_NE(c, nullptr);
  EXPECT_LE(c->value, 1e-10);
}

TEST(Harness, SweepPlancherelAtTwo) {
  HarnessConfig cfg = small();
  cfg.sweep.ps = {2.0};
  const Report r = lp_sweep(cfg);
  const Check* c = find_check(r, "plancherel_p2");
  ASSERT_NE(c, nullptr);
  EXPECT_TRUE(c->pass);
  EXPECT_LE(c->value, 1.0 + 1e-10);
}

TEST(Harness, RefinementRecordsDrift) {
  HarnessConfig cfg = small();
  cfg.refine = true;
  const Report r = verify_forward_weighted(cfg);
  EXPECT_FALSE(r.provisional);
  EXPECT_TRUE(r.drift.present);
  EXPECT_EQ(r.drift.kind, "du_halving");
  EXPECT_LE(r.drift.relative, cfg.drift_limit);
}

TEST(Harness, DeterministicUnderFixedSeed) {
  const HarnessConfig cfg = small();
  const std::string a = to_json(verify_decoupling(cfg), false);
  const std::string b = to_json(verify_decoupling(cfg), false);
  EXPECT_EQ(a, b);
}

TEST(Harness, MiyachiReportOnModel) {
  const LogParams p = LogParams::defaults();
  const Report r = miyachi_report(RadialSymbol::model(2.0, 1.0), p, 6.0, 14.0, 6);
  EXPECT_TRUE(r.passed()) << (r.failed_check() ? r.failed_check()->name : "");
  EXPECT_NE(find_check(r, "mikhlin_ratio_increasing"), nullptr);
}

TEST(Report, BundleFilesAndFormats) {
  Report r;
  r.name = "demo";
  r.members = {{"a#0", 1.5, 1.0, 0, 100}, {"b#1", 2.5, 1.2, 0, 100}};
  finalize_members(r);
  r.series = {{0.0, 1.0}, {1.0, 2.0}};
  r.histogram = log_histogram({1.0, 2.0, 3.0}, 4);
  EXPECT_EQ(r.constant, 2.5);
  EXPECT_TRUE(r.passed());
  set_drift(r, "du_halving", 2.5, 2.6);
  EXPECT_FALSE(r.provisional);
  EXPECT_NEAR(r.drift.relative, 0.04, 1e-12);
  for (bool csv : {false, true}) {
    const fs::path dir = scratch(csv ? "csv" : "json");
    write_bundle(dir, {r}, csv);
    EXPECT_TRUE(fs::exists(dir / (csv ? "demo.csv" : "demo.json")));
    EXPECT_TRUE(fs::exists(dir / "demo_ratio.csv"));
    EXPECT_TRUE(fs::exists(dir / "demo_hist.csv"));
    EXPECT_TRUE(fs::exists(dir / "summary.txt"));
  }
  r.add_check("forced", 2.0, 1.0, "<=");
  EXPECT_FALSE(r.passed());
  ASSERT_NE(r.failed_check(), nullptr);
  EXPECT_EQ(r.failed_check()->name, "forced");
  EXPECT_NE(summary_table({r}).find("FAIL"), std::string::npos);
  std::vector<SeriesPoint> many(10000, {0.0, 1.0});
  EXPECT_LE(thin_series(many).size(), 4096u);
}

#ifdef LOGSUB_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const int status = std::system((std::string(LOGSUB_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("logsub_cfg_" + name + ".json");
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path ok = write_config("ok", kSmall);
  const fs::path out = scratch("cli");
  EXPECT_EQ(run_cli("verify forward_weighted --config " + ok.string() + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "forward_weighted.json"));
  EXPECT_EQ(run_cli("verify forward_weighted --format csv --config " + ok.string() + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "forward_weighted.csv"));

  const fs::path strict = write_config("strict", R"({"grid": {"n": 4096}, "drift_limit": 1e-15})");
  EXPECT_EQ(run_cli("verify forward_weighted --refine --config " + strict.string() + " --out " + out.string()), 1);

  const fs::path bad = write_config("bad", R"({"grid": {"n": 1000}})");
  EXPECT_EQ(run_cli("verify forward_weighted --config " + bad.string() + " --out " + out.string()), 2);
  EXPECT_EQ(run_cli("verify nope --config " + ok.string() + " --out " + out.string()), 2);
  EXPECT_EQ(run_cli("run-all --format xml --out " + out.string()), 2);

  const fs::path none = write_config("none", R"({"experiments": []})");
  const fs::path empty_out = scratch("cli_empty");
  EXPECT_EQ(run_cli("run-all --config " + none.string() + " --out " + empty_out.string()), 0);
  EXPECT_TRUE(fs::exists(empty_out / "summary.txt"));
  EXPECT_EQ(run_cli("partition --config " + ok.string() + " --out " + out.string()), 0);
}
#endif
