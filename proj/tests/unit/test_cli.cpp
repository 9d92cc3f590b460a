#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gridshield/cas.hpp"
#include "gridshield/cli/cli.hpp"
#include "gridshield/cli/report.hpp"
#include "gridshield/errors.hpp"
#include "gridshield/oracle.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
namespace gs = gridshield;
namespace cli = gridshield::cli;
using gs::testing::data_path;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "gridshield");
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gridshield_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string data(const std::string& rel) { return data_path(rel).string(); }

  fs::path dir_;
};

}  // namespace

TEST(Budgets, Parse) {
  EXPECT_EQ(cli::parse_budgets("1..5"), (std::vector<int>{1, 2, 3, 4, 5}));
  EXPECT_EQ(cli::parse_budgets("0,2..3,7"), (std::vector<int>{0, 2, 3, 7}));
  EXPECT_THROW(cli::parse_budgets(""), gs::InputError);
  EXPECT_THROW(cli::parse_budgets("-1"), gs::InputError);
  EXPECT_THROW(cli::parse_budgets("3..1"), gs::InputError);
  EXPECT_THROW(cli::parse_budgets("x"), gs::InputError);
}

TEST(Metrics, AvoidedShare) {
  const auto cas = gs::testing::make_cas({{"a", "b"}, {"c", "d"}, {"e", "f"}}, {80, 20, 0}, 2);
  std::vector<gs::ProtectionPlan> plans(3);
  plans[0].remaining_worst_case_mw = 80.0;
  plans[1].remaining_worst_case_mw = 20.0;
  plans[2].remaining_worst_case_mw = 0.0;
  const auto report = cli::compute_metrics(cas, plans);
  EXPECT_EQ(report.rows[0].avoided_lost_load_pct, 0.0);
  EXPECT_EQ(report.rows[1].avoided_lost_load_pct, 75.0);
  EXPECT_EQ(report.rows[2].avoided_lost_load_pct, 100.0);
  EXPECT_EQ(report.baseline_mw, 80.0);
}

TEST(Metrics, AllExcludedAnnotation) {
  auto cas = gs::testing::make_cas({{"a", "b"}}, {80}, 2, false);
  std::vector<gs::ProtectionPlan> plans(1);
  auto report = cli::compute_metrics(cas, plans);
  EXPECT_EQ(report.rows[0].avoided_lost_load_pct, 100.0);
  EXPECT_FALSE(report.rows[0].annotation.empty());
  cas.complete = true;
  report = cli::compute_metrics(cas, plans);
  EXPECT_TRUE(report.rows[0].annotation.empty());
  EXPECT_THROW(cli::compute_metrics(gs::testing::make_cas({}, {}, 2), plans), gs::InputError);
}

TEST(Metrics, ZeroBaseline) {
  const auto cas = gs::testing::make_cas({{"a", "b"}}, {0}, 2);
  std::vector<gs::ProtectionPlan> plans(1);
  plans[0].remaining_worst_case_mw = 0.0;
  EXPECT_EQ(cli::compute_metrics(cas, plans).rows[0].avoided_lost_load_pct, 0.0);
}

TEST_F(CliTest, EnumerateToy) {
  const auto r = run({"enumerate", "--grid", data("toy2.json"), "--zmax", "1", "--out", path("c.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto list = gs::load_cas_list(path("c.json"));
  EXPECT_EQ(list.records.size(), 1u);
}

TEST_F(CliTest, EnumerateIeee9) {
  auto r = run({"enumerate", "--grid", data("ieee9.json"), "--zmax", "2", "--max-scenarios",
                "unbounded", "--out", path("all.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(gs::load_cas_list(path("all.json")).records.size(), 55u);

  r = run({"enumerate", "--grid", data("ieee9.json"), "--zmax", "2", "--max-scenarios", "10",
           "--out", path("ten.json"), "--dump-dispatch", path("dispatch.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ten = gs::load_cas_list(path("ten.json"));
  EXPECT_EQ(ten.records.size(), 10u);
  EXPECT_FALSE(ten.complete);
  const auto dump = json::parse(gs::read_text_file(path("dispatch.json")));
  ASSERT_EQ(dump.size(), 1u);
  EXPECT_EQ(dump[0].at("scenarios").size(), 10u);
}

TEST_F(CliTest, ProtectZeroBudget) {
  ASSERT_EQ(run({"enumerate", "--grid", data("ieee9.json"), "--zmax", "2", "--out", path("c.json")}).code, 0);
  const auto r = run({"protect", "--cas", path("c.json"), "--budgets", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  ASSERT_EQ(doc.at("rows").size(), 1u);
  EXPECT_EQ(doc["rows"][0].at("avoided_lost_load_pct").get<double>(), 0.0);
}

TEST_F(CliTest, ProtectIeee9AgainstOracle) {
  ASSERT_EQ(run({"enumerate", "--grid", data("ieee9.json"), "--zmax", "2", "--max-scenarios",
                 "unbounded", "--out", path("c.json")}).code, 0);
  const auto js = run({"protect", "--cas", path("c.json"), "--budgets", "1..5", "--no-timings",
                       "--plan-dir", path("plans"), "--alternatives", "3"});
  const auto csv = run({"protect", "--cas", path("c.json"), "--budgets", "1..5", "--no-timings",
                        "--format", "csv"});
  ASSERT_EQ(js.code, 0) << js.err;
  ASSERT_EQ(csv.code, 0) << csv.err;
  const auto doc = json::parse(js.out);
  ASSERT_EQ(doc.at("rows").size(), 5u);
  // cutting either line of the worst pair is equally good at x_max = 1
  const auto plan1 = json::parse(gs::read_text_file(path("plans/plan_x1.json")));
  EXPECT_EQ(plan1.at("protected").at("branches"), json({"L8_9"}));
  ASSERT_EQ(plan1.at("alternatives").size(), 1u);
  EXPECT_EQ(plan1["alternatives"][0].at("protected").at("branches"), json({"L9_4"}));

  std::istringstream lines(csv.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "x_max,avoided_lost_load_pct,excluded_cas_count,consecutive_excluded,"
                  "remaining_worst_case_mw,runtime_s");
  const auto grid = gs::load_grid(data("ieee9.json"));
  double prev_pct = -1.0, prev_rem = 1e300;
  int prev_excl = -1;
  for (int i = 0; i < 5; ++i) {
    const auto& row = doc["rows"][i];
    std::getline(lines, line);
    std::ostringstream expect;
    expect << row["x_max"].get<int>() << ','
           << cli::format_number(row["avoided_lost_load_pct"].get<double>()) << ','
           << row["excluded_cas_count"].get<int>() << ',' << row["consecutive_excluded"].get<int>()
           << ',' << cli::format_number(row["remaining_worst_case_mw"].get<double>()) << ",0";
    EXPECT_EQ(line, expect.str());

    const double pct = row["avoided_lost_load_pct"], rem = row["remaining_worst_case_mw"];
    const int excl = row["excluded_cas_count"];
    EXPECT_GE(pct, prev_pct);
    EXPECT_LE(rem, prev_rem);
    EXPECT_GE(excl, prev_excl);
    prev_pct = pct, prev_rem = rem, prev_excl = excl;

    EXPECT_NEAR(rem, gs::brute_force_trilevel(grid, i + 1, 2).worst_case_lost_load_mw, 1e-6);
    EXPECT_TRUE(fs::exists(dir_ / "plans" / ("plan_x" + std::to_string(i + 1) + ".json")));
  }
}

TEST_F(CliTest, ProtectMergesInputs) {
  for (const char* cfg : {"high_load", "low_load"}) {
    const auto r = run({"enumerate", "--grid", data("ieee30.json"), "--config",
                        data(std::string("configs/ieee30_") + cfg + ".json"), "--zmax", "1",
                        "--max-scenarios", "unbounded", "--out", path(std::string(cfg) + ".json")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const auto r = run({"protect", "--cas", path("high_load.json"), "--cas", path("low_load.json"),
                      "--budgets", "1..2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("configurations"), json({"high_load", "low_load"}));
  EXPECT_EQ(doc.at("rows").size(), 2u);
}

TEST_F(CliTest, SweepWritesCasAndReport) {
  const auto r = run({"sweep", "--grid", data("ieee9.json"), "--zmax", "2", "--budgets", "0..2",
                      "--cas-out", path("c.json"), "--out", path("r.csv"), "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(gs::load_cas_list(path("c.json")).records.size(), 55u);
  EXPECT_TRUE(fs::exists(path("r.csv")));
}

TEST_F(CliTest, ReportsAreIndependentOfJobs) {
  std::string first;
  for (const char* jobs : {"1", "2", "0"}) {
    const auto r = run({"sweep", "--grid", data("ieee9.json"), "--zmax", "2", "--budgets", "1..5",
                        "--no-timings", "--jobs", jobs});
    ASSERT_EQ(r.code, 0) << r.err;
    if (first.empty()) first = r.out;
    EXPECT_EQ(r.out, first);
  }
}

TEST_F(CliTest, Oracle) {
  auto r = run({"oracle", "--grid", data("toy2.json"), "--xmax", "1", "--zmax", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("remaining_worst_case_mw").get<double>(), 0.0);
  EXPECT_EQ(doc.at("protected").at("branches"), json({"AB"}));

  r = run({"oracle", "--grid", data("ieee9.json"), "--xmax", "0", "--zmax", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out).at("remaining_worst_case_mw").get<double>(), 125.0);

  r = run({"oracle", "--grid", data("ieee30.json"), "--xmax", "5", "--zmax", "3"});
  EXPECT_EQ(r.code, cli::kGuardRefusal);
  EXPECT_NE(r.err.find("refused"), std::string::npos);
}

TEST_F(CliTest, Validate) {
  auto r = run({"validate", "--grid", data("cigre_mv.json"), "--config",
                data("configs/cigre_open_switches.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ok"), std::string::npos);

  std::ofstream(path("bad.json")) << R"({"name": "bad", "reference_bus": "A",
    "buses": [{"id": "A", "demand_mw": 0}],
    "branches": [{"id": "K1", "from": "A", "to": "Z", "susceptance": 1,
                  "flow_limit_mw": 1, "attackable": true, "in_service": true}],
    "generators": []})";
  r = run({"validate", "--grid", path("bad.json")});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("K1"), std::string::npos);
}

TEST_F(CliTest, InputErrors) {
  EXPECT_EQ(run({}).code, cli::kInputError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kInputError);
  EXPECT_EQ(run({"enumerate", "--grid", path("missing.json"), "--zmax", "1"}).code, cli::kInputError);
  EXPECT_EQ(run({"enumerate", "--grid", data("toy2.json"), "--zmax", "3"}).code, cli::kInputError);
  EXPECT_EQ(run({"enumerate", "--grid", data("toy2.json"), "--zmax", "1", "--max-scenarios", "lots"}).code,
            cli::kInputError);
  EXPECT_EQ(run({"sweep", "--grid", data("toy2.json"), "--zmax", "1", "--budgets", "two"}).code,
            cli::kInputError);
  EXPECT_EQ(run({"sweep", "--grid", data("toy2.json"), "--zmax", "1", "--budgets", "1",
                 "--format", "xml"}).code,
            cli::kInputError);
  EXPECT_EQ(run({"--help"}).code, cli::kSuccess);
}
