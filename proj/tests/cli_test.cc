#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "porosity/boosting.h"
#include "porosity/cli.h"
#include "porosity/dataset.h"
#include "porosity/model_io.h"

namespace porosity {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "porosity");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("porosity_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST_F(CliTest, HelpAndUsageErrors) {
  const Result help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("tune-gbt"), std::string::npos);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"train-rf", "--bogus"}).code, 1);
  EXPECT_EQ(run({"sensitivity", "--type", "slag"}).code, 1);
  const Result bad_fraction = run({"split", "--fraction", "1.5"});
  EXPECT_EQ(bad_fraction.code, 1);
  EXPECT_EQ(count_lines(bad_fraction.err), 1U);
}

TEST_F(CliTest, SensitivityGrids) {
  const Result fly = run({"sensitivity", "--type", "fly_ash"});
  ASSERT_EQ(fly.code, 0) << fly.err;
  EXPECT_EQ(count_lines(fly.out), 26U);
  EXPECT_NE(fly.out.find("40,270"), std::string::npos);
  const auto mixes = cli::sensitivity_grid("fly_ash");
  ASSERT_EQ(mixes.size(), 25U);
  for (const auto& m : mixes) {
    EXPECT_EQ(m.w_b, 0.4);
    EXPECT_EQ(m.binder, 400);
    EXPECT_EQ(m.ca_fa, 2);
    EXPECT_EQ(m.sp, 0);
    EXPECT_EQ(m.ggbs, 0);
    EXPECT_EQ(m.curing_condition, CuringCondition::kAir);
  }
  EXPECT_EQ(cli::sensitivity_grid("ggbs").size(), 20U);
  EXPECT_EQ(cli::sensitivity_grid("ggbs").back().curing_days, 56);
}

TEST_F(CliTest, TrainEvaluateRoundTripIsBitExact) {
  const std::string model = path("gbt.json");
  const Result train = run({"train-gbt", "--model", model, "--seed", "3"});
  ASSERT_EQ(train.code, 0) << train.err;
  const Result eval = run({"evaluate", "--model", model, "--json"});
  ASSERT_EQ(eval.code, 0) << eval.err;
  const auto j = nlohmann::json::parse(eval.out);
  const Dataset all = embedded_sample();
  const BoostedModel in_process = fit_lsboost(to_table(training_records(all)), BoostParams{}, 3);
  ASSERT_EQ(j["predictions"].size(), all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(j["predictions"][i]["predicted"].get<double>(), in_process.predict(all.records[i]));
  }
}

TEST_F(CliTest, OutputsAreDeterministic) {
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(run({"train-rf", "--model", path(std::string(name) + ".json"), "--trees", "40"}).code, 0);
    ASSERT_EQ(run({"tune-gbt", "--budget", "6", "--trace", path(std::string(name) + ".jsonl"),
                   "--no-timing", "--model", path(std::string(name) + "_t.json")})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_EQ(slurp(path("a_t.json")), slurp(path("b_t.json")));
  EXPECT_EQ(count_lines(slurp(path("a.jsonl"))), 6U);
}

TEST_F(CliTest, SplitWritesTrainingColumn) {
  const Result r = run({"split", "--output", path("split.csv"), "--seed", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Dataset d = load_csv(path("split.csv"));
  EXPECT_EQ(d.size(), 34U);
  EXPECT_EQ(training_records(d).size(), 26U);
}

TEST_F(CliTest, ModelsReloadInDownstreamCommands) {
  const std::string rf = path("rf.json");
  ASSERT_EQ(run({"train-rf", "--model", rf, "--trees", "50"}).code, 0);
  const Result imp = run({"importance", "--model", rf, "--json"});
  ASSERT_EQ(imp.code, 0) << imp.err;
  EXPECT_EQ(nlohmann::json::parse(imp.out)["predictors"].size(), 8U);
  const Result pdp = run({"pdp", "--model", rf, "--feature", "curing_days"});
  ASSERT_EQ(pdp.code, 0) << pdp.err;
  EXPECT_EQ(count_lines(pdp.out), 51U);
  const Result pdp2 = run({"pdp", "--model", rf, "--feature", "fly_ash", "--feature2", "curing_condition",
                           "--grid", "4"});
  ASSERT_EQ(pdp2.code, 0) << pdp2.err;
  EXPECT_EQ(count_lines(pdp2.out), 9U);
  const Result sens = run({"sensitivity", "--type", "ggbs", "--model", rf});
  EXPECT_NE(sens.out.find("predicted_porosity"), std::string::npos);

  const std::string gbt = path("gbt.json");
  ASSERT_EQ(run({"train-gbt", "--model", gbt}).code, 0);
  EXPECT_EQ(run({"importance", "--model", gbt}).code, 1);
  EXPECT_EQ(run({"pdp", "--model", gbt, "--feature", "nope"}).code, 1);
}

TEST_F(CliTest, DataAndNumericalFailuresMapToExitCodes) {
  EXPECT_EQ(run({"train-rf", "--input", path("missing.csv")}).code, 2);
  EXPECT_EQ(run({"evaluate", "--model", path("missing.json")}).code, 2);
  std::ofstream(path("bad.csv")) << "mix_id,w_b\n1,0.4\n";
  EXPECT_EQ(run({"train-gbt", "--input", path("bad.csv")}).code, 2);
  std::ofstream(path("infeasible.csv")) << "cement,fly_ash,water\n2000,0,50\n";
  const Result r = run({"chemomech", "--input", path("infeasible.csv")});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(count_lines(r.err), 1U);
}

TEST_F(CliTest, ChemomechPlainTable) {
  std::ofstream(path("mixes.csv")) << "id,cement,fly_ash,water,porosity\nopc,350,0,192.5,11.8\nfa,280,70,192.5,10.2\n";
  const Result r = run({"chemomech", "--input", path("mixes.csv"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 2U);
  EXPECT_EQ(j["rows"][0]["branch"], "high_gypsum");
  EXPECT_NEAR(j["rows"][0]["porosity_pct"].get<double>(), 11.2864045, 1e-9);
  EXPECT_EQ(j["rows"][1]["branch"], "low_gypsum");
  EXPECT_EQ(j["comparison"]["m"], 2);
  const Result dataset = run({"chemomech", "--min-days", "365"});
  ASSERT_EQ(dataset.code, 0) << dataset.err;
  EXPECT_GT(count_lines(dataset.out), 1U);
}

}  // namespace
}  // namespace porosity
