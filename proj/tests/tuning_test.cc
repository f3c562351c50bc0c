#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "porosity/bayes_opt.h"
#include "porosity/cross_validation.h"
#include "porosity/dataset.h"
#include "porosity/errors.h"
#include "porosity/gaussian_process.h"
#include "porosity/hyperparams.h"
#include "porosity/objectives.h"
#include "test_support.h"

namespace porosity {
namespace {

Table sample_train() { return to_table(training_records(embedded_sample())); }

TEST(KFold, PartitionLaw) {
  for (std::size_t n : {2U, 3U, 10U, 25U, 101U}) {
    for (int k : {2, 3, 5, 10}) {
      if (static_cast<std::size_t>(k) > n) continue;
      for (std::uint64_t seed : {0ULL, 1ULL, 77ULL}) {
        const auto folds = kfold_partition(n, k, seed);
        ASSERT_EQ(folds.size(), static_cast<std::size_t>(k));
        std::set<std::size_t> seen;
        std::size_t lo = n;
        std::size_t hi = 0;
        for (const auto& f : folds) {
          lo = std::min(lo, f.size());
          hi = std::max(hi, f.size());
          for (auto i : f) {
            EXPECT_LT(i, n);
            EXPECT_TRUE(seen.insert(i).second);
          }
        }
        EXPECT_EQ(seen.size(), n);
        EXPECT_LE(hi - lo, 1U);
      }
    }
  }
  EXPECT_THROW(kfold_partition(3, 4, 0), ParamError);
  EXPECT_THROW(kfold_partition(3, 1, 0), ParamError);
}

TEST(KFold, LeaveOneOutOfTrainingMean) {
  Table t({testing::numeric("x")});
  for (double y : {0.0, 2.0}) t.add_row(std::span(&y, 1), y);
  const Learner mean_learner = [](const Table& fold) -> Predictor {
    double m = 0.0;
    for (double y : fold.responses()) m += y;
    m /= static_cast<double>(fold.rows());
    return [m](std::span<const double>) { return m; };
  };
  EXPECT_EQ(kfold_cv_loss(t, mean_learner, 2, 5), 4.0);
  Table zeros({testing::numeric("x")});
  for (int i = 0; i < 6; ++i) {
    const double x = i;
    zeros.add_row(std::span(&x, 1), 0.0);
  }
  const Learner zero = [](const Table&) -> Predictor { return [](std::span<const double>) { return 0.0; }; };
  EXPECT_EQ(kfold_cv_loss(zeros, zero, 3, 1), 0.0);
}

TEST(HyperparamSpace, IntegerGridFullyReachable) {
  const HyperparamSpace space = forest_search_space();
  std::set<double> leaf;
  std::set<double> fps;
  for (int i = 0; i <= 1000; ++i) {
    const double u = i / 1000.0;
    const double unit[] = {u, u};
    const auto p = space.from_unit(unit);
    EXPECT_NO_THROW(space.validate(p));
    leaf.insert(p["min_leaf"]);
    fps.insert(p["features_per_split"]);
  }
  EXPECT_EQ(leaf.size(), 20U);
  EXPECT_EQ(fps.size(), 8U);
}

TEST(HyperparamSpace, BoostingSpaceAndRoundTrip) {
  const HyperparamSpace space = boosting_search_space();
  ASSERT_EQ(space.dimensions(), 4U);
  const double lo[] = {0, 0, 0, 0};
  const double hi[] = {1, 1, 1, 1};
  const auto a = space.from_unit(lo);
  const auto b = space.from_unit(hi);
  EXPECT_EQ(a.values, (std::vector<double>{10, 0.001, 1, 1}));
  EXPECT_EQ(b["n_trees"], 500);
  EXPECT_EQ(b["learning_rate"], 1.0);
  EXPECT_EQ(b["max_splits"], 20);
  EXPECT_EQ(b["min_leaf"], 90);
  const double mid[] = {0.5, 0.5, 0.5, 0.5};
  EXPECT_NEAR(space.from_unit(mid)["learning_rate"], std::sqrt(0.001), 1e-12);
  for (const auto& p : {a, b, space.from_unit(mid)}) {
    const auto back = space.from_unit(space.to_unit(p));
    for (std::size_t d = 0; d < p.values.size(); ++d) {
      if (space.params()[d].kind == ParamKind::kInteger) {
        EXPECT_EQ(back.values[d], p.values[d]);
      } else {
        EXPECT_NEAR(back.values[d], p.values[d], 1e-12 * p.values[d]);
      }
    }
  }
}

TEST(HyperparamSpace, Validation) {
  EXPECT_THROW(HyperparamSpace({}), ParamError);
  EXPECT_THROW(HyperparamSpace({{"a", ParamKind::kContinuous, 1, 1}}), ParamError);
  EXPECT_THROW(HyperparamSpace({{"a", ParamKind::kContinuous, 0, 1, ParamScale::kLog}}), ParamError);
  const HyperparamSpace space = forest_search_space();
  EXPECT_THROW(space.validate({{"min_leaf", "features_per_split"}, {5, 9}}), ParamError);
  EXPECT_THROW(space.validate({{"min_leaf", "features_per_split"}, {5.5, 3}}), ParamError);
  EXPECT_THROW(boosting_search_space(91), ParamError);
  HyperparamPoint p{{"a"}, {1}};
  EXPECT_THROW(p["b"], ParamError);
}

TEST(Objectives, ForestObjectiveIsRefitOobError) {
  const Table train = sample_train();
  const HyperparamPoint point{{"min_leaf", "features_per_split"}, {3, 4}};
  const double value = objective_rf(train, point, 11);
  EXPECT_EQ(value, objective_rf(train, point, 11));
  ForestParams p;
  p.n_trees = 300;
  p.min_leaf = 3;
  p.features_per_split = 4;
  EXPECT_EQ(value, oob_mse(fit_random_forest(train, p, 11), train));
  EXPECT_THROW(objective_rf(train, {{"min_leaf", "features_per_split"}, {3, 9}}, 11), ParamError);
}

TEST(Objectives, BoostingObjectiveIsLogOnePlusCvLoss) {
  const Table train = sample_train();
  const HyperparamPoint point{{"n_trees", "learning_rate", "max_splits", "min_leaf"}, {50, 0.2, 4, 3}};
  const Learner learner = [](const Table& fold) -> Predictor {
    auto m = std::make_shared<BoostedModel>(fit_lsboost(fold, BoostParams{50, 0.2, 4, 3}, 2));
    return [m](std::span<const double> x) { return m->predict(x); };
  };
  EXPECT_NEAR(objective_gbt(train, point, 2), std::log1p(kfold_cv_loss(train, learner, 10, 2)), 1e-15);
}

TEST(Objectives, MinLeafCapFitsSmallestFold) {
  EXPECT_EQ(boosting_min_leaf_upper(25, 10), 22);
  EXPECT_EQ(boosting_min_leaf_upper(1000, 10), 90);
  EXPECT_EQ(boosting_min_leaf_upper(100, 10), 90);
  EXPECT_EQ(boosting_min_leaf_upper(60, 10), 54);
}

// Direct Gaussian conditioning for a 3-point, 1-D problem: K is inverted by
// cofactors, independent of any factorization.
TEST(GaussianProcess, MatchesClosedFormConditioning) {
  const std::vector<std::vector<double>> x = {{0.1}, {0.45}, {0.9}};
  const std::vector<double> y = {1.0, -0.5, 2.0};
  KernelParams kp;
  kp.signal_variance = 1.7;
  kp.length_scales = {0.3};
  kp.jitter = 1e-6;
  const GaussianProcess gp(x, y, kp);
  const double mu0 = (1.0 - 0.5 + 2.0) / 3.0;
  auto k = [&](double a, double b) { return 1.7 * std::exp(-0.5 * (a - b) * (a - b) / 0.09); };
  double K[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) K[i][j] = k(x[i][0], x[j][0]) + (i == j ? 1e-6 * 1.7 : 0.0);
  }
  const double det = K[0][0] * (K[1][1] * K[2][2] - K[1][2] * K[2][1]) -
                     K[0][1] * (K[1][0] * K[2][2] - K[1][2] * K[2][0]) +
                     K[0][2] * (K[1][0] * K[2][1] - K[1][1] * K[2][0]);
  double inv[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (K[r0][c0] * K[r1][c1] - K[r0][c1] * K[r1][c0]) / det;
    }
  }
  for (double q : {0.0, 0.3, 0.45, 0.7, 1.0}) {
    double kq[3];
    for (int i = 0; i < 3; ++i) kq[i] = k(x[i][0], q);
    double mean = mu0;
    double var = 1.7;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        mean += kq[i] * inv[i][j] * (y[j] - mu0);
        var -= kq[i] * inv[i][j] * kq[j];
      }
    }
    const double query[] = {q};
    const Posterior post = gp.posterior(query);
    EXPECT_NEAR(post.mean, mean, 1e-9) << q;
    EXPECT_NEAR(post.std, std::sqrt(std::max(var, 0.0)), 1e-6) << q;
  }
}

TEST(GaussianProcess, InterpolatesAndRevertsToPrior) {
  const std::vector<std::vector<double>> x = {{0.2, 0.2}, {0.8, 0.5}};
  const std::vector<double> y = {3.0, 5.0};
  KernelParams kp{2.0, {0.1, 0.1}, 1e-10};
  const GaussianProcess gp(x, y, kp);
  const Posterior at = gp.posterior(x[0]);
  EXPECT_NEAR(at.mean, 3.0, 1e-6);
  EXPECT_NEAR(at.std, 0.0, 1e-4);
  const double far[] = {50.0, -50.0};
  const Posterior p = gp.posterior(far);
  EXPECT_NEAR(p.mean, 4.0, 1e-12);
  EXPECT_NEAR(p.std, std::sqrt(2.0), 1e-12);
}

TEST(GaussianProcess, DuplicatePointsNeedJitterAndStillFactor) {
  const std::vector<std::vector<double>> x = {{0.5}, {0.5}, {0.5}};
  const GaussianProcess gp(x, {1.0, 1.0, 1.0}, KernelParams{1.0, {0.3}, 1e-12});
  EXPECT_GE(gp.kernel().jitter, 1e-12);
  const double q[] = {0.5};
  EXPECT_GE(gp.posterior(q).std, 0.0);
  EXPECT_THROW(GaussianProcess({}, {}, KernelParams{1.0, {}, 1e-6}), ParamError);
}

TEST(GaussianProcess, SurrogateFitIsUsable) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    x.push_back({t});
    y.push_back(std::sin(6 * t));
  }
  const GaussianProcess gp = fit_surrogate(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(gp.posterior(x[i]).mean, y[i], 1e-3);
  const GaussianProcess flat = fit_surrogate(x, {2, 2, 2, 2, 2});
  const double q[] = {0.6};
  EXPECT_NEAR(flat.posterior(q).mean, 2.0, 1e-9);
}

TEST(ExpectedImprovement, ClosedFormCases) {
  EXPECT_EQ(expected_improvement(Posterior{1.0, 0.0}, 1.0), 0.0);
  EXPECT_EQ(expected_improvement(Posterior{3.0, 0.0}, 1.0), 0.0);
  EXPECT_EQ(expected_improvement(Posterior{-1.0, 0.0}, 1.0), 2.0);
  EXPECT_NEAR(expected_improvement(Posterior{0.5, 1.0}, 0.5), 1.0 / std::sqrt(2 * std::numbers::pi), 1e-15);
  for (double mu : {-2.0, 0.0, 0.3, 4.0}) {
    for (double sd : {0.01, 0.5, 3.0}) EXPECT_GE(expected_improvement(Posterior{mu, sd}, 0.2), 0.0);
  }
}

HyperparamSpace unit_interval() { return HyperparamSpace({{"x", ParamKind::kContinuous, 0.0, 1.0}}); }

TEST(BayesOpt, FindsQuadraticMinimum) {
  const Objective f = [](const HyperparamPoint& p) { return (p["x"] - 0.3) * (p["x"] - 0.3); };
  const TuneResult r = bayes_optimize(unit_interval(), f, 30, 3);
  EXPECT_NEAR(r.best_point["x"], 0.3, 0.05);
  EXPECT_EQ(r.budget_used, 30);
  EXPECT_EQ(r.trace.size(), 30U);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : r.trace) best = std::min(best, e.objective);
  EXPECT_EQ(r.best_value, best);
}

TEST(BayesOpt, BudgetEdgeCasesAndConstantObjective) {
  const Objective c = [](const HyperparamPoint&) { return 7.0; };
  const TuneResult one = bayes_optimize(unit_interval(), c, 1, 0);
  ASSERT_EQ(one.trace.size(), 1U);
  EXPECT_EQ(one.best_value, 7.0);
  EXPECT_EQ(bayes_optimize(unit_interval(), c, 12, 0).best_value, 7.0);
  EXPECT_THROW(bayes_optimize(unit_interval(), c, 0, 0), ParamError);
}

TEST(BayesOpt, TracesAreNestedAndBestNonIncreasing) {
  const Objective f = [](const HyperparamPoint& p) { return std::cos(9 * p["x"]) + p["x"]; };
  double previous = std::numeric_limits<double>::infinity();
  std::vector<Evaluation> last;
  for (int budget = 1; budget <= 12; ++budget) {
    const TuneResult r = bayes_optimize(unit_interval(), f, budget, 21);
    for (std::size_t i = 0; i < last.size(); ++i) EXPECT_EQ(r.trace[i].point, last[i].point);
    EXPECT_LE(r.best_value, previous);
    previous = r.best_value;
    last = r.trace;
  }
}

TEST(BayesOpt, IntegerPointsStayOnGridAndFailuresAreRecorded) {
  const HyperparamSpace space = forest_search_space();
  const Objective f = [](const HyperparamPoint& p) {
    if (p["features_per_split"] == 8) throw NumericalError("degenerate");
    return std::abs(p["min_leaf"] - 4) + std::abs(p["features_per_split"] - 3);
  };
  const TuneResult r = bayes_optimize(space, f, 25, 5);
  std::set<std::vector<double>> distinct;
  for (const auto& e : r.trace) {
    EXPECT_NO_THROW(space.validate(e.point));
    distinct.insert(e.point.values);
    if (e.point["features_per_split"] == 8) EXPECT_TRUE(std::isinf(e.objective));
  }
  EXPECT_EQ(distinct.size(), r.trace.size());
  EXPECT_TRUE(std::isfinite(r.best_value));
}

TEST(BayesOpt, TraceJsonLines) {
  const Objective f = [](const HyperparamPoint& p) {
    if (p["x"] > 0.9) return std::numeric_limits<double>::quiet_NaN();
    return p["x"];
  };
  const TuneResult r = bayes_optimize(unit_interval(), f, 6, 1);
  std::ostringstream out;
  write_trace_jsonl(r, out, false);
  std::istringstream in(out.str());
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    ++count;
    EXPECT_EQ(j["iteration"], count);
    EXPECT_TRUE(j["point"].contains("x"));
    EXPECT_EQ(j["elapsed_ms"], 0.0);
    EXPECT_TRUE(j["objective"].is_number() || j["objective"].is_null());
  }
  EXPECT_EQ(count, 6);
}

}  // namespace
}  // namespace porosity
