#include "porosity/bayes_opt.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "porosity/errors.h"
#include "porosity/gaussian_process.h"
#include "porosity/random.h"

namespace porosity {
namespace {

constexpr double kFailed = std::numeric_limits<double>::infinity();

std::vector<std::vector<double>> latin_hypercube(std::size_t count, std::size_t dims, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> design(count, std::vector<double>(dims));
  std::vector<std::size_t> strata(count);
  for (std::size_t d = 0; d < dims; ++d) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    std::shuffle(strata.begin(), strata.end(), rng);
    for (std::size_t i = 0; i < count; ++i) {
      design[i][d] = (static_cast<double>(strata[i]) + unit(rng)) / static_cast<double>(count);
    }
  }
  return design;
}

double timed_evaluate(const Objective& objective, const HyperparamPoint& point, double& elapsed_ms) {
  const auto start = std::chrono::steady_clock::now();
  double value = kFailed;
  try {
    value = objective(point);
    if (!std::isfinite(value)) value = kFailed;
  } catch (const std::exception&) {
    value = kFailed;
  }
  elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return value;
}

}  // namespace

TuneResult bayes_optimize(const HyperparamSpace& space, const Objective& objective, int budget,
                          std::uint64_t seed, const BayesOptOptions& options) {
  if (budget < 1) throw ParamError("optimization budget must be >= 1");
  if (options.initial_points < 1) throw ParamError("need at least one initial point");
  const std::size_t dims = space.dimensions();
  Rng rng = make_stream(seed, stream_id(StreamDomain::kBayesOpt, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, options.local_radius);

  TuneResult result;
  std::vector<std::vector<double>> observed_u;
  std::vector<double> observed_y;
  auto record = [&](const HyperparamPoint& point) {
    Evaluation e;
    e.iteration = static_cast<int>(result.trace.size()) + 1;
    e.point = point;
    e.objective = timed_evaluate(objective, point, e.elapsed_ms);
    if (e.objective != kFailed) {
      observed_u.push_back(space.to_unit(point));
      observed_y.push_back(e.objective);
    }
    result.trace.push_back(std::move(e));
  };
  auto already_evaluated = [&](const HyperparamPoint& point) {
    return std::any_of(result.trace.begin(), result.trace.end(),
                       [&](const Evaluation& e) { return e.point == point; });
  };

  // The full design is drawn regardless of the budget so that runs with
  // different budgets share their prefix.
  const auto design = latin_hypercube(options.initial_points, dims, rng);
  for (const auto& u : design) {
    if (static_cast<int>(result.trace.size()) >= budget) break;
    record(space.from_unit(u));
  }

  while (static_cast<int>(result.trace.size()) < budget) {
    std::vector<std::vector<double>> candidates;
    candidates.reserve(options.random_candidates + options.local_candidates);
    for (int c = 0; c < options.random_candidates; ++c) {
      std::vector<double> u(dims);
      for (auto& x : u) x = unit(rng);
      candidates.push_back(std::move(u));
    }
    if (observed_y.empty()) {
      record(space.from_unit(candidates.front()));
      continue;
    }
    const auto incumbent = static_cast<std::size_t>(
        std::min_element(observed_y.begin(), observed_y.end()) - observed_y.begin());
    for (int c = 0; c < options.local_candidates; ++c) {
      std::vector<double> u = observed_u[incumbent];
      for (auto& x : u) x = std::clamp(x + jitter(rng), 0.0, 1.0);
      candidates.push_back(std::move(u));
    }

    const GaussianProcess gp = fit_surrogate(observed_u, observed_y);
    const double f_min = observed_y[incumbent];
    std::vector<std::pair<double, std::size_t>> scored;
    std::vector<HyperparamPoint> points;
    scored.reserve(candidates.size());
    points.reserve(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      points.push_back(space.from_unit(candidates[c]));
      // Score the snapped point so integer dimensions are judged where they
      // will actually be evaluated.
      scored.emplace_back(expected_improvement(gp, space.to_unit(points.back()), f_min), c);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const HyperparamPoint* next = nullptr;
    for (const auto& [ei, c] : scored) {
      if (!already_evaluated(points[c])) {
        next = &points[c];
        break;
      }
    }
    // Every candidate was seen before (tiny discrete space): re-evaluate the best.
    record(next ? *next : points[scored.front().second]);
  }

  result.budget_used = static_cast<int>(result.trace.size());
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    if (result.trace[i].objective < result.trace[best].objective) best = i;
  }
  result.best_point = result.trace[best].point;
  result.best_value = result.trace[best].objective;
  return result;
}

void write_trace_jsonl(const TuneResult& result, std::ostream& out, bool include_timing) {
  for (const auto& e : result.trace) {
    nlohmann::ordered_json line;
    line["iteration"] = e.iteration;
    nlohmann::ordered_json point = nlohmann::ordered_json::object();
    for (std::size_t d = 0; d < e.point.names.size(); ++d) {
      const double v = e.point.values[d];
      // Integer parameters are written without a fractional part.
      if (v == std::trunc(v) && std::abs(v) < 1e15) {
        point[e.point.names[d]] = static_cast<std::int64_t>(v);
      } else {
        point[e.point.names[d]] = v;
      }
    }
    line["point"] = point;
    if (std::isfinite(e.objective)) {
      line["objective"] = e.objective;
    } else {
      line["objective"] = nullptr;
    }
    line["elapsed_ms"] = include_timing ? e.elapsed_ms : 0.0;
    out << line.dump() << '\n';
  }
}

}  // namespace porosity
