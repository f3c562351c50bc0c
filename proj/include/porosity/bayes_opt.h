#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "porosity/hyperparams.h"

namespace porosity {

struct Evaluation {
  int iteration = 0;  // 1-based
  HyperparamPoint point;
  double objective = 0.0;  // +inf when the evaluation failed
  double elapsed_ms = 0.0;
};

struct TuneResult {
  HyperparamPoint best_point;
  double best_value = 0.0;
  std::vector<Evaluation> trace;
  int budget_used = 0;
};

struct BayesOptOptions {
  int initial_points = 5;       // Latin-hypercube design
  int random_candidates = 2000; // uniform EI candidates per iteration
  int local_candidates = 200;   // Gaussian perturbations of the incumbent
  double local_radius = 0.05;   // in unit-box coordinates
};

using Objective = std::function<double(const HyperparamPoint&)>;

// Sequential GP/EI minimization. The evaluations of a run with budget b are
// a prefix of the run with budget b + 1 (same seed). An objective that throws
// or returns a non-finite value is recorded as +inf and excluded from the
// surrogate. Throws ParamError when budget < 1.
TuneResult bayes_optimize(const HyperparamSpace& space, const Objective& objective, int budget,
                          std::uint64_t seed, const BayesOptOptions& options = {});

// One JSON object per line: {iteration, point, objective, elapsed_ms}.
// A failed evaluation is written with objective null.
void write_trace_jsonl(const TuneResult& result, std::ostream& out, bool include_timing = true);

}  // namespace porosity
