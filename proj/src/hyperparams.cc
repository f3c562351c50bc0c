#include "porosity/hyperparams.h"

#include <algorithm>
#include <cmath>

#include "porosity/errors.h"

namespace porosity {

double HyperparamPoint::operator[](std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw ParamError("hyperparameter point has no '" + std::string(name) + "'");
}

HyperparamSpace::HyperparamSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
  if (params_.empty()) throw ParamError("a search space needs at least one parameter");
  for (const auto& p : params_) {
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper)) {
      throw ParamError("parameter '" + p.name + "' needs finite bounds with lower < upper");
    }
    if (p.scale == ParamScale::kLog && !(p.lower > 0.0)) {
      throw ParamError("log-scaled parameter '" + p.name + "' needs a positive lower bound");
    }
  }
}

HyperparamPoint HyperparamSpace::from_unit(std::span<const double> u) const {
  if (u.size() != params_.size()) throw ParamError("unit coordinate has the wrong dimension");
  HyperparamPoint point;
  for (std::size_t d = 0; d < params_.size(); ++d) {
    const auto& p = params_[d];
    const double t = std::clamp(u[d], 0.0, 1.0);
    double v = 0.0;
    if (p.kind == ParamKind::kInteger) {
      // Equal-width cells per integer so every grid value is reachable.
      const double lo = std::ceil(p.lower);
      const double hi = std::floor(p.upper);
      v = std::min(hi, lo + std::floor(t * (hi - lo + 1.0)));
    } else if (p.scale == ParamScale::kLog) {
      // Endpoints map exactly onto the bounds; exp(log(x)) need not equal x.
      if (t == 0.0) {
        v = p.lower;
      } else if (t == 1.0) {
        v = p.upper;
      } else {
        v = std::exp(std::log(p.lower) + t * (std::log(p.upper) - std::log(p.lower)));
        v = std::clamp(v, p.lower, p.upper);
      }
    } else {
      v = p.lower + t * (p.upper - p.lower);
    }
    point.names.push_back(p.name);
    point.values.push_back(v);
  }
  return point;
}

std::vector<double> HyperparamSpace::to_unit(const HyperparamPoint& point) const {
  std::vector<double> u(params_.size());
  for (std::size_t d = 0; d < params_.size(); ++d) {
    const auto& p = params_[d];
    const double v = point[p.name];
    if (p.kind == ParamKind::kInteger) {
      const double lo = std::ceil(p.lower);
      const double hi = std::floor(p.upper);
      u[d] = (v - lo + 0.5) / (hi - lo + 1.0);  // centre of the integer's cell
    } else if (p.scale == ParamScale::kLog) {
      u[d] = (std::log(v) - std::log(p.lower)) / (std::log(p.upper) - std::log(p.lower));
    } else {
      u[d] = (v - p.lower) / (p.upper - p.lower);
    }
  }
  return u;
}

void HyperparamSpace::validate(const HyperparamPoint& point) const {
  for (const auto& p : params_) {
    const double v = point[p.name];
    if (!(v >= p.lower && v <= p.upper)) {
      throw ParamError("hyperparameter '" + p.name + "' = " + std::to_string(v) +
                       " outside [" + std::to_string(p.lower) + ", " + std::to_string(p.upper) + "]");
    }
    if (p.kind == ParamKind::kInteger && std::round(v) != v) {
      throw ParamError("hyperparameter '" + p.name + "' must be an integer");
    }
  }
}

HyperparamSpace forest_search_space() {
  return HyperparamSpace({
      {"min_leaf", ParamKind::kInteger, 1, 20, ParamScale::kLinear},
      {"features_per_split", ParamKind::kInteger, 1, 8, ParamScale::kLinear},
  });
}

HyperparamSpace boosting_search_space(int min_leaf_upper) {
  if (min_leaf_upper < 2 || min_leaf_upper > 90) {
    throw ParamError("boosting min_leaf upper bound must lie in [2, 90]");
  }
  return HyperparamSpace({
      {"n_trees", ParamKind::kInteger, 10, 500, ParamScale::kLinear},
      {"learning_rate", ParamKind::kContinuous, 0.001, 1.0, ParamScale::kLog},
      {"max_splits", ParamKind::kInteger, 1, 20, ParamScale::kLinear},
      {"min_leaf", ParamKind::kInteger, 1, static_cast<double>(min_leaf_upper), ParamScale::kLinear},
  });
}

}  // namespace porosity
