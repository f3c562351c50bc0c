#include "porosity/gaussian_process.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "porosity/errors.h"

namespace porosity {

GaussianProcess::GaussianProcess(std::vector<std::vector<double>> points,
                                 std::vector<double> values, KernelParams kernel)
    : points_(std::move(points)), kernel_(std::move(kernel)) {
  const std::size_t n = points_.size();
  if (n == 0) throw ParamError("a Gaussian process needs at least one observation");
  if (values.size() != n) throw ParamError("one value per observed point required");
  const std::size_t dims = points_.front().size();
  for (const auto& p : points_) {
    if (p.size() != dims) throw ParamError("observed points differ in dimension");
  }
  if (kernel_.length_scales.size() != dims) throw ParamError("one length scale per dimension required");
  if (!(kernel_.signal_variance > 0.0)) throw ParamError("signal variance must be > 0");
  for (double l : kernel_.length_scales) {
    if (!(l > 0.0)) throw ParamError("length scales must be > 0");
  }

  double sum = 0.0;
  for (double v : values) sum += v;
  prior_mean_ = sum / static_cast<double>(n);
  Eigen::VectorXd centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = values[i] - prior_mean_;

  Eigen::MatrixXd k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = covariance(points_[i], points_[j]);
    }
  }
  double jitter = kernel_.jitter;
  while (true) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter * kernel_.signal_variance;
    cholesky_.compute(kj);
    if (cholesky_.info() == Eigen::Success &&
        cholesky_.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0) {
      break;
    }
    jitter *= 10.0;
    if (jitter > 1.0) {
      throw NumericalError("kernel matrix is not positive definite even with jitter 1");
    }
  }
  kernel_.jitter = jitter;
  alpha_ = cholesky_.solve(centred);
  const Eigen::VectorXd diag = cholesky_.matrixL().toDenseMatrix().diagonal();
  log_marginal_likelihood_ = -0.5 * centred.dot(alpha_) - diag.array().log().sum() -
                             0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

double GaussianProcess::covariance(std::span<const double> a, std::span<const double> b) const {
  double r2 = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double z = (a[d] - b[d]) / kernel_.length_scales[d];
    r2 += z * z;
  }
  return kernel_.signal_variance * std::exp(-0.5 * r2);
}

Posterior GaussianProcess::posterior(std::span<const double> query) const {
  if (query.size() != kernel_.length_scales.size()) {
    throw ParamError("query dimension does not match the surrogate");
  }
  const std::size_t n = points_.size();
  Eigen::VectorXd kq(n);
  for (std::size_t i = 0; i < n; ++i) kq[i] = covariance(points_[i], query);
  Posterior post;
  post.mean = prior_mean_ + kq.dot(alpha_);
  const Eigen::VectorXd v = cholesky_.matrixL().solve(kq);
  const double var = kernel_.signal_variance - v.squaredNorm();
  post.std = var > 0.0 ? std::sqrt(var) : 0.0;
  return post;
}

GaussianProcess fit_surrogate(const std::vector<std::vector<double>>& points,
                              const std::vector<double>& values) {
  if (points.empty()) throw ParamError("cannot fit a surrogate without observations");
  const std::size_t dims = points.front().size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  if (!(var > 0.0)) var = 1.0;

  static constexpr double kMultipliers[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::optional<GaussianProcess> best;
  auto consider = [&](const KernelParams& kernel) {
    try {
      GaussianProcess gp(points, values, kernel);
      if (!best || gp.log_marginal_likelihood() > best->log_marginal_likelihood()) {
        best = std::move(gp);
      }
    } catch (const NumericalError&) {
    }
  };
  for (double ls : kMultipliers) {
    for (double sv : kMultipliers) {
      consider({var * sv, std::vector<double>(dims, 0.3 * ls), 1e-6});
    }
  }
  if (!best) throw NumericalError("no surrogate hyperparameters give a usable kernel matrix");
  for (std::size_t d = 0; d < dims; ++d) {
    const KernelParams base = best->kernel();
    for (double m : kMultipliers) {
      if (m == 1.0) continue;
      KernelParams kernel = base;
      kernel.length_scales[d] *= m;
      kernel.jitter = 1e-6;
      consider(kernel);
    }
  }
  return std::move(*best);
}

double expected_improvement(const Posterior& posterior, double f_min) {
  const double gain = f_min - posterior.mean;
  if (!(posterior.std > 0.0)) return std::max(gain, 0.0);
  const double z = gain / posterior.std;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(gain * cdf + posterior.std * pdf, 0.0);
}

double expected_improvement(const GaussianProcess& gp, std::span<const double> query, double f_min) {
  return expected_improvement(gp.posterior(query), f_min);
}

}  // namespace porosity
