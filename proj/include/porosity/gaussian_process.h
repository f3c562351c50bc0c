#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace porosity {

// Squared-exponential kernel with per-dimension length scales.
struct KernelParams {
  double signal_variance = 1.0;
  std::vector<double> length_scales;
  double jitter = 1e-6;  // diagonal nugget, relative to signal_variance
};

struct Posterior {
  double mean = 0.0;
  double std = 0.0;
};

// Gaussian-process regression with a constant prior mean (the mean of the
// observed values). The jitter is escalated x10 until the kernel matrix
// factorizes; NumericalError if it never does.
class GaussianProcess {
 public:
  GaussianProcess(std::vector<std::vector<double>> points, std::vector<double> values,
                  KernelParams kernel);

  Posterior posterior(std::span<const double> query) const;
  double log_marginal_likelihood() const { return log_marginal_likelihood_; }

  const KernelParams& kernel() const { return kernel_; }  // jitter as used
  double prior_mean() const { return prior_mean_; }
  std::size_t size() const { return points_.size(); }

 private:
  double covariance(std::span<const double> a, std::span<const double> b) const;

  std::vector<std::vector<double>> points_;
  KernelParams kernel_;
  double prior_mean_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> cholesky_;
  Eigen::VectorXd alpha_;  // K^-1 (y - prior_mean)
  double log_marginal_likelihood_ = 0.0;
};

// Fits the kernel hyperparameters by maximizing the log marginal likelihood
// over multiplicative grids around length scale 0.3 and the sample variance
// of `values`: first a joint scan, then one pass per dimension.
GaussianProcess fit_surrogate(const std::vector<std::vector<double>>& points,
                              const std::vector<double>& values);

// Expected improvement below f_min for a Gaussian posterior; with zero
// std it degenerates to max(f_min - mean, 0).
double expected_improvement(const Posterior& posterior, double f_min);
double expected_improvement(const GaussianProcess& gp, std::span<const double> query, double f_min);

}  // namespace porosity
