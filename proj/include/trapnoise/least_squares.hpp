#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace trapnoise {

// How a natural parameter maps to the unconstrained space the optimiser
// walks in.
struct ParamTransform {
  enum class Kind { identity, log, bounded } kind = Kind::identity;
  double lo = 0.0;
  double hi = 0.0;

  static ParamTransform identity() { return {}; }
  static ParamTransform positive() { return {Kind::log, 0.0, 0.0}; }
  static ParamTransform bounded(double lo, double hi) { return {Kind::bounded, lo, hi}; }

  double to_internal(double natural) const;
  double to_natural(double internal) const;
};

// Weighted residual problem: r_i = (y_i - model_i(p)) / sigma_i.
struct WeightedProblem {
  std::vector<std::string> names;
  std::vector<ParamTransform> transforms;
  Eigen::VectorXd y;
  Eigen::VectorXd sigma;
  // Predictions for all data points at natural parameters.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> model;
};

struct LsqOptions {
  int max_iterations = 200;
  double ftol = 1e-15;
  double xtol = 1e-13;
  double gtol = 1e-12;
  double fd_step = 1e-6;
};

struct LsqFit {
  std::vector<std::string> names;
  Eigen::VectorXd params;      // natural
  Eigen::MatrixXd covariance;  // natural, scaled by chi2_red
  Eigen::VectorXd residuals;   // weighted
  double chi2 = 0.0;
  std::size_t n_data = 0;
  int iterations = 0;
  bool converged = false;
  std::string message;

  double chi2_red() const;
  double stderr_of(std::size_t i) const;
};

// Damped least squares (Levenberg-Marquardt with Marquardt scaling) on the
// transformed parameters, central-difference Jacobian. Throws NumericalError
// if max_iterations pass without convergence.
LsqFit weighted_least_squares(const WeightedProblem& problem, const Eigen::VectorXd& start,
                              const LsqOptions& opts = {});

// Central-difference Jacobian of the weighted residuals w.r.t. natural
// parameters.
Eigen::MatrixXd natural_jacobian(const WeightedProblem& problem, const Eigen::VectorXd& params,
                                 double rel_step = 1e-6);

}  // namespace trapnoise
