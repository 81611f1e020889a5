#include "trapnoise/least_squares.hpp"

#include <cmath>
#include <cstdio>

#include "trapnoise/errors.hpp"

namespace trapnoise {

double ParamTransform::to_internal(double x) const {
  switch (kind) {
    case Kind::identity:
      return x;
    case Kind::log:
      if (!(x > 0.0)) throw DomainError("positive parameter must be > 0");
      return std::log(x);
    case Kind::bounded: {
      const double t = (x - lo) / (hi - lo);
      if (!(t > 0.0 && t < 1.0)) throw DomainError("bounded parameter outside its open range");
      return std::log(t / (1.0 - t));
    }
  }
  return x;
}

double ParamTransform::to_natural(double z) const {
  switch (kind) {
    case Kind::identity:
      return z;
    case Kind::log:
      return std::exp(z);
    case Kind::bounded:
      return lo + (hi - lo) / (1.0 + std::exp(-z));
  }
  return z;
}

double LsqFit::chi2_red() const {
  const auto m = static_cast<std::size_t>(params.size());
  return n_data > m ? chi2 / static_cast<double>(n_data - m) : 0.0;
}

double LsqFit::stderr_of(std::size_t i) const {
  const double v = covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

namespace {

Eigen::VectorXd natural_from(const WeightedProblem& p, const Eigen::VectorXd& z) {
  Eigen::VectorXd x(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) x[i] = p.transforms[i].to_natural(z[i]);
  return x;
}

Eigen::VectorXd weighted_residuals(const WeightedProblem& p, const Eigen::VectorXd& natural) {
  const Eigen::VectorXd m = p.model(natural);
  return ((p.y - m).array() / p.sigma.array()).matrix();
}

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

Eigen::MatrixXd natural_jacobian(const WeightedProblem& problem, const Eigen::VectorXd& params,
                                 double rel_step) {
  const Eigen::Index n = problem.y.size();
  const Eigen::Index m = params.size();
  Eigen::MatrixXd J(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double h = rel_step * std::max(std::abs(params[j]), 1e-8);
    Eigen::VectorXd xp = params, xm = params;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (weighted_residuals(problem, xp) - weighted_residuals(problem, xm)) / (2.0 * h);
  }
  return J;
}

LsqFit weighted_least_squares(const WeightedProblem& problem, const Eigen::VectorXd& start,
                              const LsqOptions& opts) {
  const Eigen::Index m = start.size();
  const Eigen::Index n = problem.y.size();
  if (static_cast<Eigen::Index>(problem.transforms.size()) != m)
    throw DomainError("least squares: transform count does not match parameter count");
  if (problem.sigma.size() != n) throw DomainError("least squares: sigma size mismatch");
  if ((problem.sigma.array() <= 0.0).any()) throw DataError("uncertainties must be > 0");
  if (n < m) throw DataError("fewer data points than parameters");

  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z[i] = problem.transforms[i].to_internal(start[i]);

  auto residual_at = [&](const Eigen::VectorXd& zz) {
    return weighted_residuals(problem, natural_from(problem, zz));
  };
  Eigen::VectorXd r = residual_at(z);
  if (!all_finite(r)) throw NumericalError("least squares: non-finite residuals at start point");
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  LsqFit fit;
  bool converged = false;
  int it = 0;
  std::string why = "iteration limit reached";
  for (; it < opts.max_iterations && !converged; ++it) {
    Eigen::MatrixXd J(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double h = opts.fd_step * std::max(1.0, std::abs(z[j]));
      Eigen::VectorXd zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      J.col(j) = (residual_at(zp) - residual_at(zm)) / (2.0 * h);
    }
    const Eigen::VectorXd g = J.transpose() * r;
    const Eigen::MatrixXd A = J.transpose() * J;
    if (g.lpNorm<Eigen::Infinity>() <= opts.gtol * std::max(cost, 1e-300) || cost == 0.0) {
      converged = true;
      why = "gradient below tolerance";
      break;
    }
    bool stepped = false;
    while (lambda < 1e20) {
      Eigen::MatrixXd Ad = A;
      for (Eigen::Index i = 0; i < m; ++i) Ad(i, i) += lambda * std::max(A(i, i), 1e-12);
      const Eigen::VectorXd dz = Ad.ldlt().solve(-g);
      if (!dz.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd zn = z + dz;
      const Eigen::VectorXd rn = residual_at(zn);
      const double cn = all_finite(rn) ? rn.squaredNorm() : INFINITY;
      if (cn <= cost) {
        const double drop = cost - cn;
        z = zn;
        r = rn;
        const double old = cost;
        cost = cn;
        lambda = std::max(lambda * 0.1, 1e-15);
        stepped = true;
        if (drop <= opts.ftol * old) {
          converged = true;
          why = "relative reduction below ftol";
        } else if (dz.norm() <= opts.xtol * (z.norm() + opts.xtol)) {
          converged = true;
          why = "step below xtol";
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      converged = true;
      why = "no further decrease possible";
      break;
    }
  }
  if (!converged) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "least squares did not converge in %d iterations (chi2 = %.6g, lambda = %.3g)",
                  opts.max_iterations, cost, lambda);
    throw NumericalError(buf);
  }
  fit.names = problem.names;
  fit.params = natural_from(problem, z);
  fit.residuals = r;
  fit.chi2 = cost;
  fit.n_data = static_cast<std::size_t>(n);
  fit.iterations = it;
  fit.converged = true;
  fit.message = why;
  const Eigen::MatrixXd Jn = natural_jacobian(problem, fit.params);
  const Eigen::MatrixXd info = Jn.transpose() * Jn;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(info);
  fit.covariance = cod.pseudoInverse() * fit.chi2_red();
  return fit;
}

}  // namespace trapnoise
