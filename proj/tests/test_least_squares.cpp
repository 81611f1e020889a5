#include <doctest.h>

#include <cmath>
#include <random>

#include "trapnoise/errors.hpp"
#include "trapnoise/least_squares.hpp"

using namespace trapnoise;

namespace {

WeightedProblem line_problem(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& s) {
  WeightedProblem p;
  p.names = {"a", "b"};
  p.transforms = {ParamTransform::identity(), ParamTransform::identity()};
  p.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  p.sigma = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
  p.model = [x](const Eigen::VectorXd& q) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) m[static_cast<Eigen::Index>(i)] = q[0] + q[1] * x[i];
    return m;
  };
  return p;
}

}  // namespace

TEST_CASE("weighted straight line against the closed-form solution") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> us(0.1, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> x, y, s;
    for (int i = 0; i < 12; ++i) {
      x.push_back(0.5 * i);
      s.push_back(us(rng));
      y.push_back(1.5 - 0.7 * x.back() + s.back() * noise(rng));
    }
    // Normal-equation sums.
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = 1.0 / (s[i] * s[i]);
      S += w;
      Sx += w * x[i];
      Sy += w * y[i];
      Sxx += w * x[i] * x[i];
      Sxy += w * x[i] * y[i];
    }
    const double det = S * Sxx - Sx * Sx;
    const double a = (Sxx * Sy - Sx * Sxy) / det;
    const double b = (S * Sxy - Sx * Sy) / det;
    double chi2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) chi2 += std::pow((y[i] - a - b * x[i]) / s[i], 2);
    const double red = chi2 / (x.size() - 2.0);

    Eigen::VectorXd start(2);
    start << 0.0, 0.0;
    const auto fit = weighted_least_squares(line_problem(x, y, s), start);
    CHECK(fit.converged);
    CHECK(fit.params[0] == doctest::Approx(a).epsilon(1e-7));
    CHECK(fit.params[1] == doctest::Approx(b).epsilon(1e-7));
    CHECK(fit.chi2 == doctest::Approx(chi2).epsilon(1e-9));
    CHECK(fit.covariance(0, 0) == doctest::Approx(Sxx / det * red).epsilon(1e-5));
    CHECK(fit.covariance(1, 1) == doctest::Approx(S / det * red).epsilon(1e-5));
    CHECK(fit.covariance(0, 1) == doctest::Approx(-Sx / det * red).epsilon(1e-5));
    CHECK(fit.stderr_of(1) == doctest::Approx(std::sqrt(S / det * red)).epsilon(1e-5));
  }
}

TEST_CASE("parameter transforms round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-30.0, 30.0), up(1e-6, 1e6), ub(0.0, 1.0);
  const auto id = ParamTransform::identity();
  const auto pos = ParamTransform::positive();
  const auto bnd = ParamTransform::bounded(10.0, 200.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(id.to_natural(id.to_internal(x)) == x);
    const double p = up(rng);
    CHECK(pos.to_natural(pos.to_internal(p)) == doctest::Approx(p).epsilon(1e-13));
    const double t = 10.0 + 190.0 * (0.001 + 0.998 * ub(rng));
    CHECK(bnd.to_natural(bnd.to_internal(t)) == doctest::Approx(t).epsilon(1e-12));
    // Any internal value maps inside the bounds.
    const double z = bnd.to_natural(u(rng));
    CHECK(z >= 10.0);
    CHECK(z <= 200.0);
    CHECK(pos.to_natural(u(rng)) > 0.0);
  }
  CHECK_THROWS_AS(pos.to_internal(0.0), DomainError);
  CHECK_THROWS_AS(bnd.to_internal(10.0), DomainError);
  CHECK_THROWS_AS(bnd.to_internal(250.0), DomainError);
}

TEST_CASE("natural Jacobian matches the analytic derivative") {
  WeightedProblem p;
  p.names = {"A", "k"};
  p.transforms = {ParamTransform::positive(), ParamTransform::identity()};
  std::vector<double> x{0.0, 0.3, 0.7, 1.1, 2.0};
  p.y = Eigen::VectorXd::Ones(5);
  p.sigma = Eigen::VectorXd::Constant(5, 0.2);
  p.model = [x](const Eigen::VectorXd& q) {
    Eigen::VectorXd m(5);
    for (int i = 0; i < 5; ++i) m[i] = q[0] * std::exp(-q[1] * x[i]);
    return m;
  };
  Eigen::VectorXd q(2);
  q << 2.5, 0.8;
  const auto J = natural_jacobian(p, q);
  for (int i = 0; i < 5; ++i) {
    const double e = std::exp(-q[1] * x[i]);
    CHECK(J(i, 0) == doctest::Approx(-e / 0.2).epsilon(1e-8));
    CHECK(J(i, 1) == doctest::Approx(q[0] * x[i] * e / 0.2).epsilon(1e-7).scale(1e-12));
  }
}

TEST_CASE("nonlinear fit recovers exact parameters through transforms") {
  WeightedProblem p;
  p.names = {"A", "T"};
  p.transforms = {ParamTransform::positive(), ParamTransform::bounded(1.0, 100.0)};
  std::vector<double> x;
  for (int i = 0; i < 20; ++i) x.push_back(i * 5.0);
  auto f = [x](const Eigen::VectorXd& q) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
      m[static_cast<Eigen::Index>(i)] = q[0] * std::exp(-x[i] / q[1]);
    return m;
  };
  Eigen::VectorXd truth(2);
  truth << 3e4, 23.0;
  p.y = f(truth);
  p.sigma = (0.01 * p.y.array()).matrix();
  p.model = f;
  Eigen::VectorXd start(2);
  start << 1e3, 60.0;
  const auto fit = weighted_least_squares(p, start);
  CHECK(fit.params[0] == doctest::Approx(3e4).epsilon(1e-8));
  CHECK(fit.params[1] == doctest::Approx(23.0).epsilon(1e-8));
  CHECK(fit.chi2 < 1e-12);
}

TEST_CASE("least squares input errors") {
  std::vector<double> x{0, 1, 2}, y{1, 2, 3}, s{1, 1, 1};
  Eigen::VectorXd start(2);
  start << 0.0, 0.0;
  auto p = line_problem(x, y, s);
  p.sigma[1] = 0.0;
  CHECK_THROWS_AS(weighted_least_squares(p, start), DataError);

  auto one = line_problem({0.0}, {1.0}, {1.0});
  CHECK_THROWS_AS(weighted_least_squares(one, start), DataError);

  auto wrong = line_problem(x, y, s);
  wrong.transforms.pop_back();
  CHECK_THROWS_AS(weighted_least_squares(wrong, start), DomainError);

  auto nan = line_problem(x, y, s);
  nan.y[0] = NAN;
  CHECK_THROWS_AS(weighted_least_squares(nan, start), NumericalError);
}
