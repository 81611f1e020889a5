#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "trapnoise/errors.hpp"
#include "trapnoise/quadrature.hpp"

using namespace trapnoise;

TEST_CASE("Kronrod rule integrates polynomials of degree 31 exactly") {
  for (int p = 0; p <= 31; ++p) {
    const auto r = gauss_kronrod21([p](double x) { return std::pow(x, p); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
  }
}

TEST_CASE("adaptive integration against closed forms") {
  AdaptiveOptions o;
  o.rel_tol = 1e-12;
  const double b01[] = {0.0, 1.0};
  auto r = integrate_adaptive([](double x) { return std::sqrt(x); }, b01, o);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-11));

  const double bw[] = {0.0, 20.0 * M_PI};
  r = integrate_adaptive([](double x) { return std::sin(x) * std::sin(x); }, bw, o);
  CHECK(r.value == doctest::Approx(10.0 * M_PI).epsilon(1e-11));

  const double be[] = {0.0, 1.0, 50.0};
  r = integrate_adaptive([](double x) { return std::exp(-x) * std::cos(5.0 * x); }, be, o);
  CHECK(r.value == doctest::Approx(1.0 / 26.0).epsilon(1e-10));
}

TEST_CASE("adaptive integration agrees with double-exponential references") {
  AdaptiveOptions o;
  o.rel_tol = 1e-11;
  // Endpoint log singularity.
  auto f = [](double x) { return std::log(x) * std::cos(3.0 * x); };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double ref = ts.integrate(f, 0.0, 1.0);
  const double b[] = {0.0, 1.0};
  CHECK(integrate_adaptive(f, b, o).value == doctest::Approx(ref).epsilon(1e-9));

  // Decaying oscillation on a long window versus exp_sinh on [0, inf).
  auto g = [](double x) { return std::exp(-0.7 * x) * std::cos(4.0 * x) / (1.0 + x); };
  boost::math::quadrature::exp_sinh<double> es;
  const double ref2 = es.integrate(g);
  const double b2[] = {0.0, 2.0, 8.0, 80.0};
  CHECK(integrate_adaptive(g, b2, o).value == doctest::Approx(ref2).epsilon(1e-9));
}

TEST_CASE("result does not depend on where the interval is split") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto f = [](double x) { return std::exp(-x) * std::sin(9.0 * x) + 1.0 / (1.0 + 25.0 * x * x); };
  AdaptiveOptions o;
  o.rel_tol = 1e-12;
  const double base[] = {-1.0, 3.0};
  const double ref = integrate_adaptive(f, base, o).value;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> b{-1.0, 3.0};
    const int extra = 1 + i % 4;
    for (int k = 0; k < extra; ++k) b.push_back(-1.0 + 4.0 * u(rng));
    std::sort(b.begin(), b.end());
    CHECK(integrate_adaptive(f, b, o).value == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("error estimate bounds the true error") {
  AdaptiveOptions o;
  o.rel_tol = 1e-6;
  const double b[] = {0.0, 1.0};
  const auto r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x + 1e-6); }, b, o);
  const double exact = 2.0 * (std::sqrt(1.0 + 1e-6) - std::sqrt(1e-6));
  CHECK(r.converged);
  CHECK(std::abs(r.value - exact) <= std::max(r.abs_error, 1e-6 * exact));
}

TEST_CASE("budget exhaustion is reported") {
  AdaptiveOptions o;
  o.rel_tol = 1e-15;
  o.max_evaluations = 100;
  const double b[] = {0.0, 1.0};
  const auto r = integrate_adaptive([](double x) { return std::sin(1.0 / (x + 1e-4)); }, b, o);
  CHECK_FALSE(r.converged);
  CHECK(r.evaluations <= 200);
}

TEST_CASE("non-finite integrand throws") {
  AdaptiveOptions o;
  const double b[] = {-1.0, 1.0};
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return x > 0.3 ? NAN : 1.0; }, b, o), NumericalError);
}
