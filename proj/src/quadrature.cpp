#include "trapnoise/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "trapnoise/errors.hpp"

namespace trapnoise {

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208292181419, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double wg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                          0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                          0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double resabs;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate(const std::function<double(double)>& f, double a, double b) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double fc = f(centr);
  double resg = 0.0;
  double resk = wgk[10] * fc;
  double resabs = std::abs(resk);
  for (int j = 0; j < 5; ++j) {
    const int jtw = 2 * j + 1;
    const double dx = hlgth * xgk[jtw];
    const double f1 = f(centr - dx);
    const double f2 = f(centr + dx);
    resg += wg[j] * (f1 + f2);
    resk += wgk[jtw] * (f1 + f2);
    resabs += wgk[jtw] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 5; ++j) {
    const int jtwm1 = 2 * j;
    const double dx = hlgth * xgk[jtwm1];
    const double f1 = f(centr - dx);
    const double f2 = f(centr + dx);
    resk += wgk[jtwm1] * (f1 + f2);
    resabs += wgk[jtwm1] * (std::abs(f1) + std::abs(f2));
  }
  const double value = resk * hlgth;
  const double err = std::abs((resk - resg) * hlgth);
  resabs *= std::abs(hlgth);
  if (!std::isfinite(value)) throw NumericalError("quadrature: non-finite integrand value");
  return {a, b, value, err, resabs};
}

double floor_error(const Panel& p) {
  return 50.0 * std::numeric_limits<double>::epsilon() * p.resabs;
}

}  // namespace

QuadratureResult gauss_kronrod21(const std::function<double(double)>& f, double a, double b) {
  const Panel p = evaluate(f, a, b);
  return {p.value, p.error, 21, true};
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const AdaptiveOptions& opts) {
  if (breakpoints.size() < 2) throw DomainError("integrate_adaptive: need at least two breakpoints");
  std::priority_queue<Panel> active;
  std::vector<Panel> settled;
  long double total = 0.0L;
  long double total_err = 0.0L;
  std::size_t evals = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i]))
      throw DomainError("integrate_adaptive: breakpoints must be strictly increasing");
    Panel p = evaluate(f, breakpoints[i], breakpoints[i + 1]);
    evals += 21;
    total += p.value;
    total_err += p.error;
    active.push(p);
  }
  auto target = [&]() {
    return std::max(opts.abs_tol,
                    opts.rel_tol * std::abs(static_cast<double>(total) + opts.reference_offset));
  };
  while (static_cast<double>(total_err) > target() && !active.empty() &&
         evals + 42 <= opts.max_evaluations) {
    Panel p = active.top();
    active.pop();
    const double mid = 0.5 * (p.a + p.b);
    const bool too_narrow = !(mid > p.a && mid < p.b) ||
                            (p.b - p.a) < 1e3 * std::numeric_limits<double>::epsilon() *
                                              std::max(std::abs(p.a), std::abs(p.b));
    if (too_narrow || p.error <= floor_error(p)) {
      settled.push_back(p);
      continue;
    }
    const Panel l = evaluate(f, p.a, mid);
    const Panel r = evaluate(f, mid, p.b);
    evals += 42;
    total += (static_cast<long double>(l.value) + r.value) - p.value;
    total_err += (static_cast<long double>(l.error) + r.error) - p.error;
    active.push(l);
    active.push(r);
  }
  // Re-sum from scratch to shed the drift of incremental updates.
  long double sum = 0.0L;
  long double err = 0.0L;
  for (const Panel& p : settled) {
    sum += p.value;
    err += p.error;
  }
  while (!active.empty()) {
    sum += active.top().value;
    err += active.top().error;
    active.pop();
  }
  total = sum;
  QuadratureResult res;
  res.value = static_cast<double>(sum);
  res.abs_error = static_cast<double>(err);
  res.evaluations = evals;
  res.converged = res.abs_error <= target();
  return res;
}

}  // namespace trapnoise
