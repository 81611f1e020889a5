#include "trapnoise/layered_media.hpp"

#include <boost/multiprecision/complex128.hpp>
#include <cmath>
#include <cstdio>
#include <limits>

#include "trapnoise/physcore.hpp"
#include "trapnoise/quadrature.hpp"

namespace trapnoise {

namespace {

using QReal = boost::multiprecision::float128;
using QComplex = boost::multiprecision::complex128;
using CD = std::complex<double>;

std::string describe(CD z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g%+.6gi)", z.real(), z.imag());
  return buf;
}

FresnelPair recursion_or_throw(std::span<const CD> eps, std::span<const double> kt, double u) {
  if (eps.size() < 2) throw DomainError("fresnel: need at least two media");
  if (kt.size() != eps.size()) throw DomainError("fresnel: thickness/permittivity size mismatch");
  std::vector<CD> em1(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) em1[i] = eps[i] - 1.0;
  bool degenerate = false;
  const auto r = detail::stack_reflection<CD, double>(eps, em1, kt, u * u - 1.0, &degenerate);
  if (degenerate) {
    for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
      const CD wa = detail::branch_sqrt(eps[i] - u * u);
      const CD wb = detail::branch_sqrt(eps[i + 1] - u * u);
      if (wa + wb == 0.0 || eps[i + 1] * wa + eps[i] * wb == 0.0)
        throw FresnelDegeneracy(eps[i], eps[i + 1], u);
    }
    throw FresnelDegeneracy(eps[0], eps[1], u);
  }
  return {r.s, r.p};
}

CD w_of(CD eps, double u) { return detail::branch_sqrt(eps - u * u); }

// Series for 1 - (3/4) F(a), F(a) = int_0^1 cos(a v)(1 + v^2) dv.
double mirror_enhancement(double a) {
  if (a < 0.5) {
    double sum = 0.0;
    double term = 1.0;  // a^{2n}/(2n)!
    for (int n = 1; n < 40; ++n) {
      term *= a * a / ((2.0 * n - 1.0) * (2.0 * n));
      const double c = (n % 2 ? 1.0 : -1.0) * term * (1.0 / (2 * n + 1) + 1.0 / (2 * n + 3));
      sum += c;
      if (std::abs(c) < 1e-18 * std::abs(sum)) break;
    }
    return 0.75 * sum;
  }
  const double s = std::sin(a);
  const double c = std::cos(a);
  const double F = 2.0 * s / a + 2.0 * c / (a * a) - 2.0 * s / (a * a * a);
  return 1.0 - 0.75 * F;
}

}  // namespace

FresnelDegeneracy::FresnelDegeneracy(CD a, CD b, double u_)
    : NumericalError("Fresnel denominator vanishes at interface eps_a=" + describe(a) +
                     ", eps_b=" + describe(b) + ", u=" + std::to_string(u_)),
      eps_a(a),
      eps_b(b),
      u(u_) {}

QuadratureError::QuadratureError(const std::string& what, double est, double err, std::size_t n)
    : NumericalError(what + " (estimate " + std::to_string(est) + ", error " +
                     std::to_string(err) + ", " + std::to_string(n) + " evaluations)"),
      estimate(est),
      abs_error(err),
      evaluations(n) {}

void LayerStack::validate() const {
  if (layers.empty()) throw DomainError("layer stack is empty");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    const bool last = i + 1 == layers.size();
    if (last && l.thickness)
      throw DomainError("layer '" + l.name + "': bottom layer must be semi-infinite");
    if (!last && !l.thickness)
      throw DomainError("layer '" + l.name + "': only the bottom layer may be semi-infinite");
    if (l.thickness && !(*l.thickness > 0.0 && std::isfinite(*l.thickness)))
      throw DomainError("layer '" + l.name + "': thickness must be finite and > 0");
    trapnoise::validate(l.material);
  }
}

std::vector<CD> LayerStack::permittivities(double omega, double T) const {
  std::vector<CD> eps{CD(1.0, 0.0)};
  for (const Layer& l : layers) eps.push_back(permittivity(l.material, omega, T));
  return eps;
}

std::vector<double> LayerStack::thicknesses() const {
  std::vector<double> t{0.0};
  for (const Layer& l : layers) t.push_back(l.thickness.value_or(0.0));
  return t;
}

FresnelPair fresnel_interface(CD eps_a, CD eps_b, double u) {
  const CD eps[2] = {eps_a, eps_b};
  const double kt[2] = {0.0, 0.0};
  return recursion_or_throw(eps, kt, u);
}

FresnelPair fresnel_recursion(std::span<const CD> eps, std::span<const double> phase_thickness,
                              double u) {
  return recursion_or_throw(eps, phase_thickness, u);
}

FresnelPair fresnel_stack(const LayerStack& stack, double u, double omega, double T) {
  stack.validate();
  const auto eps = stack.permittivities(omega, T);
  auto kt = stack.thicknesses();
  const double k = omega / constants::c;
  for (double& t : kt) t *= k;
  return recursion_or_throw(eps, kt, u);
}

FresnelPair fresnel_three_layer(CD eps_a, CD eps_b, CD eps_c, double kt_b, double u) {
  const FresnelPair ab = fresnel_interface(eps_a, eps_b, u);
  const FresnelPair ba = fresnel_interface(eps_b, eps_a, u);
  const FresnelPair bc = fresnel_interface(eps_b, eps_c, u);
  const CD e = std::exp(CD(0.0, 2.0) * w_of(eps_b, u) * kt_b);
  return {(ab.s + bc.s * e) / (1.0 - ba.s * bc.s * e), (ab.p + bc.p * e) / (1.0 - ba.p * bc.p * e)};
}

FresnelPair fresnel_four_layer(CD eps_a, CD eps_b, CD eps_c, CD eps_d, double kt_b, double kt_c,
                               double u) {
  const FresnelPair abc = fresnel_three_layer(eps_a, eps_b, eps_c, kt_b, u);
  const FresnelPair cba = fresnel_three_layer(eps_c, eps_b, eps_a, kt_b, u);
  const FresnelPair ab = fresnel_interface(eps_a, eps_b, u);
  const FresnelPair ba = fresnel_interface(eps_b, eps_a, u);
  const FresnelPair bc = fresnel_interface(eps_b, eps_c, u);
  const FresnelPair cb = fresnel_interface(eps_c, eps_b, u);
  const FresnelPair cd = fresnel_interface(eps_c, eps_d, u);
  const CD eb = std::exp(CD(0.0, 2.0) * w_of(eps_b, u) * kt_b);
  const CD ec = std::exp(CD(0.0, 2.0) * w_of(eps_c, u) * kt_c);
  auto combine = [&](CD r_abc, CD r_cba, CD r_ab, CD r_ba, CD r_bc, CD r_cb, CD r_cd) {
    const CD amp = (eb - r_ab * r_cb) / (1.0 - r_ba * r_bc * eb);
    return (r_abc + amp * r_cd * ec) / (1.0 - r_cba * r_cd * ec);
  };
  return {combine(abc.s, cba.s, ab.s, ba.s, bc.s, cb.s, cd.s),
          combine(abc.p, cba.p, ab.p, ba.p, bc.p, cb.p, cd.p)};
}

GreensResult greens_parallel(std::span<const CD> eps, std::span<const double> thickness,
                             double omega, double d, GreensOptions opts) {
  if (eps.size() < 2 || thickness.size() != eps.size())
    throw DomainError("greens_parallel: need matching permittivity and thickness lists");
  if (!(omega > 0.0)) throw DomainError("greens_parallel: omega must be > 0");
  if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("greens_parallel: distance must be > 0");
  if (!(opts.rel_tol > 0.0)) throw DomainError("greens_parallel: rel_tol must be > 0");
  if (eps[0] != CD(1.0, 0.0)) throw DomainError("greens_parallel: top medium must be vacuum");

  bool all_vacuum = true;
  double eps_scale = 1.0;
  for (const CD& e : eps) {
    all_vacuum = all_vacuum && e == CD(1.0, 0.0);
    eps_scale = std::max(eps_scale, std::abs(e));
  }
  if (all_vacuum) return {0.0, 1.0, 0.0, 0};

  const double k = omega / constants::c;
  const double a = 2.0 * k * d;
  const std::size_t n = eps.size();
  std::vector<QComplex> qe(n), qem1(n);
  std::vector<QReal> qkt(n);
  for (std::size_t i = 0; i < n; ++i) {
    qe[i] = QComplex(QReal(eps[i].real()), QReal(eps[i].imag()));
    qem1[i] = QComplex(QReal(eps[i].real()) - 1, QReal(eps[i].imag()));
    qkt[i] = QReal(k) * QReal(thickness[i]);
  }
  const std::span<const QComplex> se(qe), sem1(qem1);
  const std::span<const QReal> skt(qkt);
  bool degenerate = false;
  const QReal qa(a);

  // x in [0,1]: propagating branch, v = x, mirror-subtracted.
  // x < 0: evanescent branch, t = -x.
  auto integrand = [&](double x) -> double {
    if (x >= 0.0) {
      const QReal v(x);
      const auto r = detail::stack_reflection<QComplex, QReal>(se, sem1, skt, -v * v, &degenerate);
      const QComplex phase = exp(QComplex(QReal(0), qa * v));
      const QComplex body = (r.s + QReal(1)) - v * v * (r.p - QReal(1));
      return static_cast<double>((phase * body).real());
    }
    const QReal t(-x);
    const auto r = detail::stack_reflection<QComplex, QReal>(se, sem1, skt, t * t, &degenerate);
    return static_cast<double>(exp(-qa * t) * (r.s.imag() + t * t * r.p.imag()));
  };

  const double t_max = 45.0 / a;
  std::vector<double> breaks;
  breaks.push_back(-t_max);
  for (double t = 0.5 * t_max; t > 1.0 / 16.0; t *= 0.5) breaks.push_back(-t);
  // Keep a breakpoint near the film and metal transitions when they fall
  // inside the window.
  const double sq = std::sqrt(eps_scale);
  if (sq < t_max && sq > 1.0) {
    auto it = std::lower_bound(breaks.begin(), breaks.end(), -sq);
    if (it == breaks.end() || *it != -sq) breaks.insert(it, -sq);
  }
  breaks.push_back(0.0);
  breaks.push_back(0.5);
  breaks.push_back(1.0);

  const double offset = mirror_enhancement(a);
  AdaptiveOptions ao;
  ao.rel_tol = opts.rel_tol;
  ao.reference_offset = offset / 0.75;
  ao.max_evaluations = opts.max_evaluations;
  const QuadratureResult q = integrate_adaptive(integrand, breaks, ao);
  if (degenerate) {
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (eps[i] == eps[i + 1] && eps[i].imag() == 0.0)
        throw FresnelDegeneracy(eps[i], eps[i + 1], std::sqrt(eps[i].real()));
    throw FresnelDegeneracy(eps[0], eps[1], std::numeric_limits<double>::quiet_NaN());
  }
  const double enhancement = offset + 0.75 * q.value;
  GreensResult res;
  res.enhancement = enhancement;
  res.g_parallel = (offset - 1.0) + 0.75 * q.value;
  res.abs_error_estimate = 0.75 * q.abs_error;
  res.evaluations = q.evaluations;
  if (!q.converged)
    throw QuadratureError("greens_parallel: tolerance not reached within evaluation budget",
                          res.g_parallel, res.abs_error_estimate, res.evaluations);
  return res;
}

GreensResult greens_parallel(const LayerStack& stack, double omega, double T, double d,
                             GreensOptions opts) {
  stack.validate();
  const auto eps = stack.permittivities(omega, T);
  const auto t = stack.thicknesses();
  return greens_parallel(eps, t, omega, d, opts);
}

}  // namespace trapnoise
