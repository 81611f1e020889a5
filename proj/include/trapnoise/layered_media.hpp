#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trapnoise/errors.hpp"
#include "trapnoise/materials.hpp"

namespace trapnoise {

// One planar layer. An empty thickness marks the semi-infinite substrate.
struct Layer {
  std::string name;
  MaterialModel material;
  std::optional<double> thickness;  // m
};

// Layers listed top to bottom below an implicit vacuum half-space. The last
// layer, and only the last, is bulk.
struct LayerStack {
  std::vector<Layer> layers;

  void validate() const;
  // Relative permittivities, index 0 being the vacuum half-space above.
  std::vector<std::complex<double>> permittivities(double omega, double T) const;
  // Physical thicknesses aligned with permittivities(); 0 for both half-spaces.
  std::vector<double> thicknesses() const;
};

struct FresnelPair {
  std::complex<double> s;
  std::complex<double> p;
};

// Raised when a Fresnel denominator vanishes (e.g. eps_a == eps_b == u^2).
class FresnelDegeneracy : public NumericalError {
public:
  FresnelDegeneracy(std::complex<double> eps_a, std::complex<double> eps_b, double u);
  std::complex<double> eps_a;
  std::complex<double> eps_b;
  double u;
};

// Single interface A|B for in-plane wave number u (units of k = omega/c).
// W_X = sqrt(eps_X - u^2) on the branch Im W >= 0 (Re W >= 0 on ties).
FresnelPair fresnel_interface(std::complex<double> eps_a, std::complex<double> eps_b, double u);

// General N-layer recursion. `eps` starts with the top half-space;
// `phase_thickness[j]` is k * t_j for finite layer j (entries for the two
// half-spaces are ignored). Thicknesses of zero are allowed here.
FresnelPair fresnel_recursion(std::span<const std::complex<double>> eps,
                              std::span<const double> phase_thickness, double u);

FresnelPair fresnel_stack(const LayerStack& stack, double u, double omega, double T);

// Closed forms for A|B(t_B)|C and A|B(t_B)|C(t_C)|D, written out term by term
// with the transmission factor of the four-layer expression. Phase
// thicknesses are k*t.
FresnelPair fresnel_three_layer(std::complex<double> eps_a, std::complex<double> eps_b,
                                std::complex<double> eps_c, double kt_b, double u);
FresnelPair fresnel_four_layer(std::complex<double> eps_a, std::complex<double> eps_b,
                               std::complex<double> eps_c, std::complex<double> eps_d,
                               double kt_b, double kt_c, double u);

struct GreensOptions {
  double rel_tol = 1e-6;
  std::size_t max_evaluations = 2'000'000;
};

struct GreensResult {
  double g_parallel = 0.0;
  // 1 + g_parallel, computed without the cancellation that g ~ -1 suffers
  // above a near-perfect mirror (superconductors).
  double enhancement = 1.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

// g_par = 3/4 Re int_0^inf (u du / v) e^{2ikdv} [Rs + (u^2-1) Rp],
// v = sqrt(1-u^2) with Im v >= 0. The absolute error target is
// rel_tol * |1 + g_par|. Throws QuadratureError past the evaluation budget.
GreensResult greens_parallel(const LayerStack& stack, double omega, double T, double d,
                             GreensOptions opts = {});

// Same integral for explicit permittivities (index 0 = vacuum above) and
// physical thicknesses in m.
GreensResult greens_parallel(std::span<const std::complex<double>> eps,
                             std::span<const double> thickness, double omega, double d,
                             GreensOptions opts = {});

class QuadratureError : public NumericalError {
public:
  QuadratureError(const std::string& what, double estimate, double abs_error,
                  std::size_t evaluations);
  double estimate;
  double abs_error;
  std::size_t evaluations;
};

namespace detail {

// Square root on the branch Im >= 0, ties broken towards Re >= 0.
template <class Complex>
Complex branch_sqrt(const Complex& z) {
  using std::imag;
  using std::real;
  using std::sqrt;
  Complex w = sqrt(z);
  if (imag(w) < 0 || (imag(w) == 0 && real(w) < 0)) w = -w;
  return w;
}

template <class Complex>
struct ReflectionT {
  Complex s;
  Complex p;
};

// Stack reflection written for any complex scalar so the same code runs in
// double, extended or quad precision. The in-plane wave number enters as
// excess = u^2 - 1 and W_j^2 = (eps_j - 1) - excess, which keeps W exact in
// vacuum (W = v for excess = -v^2, W = i t for excess = t^2).
// `eps_minus_one[j]` = eps_j - 1, `eps[j]` = eps_j, `kt[j]` = k t_j.
template <class Complex, class Real>
ReflectionT<Complex> stack_reflection(std::span<const Complex> eps,
                                      std::span<const Complex> eps_minus_one,
                                      std::span<const Real> kt, const Real& excess,
                                      bool* degenerate = nullptr) {
  using std::exp;
  const std::size_t n = eps.size();
  const Complex i_unit(Real(0), Real(1));
  const Complex two_i = i_unit + i_unit;

  auto w_of = [&](std::size_t j) { return branch_sqrt<Complex>(eps_minus_one[j] - Complex(excess)); };

  Complex w_below = w_of(n - 1);
  Complex w_above = w_of(n - 2);
  auto interface = [&](std::size_t a, const Complex& wa, const Complex& wb) {
    const std::size_t b = a + 1;
    const Complex ds = wa + wb;
    const Complex np = eps[b] * wa;
    const Complex mp = eps[a] * wb;
    const Complex dp = np + mp;
    if ((ds == Complex(0)) || (dp == Complex(0))) {
      if (degenerate) *degenerate = true;
      return ReflectionT<Complex>{Complex(0), Complex(0)};
    }
    return ReflectionT<Complex>{(wa - wb) / ds, (np - mp) / dp};
  };

  ReflectionT<Complex> r = interface(n - 2, w_above, w_below);
  for (std::size_t j = n - 2; j-- > 0;) {
    // w_above belongs to layer j+1, the finite layer just crossed.
    const Complex phase = exp(two_i * w_above * Complex(kt[j + 1]));
    const Complex w_top = w_of(j);
    const ReflectionT<Complex> rj = interface(j, w_top, w_above);
    const Complex xs = r.s * phase;
    const Complex xp = r.p * phase;
    const Complex one(Real(1));
    r.s = (rj.s + xs) / (one + rj.s * xs);
    r.p = (rj.p + xp) / (one + rj.p * xp);
    w_above = w_top;
  }
  return r;
}

}  // namespace detail

}  // namespace trapnoise
