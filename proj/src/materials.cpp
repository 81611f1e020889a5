#include "trapnoise/materials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trapnoise/errors.hpp"
#include "trapnoise/physcore.hpp"

namespace trapnoise {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::complex<double> metal_permittivity(double rho, double omega) {
  return {0.0, 1.0 / (rho * omega * constants::eps0)};
}

}  // namespace

ResistivityTable ResistivityTable::from_points(std::string label,
                                               std::vector<std::pair<double, double>> points) {
  ResistivityTable t;
  t.label = std::move(label);
  for (const auto& [T, rho] : points) {
    t.temperature.push_back(T);
    t.resistivity.push_back(rho);
  }
  t.validate();
  return t;
}

void ResistivityTable::validate() const {
  if (temperature.size() != resistivity.size())
    throw DomainError("resistivity table '" + label + "': column length mismatch");
  if (temperature.size() < 2)
    throw DomainError("resistivity table '" + label + "': needs at least two points");
  for (std::size_t i = 0; i < temperature.size(); ++i) {
    if (!(resistivity[i] > 0.0) || !std::isfinite(resistivity[i]))
      throw DomainError("resistivity table '" + label + "': resistivities must be > 0");
    if (!(temperature[i] > 0.0))
      throw DomainError("resistivity table '" + label + "': temperatures must be > 0");
    if (i > 0 && !(temperature[i] > temperature[i - 1]))
      throw DomainError("resistivity table '" + label +
                        "': temperatures must be strictly increasing");
  }
}

double resistivity_lookup(const ResistivityTable& table, double T) {
  if (table.temperature.empty()) throw DomainError("resistivity table '" + table.label + "' is empty");
  if (!(T >= table.t_min() && T <= table.t_max())) {
    throw DomainError("resistivity table '" + table.label + "': T = " + std::to_string(T) +
                      " K outside [" + std::to_string(table.t_min()) + ", " +
                      std::to_string(table.t_max()) + "] K");
  }
  const auto& ts = table.temperature;
  auto it = std::upper_bound(ts.begin(), ts.end(), T);
  if (it == ts.end()) return table.resistivity.back();
  const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  const std::size_t lo = hi - 1;
  const double w = (T - ts[lo]) / (ts[hi] - ts[lo]);
  const double l0 = std::log(table.resistivity[lo]);
  const double l1 = std::log(table.resistivity[hi]);
  return std::exp(l0 + w * (l1 - l0));
}

ResistivityTable linear_normal_state_table(double sigma_at_tc, double tc, double t_max,
                                           double step) {
  if (!(sigma_at_tc > 0.0) || !(tc > 0.0) || !(t_max > tc) || !(step > 0.0))
    throw DomainError("linear_normal_state_table: invalid arguments");
  const double rho_tc = 1.0 / sigma_at_tc;
  std::vector<std::pair<double, double>> pts;
  for (double T = tc; T < t_max; T += step) pts.emplace_back(T, rho_tc * T / tc);
  pts.emplace_back(t_max, rho_tc * t_max / tc);
  return ResistivityTable::from_points("linear normal state", std::move(pts));
}

double SuperconductingSheet::at(double omega) const {
  if (exponent == 0.0) return r_ref;
  return r_ref * std::pow(omega / angular_from_hz(f_ref_hz), exponent);
}

void validate(const MaterialModel& model) {
  std::visit(overloaded{
                 [](const Vacuum&) {},
                 [](const Conductor& c) { c.rho.validate(); },
                 [](const TwoFluidSC& s) {
                   if (!(s.lambda0 > 0.0)) throw DomainError("two-fluid: lambda0 must be > 0");
                   if (!(s.tc > 0.0)) throw DomainError("two-fluid: Tc must be > 0");
                   if (!(s.sigma_n > 0.0)) throw DomainError("two-fluid: sigma_n must be > 0");
                   if (!(s.sc_sheet.r_ref >= 0.0) || !(s.sc_sheet.f_ref_hz > 0.0))
                     throw DomainError("two-fluid: invalid superconducting sheet resistance");
                   s.rho_normal.validate();
                 },
                 [](const LossyDielectric& d) {
                   if (!(d.eps_r >= 1.0)) throw DomainError("dielectric: eps_r must be >= 1");
                   if (!(d.tan_delta >= 0.0)) throw DomainError("dielectric: tan_delta must be >= 0");
                 },
             },
             model);
}

bool is_superconducting(const MaterialModel& model, double T) {
  const auto* sc = std::get_if<TwoFluidSC>(&model);
  return sc != nullptr && T < sc->tc;
}

double london_depth(double lambda0, double tc, double T) {
  if (!(T > 0.0) || !(T < tc))
    throw DomainError("london_depth: requires 0 < T < Tc (T = " + std::to_string(T) +
                      " K, Tc = " + std::to_string(tc) + " K)");
  return lambda0 / std::sqrt(1.0 - T / tc);
}

std::complex<double> permittivity(const MaterialModel& model, double omega, double T) {
  if (!(omega > 0.0)) throw DomainError("permittivity: omega must be > 0");
  if (!(T > 0.0)) throw DomainError("permittivity: T must be > 0");
  return std::visit(
      overloaded{
          [](const Vacuum&) { return std::complex<double>(1.0, 0.0); },
          [&](const Conductor& c) { return metal_permittivity(resistivity_lookup(c.rho, T), omega); },
          [&](const TwoFluidSC& s) {
            if (T >= s.tc) return metal_permittivity(resistivity_lookup(s.rho_normal, T), omega);
            const double k = omega / constants::c;
            const double lambda = london_depth(s.lambda0, s.tc, T);
            const double kl = k * lambda;
            return std::complex<double>(1.0 - 1.0 / (kl * kl),
                                        s.sigma_n * (T / s.tc) / (omega * constants::eps0));
          },
          [](const LossyDielectric& d) {
            return std::complex<double>(d.eps_r, d.eps_r * d.tan_delta);
          },
      },
      model);
}

double sheet_resistance(const FilmSheet& film, double T, double omega) {
  if (!(film.thickness > 0.0)) throw DomainError("sheet_resistance: thickness must be > 0");
  return std::visit(
      overloaded{
          [&](const Conductor& c) { return resistivity_lookup(c.rho, T) / film.thickness; },
          [&](const TwoFluidSC& s) {
            if (T < s.tc) return s.sc_sheet.at(omega);
            return resistivity_lookup(s.rho_normal, T) / film.thickness;
          },
          [](const auto&) -> double {
            throw DomainError("sheet_resistance: film material is not a conductor");
          },
      },
      film.material);
}

double parallel_sheet(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("parallel_sheet: arguments must be > 0");
  if (std::isinf(a)) return b;
  if (std::isinf(b)) return a;
  return a * b / (a + b);
}

}  // namespace trapnoise
