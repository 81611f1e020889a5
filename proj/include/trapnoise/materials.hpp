#pragma once

#include <complex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace trapnoise {

// Tabulated resistivity rho(T). Interpolation is piecewise linear in
// (T, ln rho); lookups outside [T_min, T_max] are rejected.
struct ResistivityTable {
  std::string label;
  std::vector<double> temperature;  // K, strictly increasing
  std::vector<double> resistivity;  // Ohm m, > 0

  static ResistivityTable from_points(std::string label,
                                      std::vector<std::pair<double, double>> points);
  void validate() const;
  double t_min() const { return temperature.front(); }
  double t_max() const { return temperature.back(); }
};

double resistivity_lookup(const ResistivityTable& table, double T);

// Normal-state table rho(T) = rho(Tc) * T/Tc on [Tc, t_max], anchored at
// 1/sigma_at_tc. Used when no measured normal-state data is supplied.
ResistivityTable linear_normal_state_table(double sigma_at_tc, double tc, double t_max = 300.0,
                                           double step = 10.0);

// Residual AC sheet resistance of a superconducting film,
// R(omega) = r_ref * (omega / omega_ref)^exponent.
struct SuperconductingSheet {
  double r_ref = 1.0e-7;     // Ohm/sq
  double f_ref_hz = 20.0e6;  // Hz
  double exponent = 0.0;

  double at(double omega) const;
};

struct Vacuum {};

struct Conductor {
  ResistivityTable rho;
};

// Two-fluid superconductor: superfluid term -1/(k lambda(T))^2 plus a
// normal-carrier conductivity sigma_n T/Tc below Tc; plain metal above.
struct TwoFluidSC {
  double lambda0 = 150e-9;  // m
  double tc = 89.0;         // K
  double tc_uncertainty = 1.0;
  double sigma_n = 1.81e6;  // S/m, normal conductivity just above Tc
  ResistivityTable rho_normal;  // T >= Tc
  SuperconductingSheet sc_sheet;
};

struct LossyDielectric {
  double eps_r = 1.0;
  double tan_delta = 0.0;
};

using MaterialModel = std::variant<Vacuum, Conductor, TwoFluidSC, LossyDielectric>;

void validate(const MaterialModel& model);
bool is_superconducting(const MaterialModel& model, double T);

struct FilmSheet {
  MaterialModel material;
  double thickness = 0.0;  // m
};

// lambda0 / sqrt(1 - T/Tc); DomainError unless 0 < T < Tc.
double london_depth(double lambda0, double tc, double T);

// Complex relative permittivity. Im eps >= 0 for every model.
std::complex<double> permittivity(const MaterialModel& model, double omega, double T);

// rho(T)/thickness for normal conductors; the configured residual sheet
// resistance for a two-fluid film below Tc. Dielectric/vacuum films are
// rejected with DomainError.
double sheet_resistance(const FilmSheet& film, double T, double omega);

// a*b/(a+b); an infinite argument returns the other one.
double parallel_sheet(double a, double b);

}  // namespace trapnoise
