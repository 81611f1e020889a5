#include "trapnoise/noise_models.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "trapnoise/errors.hpp"

namespace trapnoise {

namespace {

void check_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(what + " must be finite and > 0");
}

}  // namespace

void FilterNetwork::validate() const {
  check_positive(series_r, "filter series resistance");
  for (const auto& c : capacitors) {
    check_positive(c.capacitance, "filter capacitance");
    if (!(c.esr >= 0.0)) throw DomainError("filter ESR must be >= 0");
  }
}

void LeadModel::validate() const {
  if (pcb_trace) {
    check_positive(pcb_trace->width, "trace width");
    check_positive(pcb_trace->thickness, "trace thickness");
    check_positive(pcb_trace->length, "trace length");
    pcb_trace->material.rho.validate();
  }
  if (wire_bond) {
    check_positive(wire_bond->diameter, "bond diameter");
    check_positive(wire_bond->length, "bond length");
    if (wire_bond->multiplicity < 1) throw DomainError("bond multiplicity must be >= 1");
    wire_bond->material.rho.validate();
  }
  if (!(contact_r_per_bond >= 0.0)) throw DomainError("contact resistance must be >= 0");
}

void ElectrodeModel::validate() const {
  check_positive(characteristic_distance, "electrode '" + name + "' characteristic distance");
  check_positive(strip_length, "electrode '" + name + "' strip length");
  check_positive(strip_width, "electrode '" + name + "' strip width");
  for (const auto& f : films) {
    check_positive(f.thickness, "electrode '" + name + "' film thickness");
    trapnoise::validate(f.material);
  }
  lead.validate();
  if (filter) filter->validate();
}

FieldNoiseDensity blackbody_noise(double omega, double T) {
  if (!(omega > 0.0)) throw DomainError("blackbody_noise: omega must be > 0");
  if (!(T >= 0.0)) throw DomainError("blackbody_noise: T must be >= 0");
  using namespace constants;
  return {2.0 * kB * T * omega * omega / (3.0 * pi * eps0 * c * c * c)};
}

bool blackbody_classical(double omega, double T) {
  return T > 0.0 && constants::hbar * omega / (constants::kB * T) <= 0.01;
}

FdtResult fdt_noise(const LayerStack& stack, double omega, double T, double d, GreensOptions opts) {
  const GreensResult g = greens_parallel(stack, omega, T, d, opts);
  return {{blackbody_noise(omega, T).value * g.enhancement}, g};
}

double filter_effective_resistance(const FilterNetwork& net, double omega) {
  net.validate();
  if (!(omega >= 0.0)) throw DomainError("filter_effective_resistance: omega must be >= 0");
  std::complex<double> y = 1.0 / net.series_r;
  if (omega > 0.0) {
    for (const auto& c : net.capacitors)
      y += 1.0 / std::complex<double>(c.esr, -1.0 / (omega * c.capacitance));
  }
  return (1.0 / y).real();
}

double skin_depth(double rho, double omega) {
  check_positive(rho, "skin_depth: rho");
  check_positive(omega, "skin_depth: omega");
  return std::sqrt(2.0 * rho / (omega * constants::mu0));
}

double round_wire_area(double radius, double delta) {
  const double core = std::max(radius - delta, 0.0);
  return constants::pi * (radius * radius - core * core);
}

double rect_trace_area(double width, double thickness, double delta) {
  const double cw = std::max(width - 2.0 * delta, 0.0);
  const double ct = std::max(thickness - 2.0 * delta, 0.0);
  return width * thickness - cw * ct;
}

double lead_resistance(const LeadModel& lead, double omega, double T) {
  lead.validate();
  double r = 0.0;
  if (lead.pcb_trace) {
    const auto& tr = *lead.pcb_trace;
    const double rho = resistivity_lookup(tr.material.rho, T);
    const double delta = skin_depth(rho, omega);
    r += rho * tr.length / rect_trace_area(tr.width, tr.thickness, delta);
  }
  const int m = lead.wire_bond ? lead.wire_bond->multiplicity : 1;
  double per_bond = lead.contact_r_per_bond;
  if (lead.wire_bond) {
    const auto& wb = *lead.wire_bond;
    const double rho = resistivity_lookup(wb.material.rho, T);
    const double delta = skin_depth(rho, omega);
    per_bond += rho * wb.length / round_wire_area(0.5 * wb.diameter, delta);
  }
  return r + per_bond / m;
}

double electrode_resistance(const ElectrodeModel& e, double T, double omega) {
  if (e.films.empty()) return 0.0;
  double rs = std::numeric_limits<double>::infinity();
  for (const auto& f : e.films) rs = parallel_sheet(rs, sheet_resistance(f, T, omega));
  return rs * e.strip_length / e.strip_width;
}

NoiseBudget jnn_budget(const std::vector<ElectrodeModel>& electrodes, double omega, double T) {
  if (electrodes.empty()) throw DomainError("jnn_budget: electrode list is empty");
  if (!(omega > 0.0)) throw DomainError("jnn_budget: omega must be > 0");
  if (!(T >= 0.0)) throw DomainError("jnn_budget: T must be >= 0");
  NoiseBudget b;
  long double total = 0.0L;
  for (const auto& e : electrodes) {
    e.validate();
    NoiseEntry n;
    n.name = e.name;
    n.distance = e.characteristic_distance;
    if (T > 0.0) {
      n.r_filter = e.filter ? filter_effective_resistance(*e.filter, omega) : 0.0;
      n.r_lead = lead_resistance(e.lead, omega, T);
      n.r_elec = electrode_resistance(e, T, omega);
      const double r_eff = n.r_filter + n.r_lead + n.r_elec;
      n.noise.value = 4.0 * constants::kB * T * r_eff / (n.distance * n.distance);
    }
    total += n.noise.value;
    b.entries.push_back(n);
  }
  b.total.value = static_cast<double>(total);
  return b;
}

}  // namespace trapnoise
