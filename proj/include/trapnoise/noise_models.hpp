#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trapnoise/layered_media.hpp"
#include "trapnoise/materials.hpp"
#include "trapnoise/physcore.hpp"

namespace trapnoise {

struct FilterCapacitor {
  double capacitance = 0.0;  // F
  double esr = 0.0;          // Ohm
};

struct FilterNetwork {
  double series_r = 0.0;  // Ohm
  std::vector<FilterCapacitor> capacitors;

  void validate() const;
};

// Rectangular conductor (PCB trace, on-chip meander strip).
struct PcbTrace {
  double width = 0.0;
  double thickness = 0.0;
  double length = 0.0;
  Conductor material;
};

struct WireBond {
  double diameter = 0.0;
  double length = 0.0;
  Conductor material;
  int multiplicity = 1;
};

struct LeadModel {
  std::optional<PcbTrace> pcb_trace;
  std::optional<WireBond> wire_bond;
  double contact_r_per_bond = 0.0;  // Ohm, counted once per bond

  void validate() const;
};

struct ElectrodeModel {
  std::string name;
  double characteristic_distance = 0.0;  // m
  double strip_length = 1.0;
  double strip_width = 1.0;
  std::vector<FilmSheet> films;  // empty: no electrode term
  LeadModel lead;
  std::optional<FilterNetwork> filter;
  bool approximate = false;

  void validate() const;
};

struct NoiseEntry {
  std::string name;
  double r_filter = 0.0;
  double r_lead = 0.0;
  double r_elec = 0.0;
  double distance = 0.0;
  FieldNoiseDensity noise;
};

// Entries keep the order of the electrode list.
struct NoiseBudget {
  std::vector<NoiseEntry> entries;
  FieldNoiseDensity total;
};

// Single-sided low-frequency blackbody density 2 kB T omega^2 / (3 pi eps0 c^3).
FieldNoiseDensity blackbody_noise(double omega, double T);
// hbar*omega/(kB*T) <= 1%, the range where the blackbody form above holds.
bool blackbody_classical(double omega, double T);

struct FdtResult {
  FieldNoiseDensity noise;
  GreensResult greens;
};

// S_BB * (1 + g_par).
FdtResult fdt_noise(const LayerStack& stack, double omega, double T, double d,
                    GreensOptions opts = {});

// Re Z, Z^-1 = 1/R + sum_k 1/(ESR_k + 1/(i omega C_k)).
double filter_effective_resistance(const FilterNetwork& net, double omega);

// sqrt(2 rho / (omega mu0)).
double skin_depth(double rho, double omega);

// Conducting cross-sections with the skin effect: an annulus of depth delta
// for round wire, a rectangle minus its core recessed by delta for traces.
double round_wire_area(double radius, double delta);
double rect_trace_area(double width, double thickness, double delta);

// R_trace + (R_bond + R_contact) / multiplicity.
double lead_resistance(const LeadModel& lead, double omega, double T);

// Parallel sheet resistance of the films times strip_length/strip_width.
double electrode_resistance(const ElectrodeModel& e, double T, double omega);

// 4 kB T R_eff / D^2 per electrode, R_eff = R_filter + R_lead + R_elec.
// At T = 0 every entry is zero and no resistivity lookup happens.
NoiseBudget jnn_budget(const std::vector<ElectrodeModel>& electrodes, double omega, double T);

}  // namespace trapnoise
