#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace trapnoise {

struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

// A surface region in the chip plane (m). Holes are subtracted from the
// outer rectangle; they must lie inside it and not overlap each other.
struct PlaneRegion {
  std::string name;
  std::string group;
  Rect rect;
  std::vector<Rect> holes;
  double weight = 1.0;  // fluctuation strength f
};

struct IonPose {
  double x = 0.0;
  double y = 0.0;
  double height = 225e-6;
  double axial_x = 1.0;
  double axial_y = 0.0;
};

struct PatchScene {
  std::vector<PlaneRegion> regions;
  IonPose ion;
  // Regions whose weight is scaled by f_ratio in zeta().
  std::string target_group = "ybco";

  void validate() const;
};

enum class PatchMode { hierarchical, exact };

struct PatchOptions {
  PatchMode mode = PatchMode::hierarchical;
  double near_half_width = 1e-3;  // m, direct-sum box around the ion
  std::size_t max_patches = 200'000'000;
  unsigned threads = 0;
};

// Axial field at the ion per volt on a patch of area `area` centred at
// (px, py) of a gapless grounded plane: 3 h da A / (2 pi R^5), with
// da = (ion - patch) . axial.
double axial_patch_kernel(double px, double py, double area, const IonPose& ion);

struct KernelSums {
  double sum_k = 0.0;
  double sum_abs_k = 0.0;
  double sum_k2 = 0.0;
  std::size_t patches = 0;
};

// Direct tiling of one rectangle by squares of side patch_size anchored at
// its lower-left corner; partial edge patches keep their true area.
KernelSums rect_kernel_sums(const Rect& r, const IonPose& ion, double patch_size,
                            unsigned threads = 0);

// Sum of K^2 over the region (holes subtracted). Hierarchical mode sums
// directly inside the near box and integrates K^2 analytically beyond it.
double region_noise_integral(const PlaneRegion& region, const IonPose& ion, double patch_size,
                             const PatchOptions& opts = {});

struct ZetaResult {
  double zeta = 0.0;
  std::map<std::string, double> region_integrals;
  double target_integral = 0.0;  // weighted sum over the target group
  double other_integral = 0.0;   // weighted sum over everything else
  double patch_size_used = 0.0;
};

// Region integrals for a scene; zeta follows from these for any f_ratio.
ZetaResult patch_integrals(const PatchScene& scene, double patch_size,
                           const PatchOptions& opts = {});
double zeta_from(const ZetaResult& integrals, double f_ratio);

ZetaResult zeta(const PatchScene& scene, double f_ratio, double patch_size,
                const PatchOptions& opts = {});

// f_ratio such that zeta = target: (t/(1-t)) * other/target.
double zeta_inverse(const ZetaResult& integrals, double target_zeta);
double zeta_inverse(const PatchScene& scene, double target_zeta, double patch_size,
                    const PatchOptions& opts = {});

}  // namespace trapnoise
