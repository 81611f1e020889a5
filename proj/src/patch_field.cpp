#include "trapnoise/patch_field.hpp"

#include <algorithm>
#include <cmath>

#include "trapnoise/errors.hpp"
#include "trapnoise/parallel.hpp"
#include "trapnoise/physcore.hpp"
#include "trapnoise/quadrature.hpp"

namespace trapnoise {

namespace {

bool overlaps(const Rect& a, const Rect& b) {
  return a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max && b.y_min < a.y_max;
}

bool contains(const Rect& outer, const Rect& inner) {
  return inner.x_min >= outer.x_min && inner.x_max <= outer.x_max && inner.y_min >= outer.y_min &&
         inner.y_max <= outer.y_max;
}

void check_rect(const Rect& r, const std::string& what) {
  if (!(r.x_max > r.x_min) || !(r.y_max > r.y_min) || !std::isfinite(r.width()) ||
      !std::isfinite(r.height()))
    throw DomainError(what + ": rectangle must have x_max > x_min and y_max > y_min");
}

// Tiles the plane with an s-grid anchored at (x0, y0) and sums over the
// parts of the cells that fall inside `clip`.
KernelSums tiled_sums(const Rect& clip, double x0, double y0, double s, const IonPose& ion,
                      unsigned threads, std::size_t max_patches) {
  const long i0 = static_cast<long>(std::floor((clip.x_min - x0) / s + 1e-9));
  const long i1 = static_cast<long>(std::ceil((clip.x_max - x0) / s - 1e-9));
  const long j0 = static_cast<long>(std::floor((clip.y_min - y0) / s + 1e-9));
  const long j1 = static_cast<long>(std::ceil((clip.y_max - y0) / s - 1e-9));
  const std::size_t nx = static_cast<std::size_t>(std::max(1L, i1 - i0));
  const std::size_t ny = static_cast<std::size_t>(std::max(1L, j1 - j0));
  if (static_cast<double>(nx) * static_cast<double>(ny) > static_cast<double>(max_patches))
    throw DomainError("patch count " + std::to_string(nx * ny) + " exceeds the budget of " +
                      std::to_string(max_patches) +
                      "; use hierarchical mode or a larger patch size");

  std::vector<double> xc(nx), wx(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double a = std::max(clip.x_min, x0 + (i0 + static_cast<long>(i)) * s);
    const double b = std::min(clip.x_max, x0 + (i0 + static_cast<long>(i) + 1) * s);
    xc[i] = 0.5 * (a + b);
    wx[i] = std::max(0.0, b - a);
  }
  std::vector<double> rk(ny), rabs(ny), rk2(ny);
  parallel_for(ny, threads, [&](std::size_t j) {
    const double a = std::max(clip.y_min, y0 + (j0 + static_cast<long>(j)) * s);
    const double b = std::min(clip.y_max, y0 + (j0 + static_cast<long>(j) + 1) * s);
    const double yc = 0.5 * (a + b);
    const double wy = std::max(0.0, b - a);
    double sk = 0.0, sa = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const double k = axial_patch_kernel(xc[i], yc, wx[i] * wy, ion);
      sk += k;
      sa += std::abs(k);
      s2 += k * k;
    }
    rk[j] = sk;
    rabs[j] = sa;
    rk2[j] = s2;
  });
  return {pairwise_sum(rk), pairwise_sum(rabs), pairwise_sum(rk2), nx * ny};
}

// int dY / (Y^2 + c2)^n for n = 1..5 at Y.
void j_integrals(double y, double c2, double out[6]) {
  const double c = std::sqrt(c2);
  const double q = y * y + c2;
  out[1] = std::atan(y / c) / c;
  double qn = q;
  for (int n = 1; n < 5; ++n) {
    out[n + 1] = y / (2.0 * n * c2 * qn) + (2.0 * n - 1.0) / (2.0 * n * c2) * out[n];
    qn *= q;
  }
}

// Integral of (3h/2pi)^2 a^2 / R^10 over a rectangle, a = (ion - p) . axial.
double far_field_integral(const Rect& r, const IonPose& ion) {
  const double h2 = ion.height * ion.height;
  const double ax = ion.axial_x, ay = ion.axial_y;
  const double ylo = r.y_min - ion.y, yhi = r.y_max - ion.y;
  auto inner = [&](double X) {
    const double c2 = X * X + h2;
    double jl[6], jh[6];
    j_integrals(ylo, c2, jl);
    j_integrals(yhi, c2, jh);
    const double j4 = jh[4] - jl[4];
    const double j5 = jh[5] - jl[5];
    const double ql = ylo * ylo + c2, qh = yhi * yhi + c2;
    const double y1 = -1.0 / (8.0 * qh * qh * qh * qh) + 1.0 / (8.0 * ql * ql * ql * ql);
    const double y2 = j4 - c2 * j5;
    return ax * ax * X * X * j5 + 2.0 * ax * ay * X * y1 + ay * ay * y2;
  };
  std::vector<double> br{r.x_min - ion.x, r.x_max - ion.x};
  if (br[0] < 0.0 && br[1] > 0.0) br.insert(br.begin() + 1, 0.0);
  AdaptiveOptions ao;
  ao.rel_tol = 1e-10;
  ao.max_evaluations = 200'000;
  const QuadratureResult q = integrate_adaptive(inner, br, ao);
  const double pref = 3.0 * ion.height / (2.0 * constants::pi);
  return pref * pref * q.value;
}

double rect_integral(const Rect& r, const IonPose& ion, double s, const PatchOptions& opts) {
  if (opts.mode == PatchMode::exact)
    return tiled_sums(r, r.x_min, r.y_min, s, ion, opts.threads, opts.max_patches).sum_k2;
  const double hw = opts.near_half_width;
  const Rect box{ion.x - hw, ion.x + hw, ion.y - hw, ion.y + hw};
  double total = 0.0;
  const Rect near{std::max(r.x_min, box.x_min), std::min(r.x_max, box.x_max),
                  std::max(r.y_min, box.y_min), std::min(r.y_max, box.y_max)};
  if (near.x_max > near.x_min && near.y_max > near.y_min)
    total += tiled_sums(near, r.x_min, r.y_min, s, ion, opts.threads, opts.max_patches).sum_k2;
  const double area = s * s;
  const Rect parts[4] = {
      {r.x_min, r.x_max, r.y_min, std::min(r.y_max, box.y_min)},
      {r.x_min, r.x_max, std::max(r.y_min, box.y_max), r.y_max},
      {r.x_min, std::min(r.x_max, box.x_min), std::max(r.y_min, box.y_min),
       std::min(r.y_max, box.y_max)},
      {std::max(r.x_min, box.x_max), r.x_max, std::max(r.y_min, box.y_min),
       std::min(r.y_max, box.y_max)},
  };
  for (const Rect& p : parts)
    if (p.x_max > p.x_min && p.y_max > p.y_min) total += area * far_field_integral(p, ion);
  return total;
}

}  // namespace

void PatchScene::validate() const {
  if (regions.empty()) throw DomainError("patch scene has no regions");
  if (!(ion.height > 0.0)) throw DomainError("ion height must be > 0");
  const double norm = std::hypot(ion.axial_x, ion.axial_y);
  if (std::abs(norm - 1.0) > 1e-9) throw DomainError("axial direction must be a unit vector");
  for (const auto& r : regions) {
    check_rect(r.rect, "region '" + r.name + "'");
    if (!(r.weight >= 0.0)) throw DomainError("region '" + r.name + "': weight must be >= 0");
    for (std::size_t i = 0; i < r.holes.size(); ++i) {
      check_rect(r.holes[i], "region '" + r.name + "' hole");
      if (!contains(r.rect, r.holes[i]))
        throw DomainError("region '" + r.name + "': hole must lie inside the region");
      for (std::size_t k = 0; k < i; ++k)
        if (overlaps(r.holes[i], r.holes[k]))
          throw DomainError("region '" + r.name + "': holes overlap");
    }
  }
  // Pairwise disjointness, treating holes as carved out.
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      const auto& a = regions[i];
      const auto& b = regions[k];
      if (!overlaps(a.rect, b.rect)) continue;
      const bool a_in_hole_of_b = std::any_of(b.holes.begin(), b.holes.end(),
                                              [&](const Rect& h) { return contains(h, a.rect); });
      const bool b_in_hole_of_a = std::any_of(a.holes.begin(), a.holes.end(),
                                              [&](const Rect& h) { return contains(h, b.rect); });
      if (!a_in_hole_of_b && !b_in_hole_of_a)
        throw DomainError("regions '" + a.name + "' and '" + b.name + "' overlap");
    }
  }
}

double axial_patch_kernel(double px, double py, double area, const IonPose& ion) {
  const double dx = ion.x - px;
  const double dy = ion.y - py;
  const double da = dx * ion.axial_x + dy * ion.axial_y;
  const double r2 = dx * dx + dy * dy + ion.height * ion.height;
  const double r5 = r2 * r2 * std::sqrt(r2);
  return 3.0 * ion.height * da * area / (2.0 * constants::pi * r5);
}

KernelSums rect_kernel_sums(const Rect& r, const IonPose& ion, double patch_size,
                            unsigned threads) {
  check_rect(r, "rect_kernel_sums");
  if (!(patch_size > 0.0)) throw DomainError("patch size must be > 0");
  return tiled_sums(r, r.x_min, r.y_min, patch_size, ion, threads, 2'000'000'000);
}

double region_noise_integral(const PlaneRegion& region, const IonPose& ion, double patch_size,
                             const PatchOptions& opts) {
  if (!(patch_size > 0.0)) throw DomainError("patch size must be > 0");
  check_rect(region.rect, "region '" + region.name + "'");
  double total = rect_integral(region.rect, ion, patch_size, opts);
  for (const Rect& h : region.holes) total -= rect_integral(h, ion, patch_size, opts);
  return std::max(total, 0.0);
}

ZetaResult patch_integrals(const PatchScene& scene, double patch_size, const PatchOptions& opts) {
  scene.validate();
  ZetaResult res;
  res.patch_size_used = patch_size;
  for (const auto& r : scene.regions) {
    const double i = region_noise_integral(r, scene.ion, patch_size, opts);
    res.region_integrals[r.name] = i;
    if (r.group == scene.target_group)
      res.target_integral += r.weight * i;
    else
      res.other_integral += r.weight * i;
  }
  return res;
}

double zeta_from(const ZetaResult& in, double f_ratio) {
  if (!(f_ratio >= 0.0)) throw DomainError("f_ratio must be >= 0");
  if (std::isinf(f_ratio)) {
    if (!(in.target_integral > 0.0)) throw NumericalError("zeta: target integral is zero");
    return 1.0;
  }
  const double num = f_ratio * in.target_integral;
  const double den = num + in.other_integral;
  if (!(den > 0.0)) throw NumericalError("zeta: all weighted region integrals are zero");
  return num / den;
}

ZetaResult zeta(const PatchScene& scene, double f_ratio, double patch_size,
                const PatchOptions& opts) {
  ZetaResult res = patch_integrals(scene, patch_size, opts);
  res.zeta = zeta_from(res, f_ratio);
  return res;
}

double zeta_inverse(const ZetaResult& in, double target_zeta) {
  if (!(target_zeta > 0.0 && target_zeta < 1.0))
    throw DomainError("zeta_inverse: target must lie in (0, 1)");
  if (!(in.target_integral > 0.0)) throw NumericalError("zeta_inverse: target integral is zero");
  return target_zeta / (1.0 - target_zeta) * in.other_integral / in.target_integral;
}

double zeta_inverse(const PatchScene& scene, double target_zeta, double patch_size,
                    const PatchOptions& opts) {
  return zeta_inverse(patch_integrals(scene, patch_size, opts), target_zeta);
}

}  // namespace trapnoise
