#include <doctest.h>

#include <cmath>
#include <random>

#include "trapnoise/errors.hpp"
#include "trapnoise/loaders.hpp"
#include "trapnoise/patch_field.hpp"

using namespace trapnoise;

namespace {

const std::filesystem::path data_dir(TRAPNOISE_DATA_DIR);

// Solid angle of the rectangle seen from (x, y, h), corners signed.
double solid_angle(const Rect& r, double x, double y, double h) {
  auto f = [&](double X, double Y) {
    return std::atan(X * Y / (h * std::sqrt(X * X + Y * Y + h * h)));
  };
  const double x0 = r.x_min - x, x1 = r.x_max - x, y0 = r.y_min - y, y1 = r.y_max - y;
  return f(x1, y1) - f(x0, y1) - f(x1, y0) + f(x0, y0);
}

// Axial field per volt of a unit-voltage rectangle: minus the gradient of
// Omega / (2 pi) along x.
double field_from_solid_angle(const Rect& r, const IonPose& ion) {
  const double step = 1e-3 * ion.height;
  const double up = solid_angle(r, ion.x + step, ion.y, ion.height);
  const double dn = solid_angle(r, ion.x - step, ion.y, ion.height);
  return -(up - dn) / (2.0 * step) / (2.0 * M_PI);
}

PatchScene plane_scene(double half, double h) {
  PatchScene s;
  s.regions.push_back({"plane", "au", {-half, half, -half, half}, {}, 1.0});
  s.ion.height = h;
  s.target_group = "ybco";
  return s;
}

}  // namespace

TEST_CASE("kernel sum matches the solid-angle field of a rectangle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(-300e-6, 300e-6), size(50e-6, 250e-6),
      height(80e-6, 250e-6);
  for (int i = 0; i < 10; ++i) {
    const double x0 = pos(rng), y0 = pos(rng);
    const Rect r{x0, x0 + size(rng), y0, y0 + size(rng)};
    IonPose ion;
    ion.height = height(rng);
    const double s = 1e-6;
    const double sum = rect_kernel_sums(r, ion, s).sum_k;
    const double ref = field_from_solid_angle(r, ion);
    CHECK(sum == doctest::Approx(ref).epsilon(1e-4).scale(0.0));
  }
}

TEST_CASE("partial edge patches keep their true area") {
  IonPose ion;
  ion.height = 100e-6;
  const Rect r{10e-6, 113.3e-6, -47.7e-6, 61.1e-6};
  const double ref = field_from_solid_angle(r, ion);
  // Coarse grid with ragged edges still converges to the same field.
  CHECK(rect_kernel_sums(r, ion, 0.7e-6).sum_k == doctest::Approx(ref).epsilon(1e-4));
  CHECK(rect_kernel_sums(r, ion, 13e-6).patches == 8 * 9);
}

TEST_CASE("mirror symmetry of the kernel sums") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-400e-6, 400e-6), size(20e-6, 200e-6);
  IonPose ion;
  ion.height = 150e-6;
  for (int i = 0; i < 20; ++i) {
    const double x0 = pos(rng), y0 = pos(rng), w = size(rng), h = size(rng);
    const Rect r{x0, x0 + w, y0, y0 + h};
    const Rect m{-(x0 + w), -x0, y0, y0 + h};
    // Grid anchored at the mirrored corner so patches map onto each other.
    const double s = w / 40.0;
    const auto a = rect_kernel_sums(r, ion, s);
    const auto b = rect_kernel_sums(m, ion, s);
    CHECK(a.sum_k == doctest::Approx(-b.sum_k).epsilon(1e-9));
    CHECK(a.sum_k2 == doctest::Approx(b.sum_k2).epsilon(1e-9));
    CHECK(a.sum_abs_k == doctest::Approx(b.sum_abs_k).epsilon(1e-9));
  }
}

TEST_CASE("hierarchical and exact region integrals agree") {
  const auto scene = load_scene(data_dir / "scenes/paper-chip.cfg");
  PatchOptions exact;
  exact.mode = PatchMode::exact;
  const auto a = patch_integrals(scene, 10e-6, exact);
  const auto b = patch_integrals(scene, 10e-6);
  for (const auto& [name, v] : a.region_integrals)
    CHECK(b.region_integrals.at(name) == doctest::Approx(v).epsilon(1e-3));
  CHECK(zeta_from(b, 1.0) == doctest::Approx(zeta_from(a, 1.0)).epsilon(1e-4));
}

TEST_CASE("zeta of the shipped chip") {
  const auto scene = load_scene(data_dir / "scenes/paper-chip.cfg");
  const auto in = patch_integrals(scene, 1e-6);
  CHECK(zeta_from(in, 0.0) == 0.0);
  CHECK(zeta_from(in, 1.0) == doctest::Approx(0.939).epsilon(0.02 / 0.939));
  CHECK(zeta_from(in, INFINITY) == 1.0);
  double last = -1.0;
  for (double f = 0.0; f <= 10.0; f += 0.25) {
    const double z = zeta_from(in, f);
    CHECK(z > last);
    CHECK(z <= 1.0);
    last = z;
  }
  for (double t : {0.1, 0.5, 0.9, 0.99}) CHECK(zeta_from(in, zeta_inverse(in, t)) == doctest::Approx(t).epsilon(1e-12));
  CHECK(zeta(scene, 1.0, 1e-6).zeta == zeta_from(in, 1.0));
}

TEST_CASE("zeta is insensitive to the patch size") {
  const auto scene = load_scene(data_dir / "scenes/paper-chip.cfg");
  const double z1 = zeta(scene, 1.0, 0.5e-6).zeta;
  const double z2 = zeta(scene, 1.0, 2e-6).zeta;
  CHECK(std::abs(z1 - z2) / z1 < 5e-3);
}

TEST_CASE("plane noise integral scales as h^-4 and as the patch area") {
  PatchOptions opts;
  const auto lo = plane_scene(50e-3, 100e-6);
  const auto hi = plane_scene(50e-3, 200e-6);
  const double a = region_noise_integral(lo.regions[0], lo.ion, 2e-6, opts);
  const double b = region_noise_integral(hi.regions[0], hi.ion, 2e-6, opts);
  CHECK(std::log(b / a) / std::log(2.0) == doctest::Approx(-4.0).epsilon(0.05 / 4.0));
  const double c = region_noise_integral(lo.regions[0], lo.ion, 4e-6, opts);
  CHECK(c / a == doctest::Approx(4.0).epsilon(1e-2));
}

TEST_CASE("thread count does not change results") {
  const auto scene = load_scene(data_dir / "scenes/paper-chip.cfg");
  PatchOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const auto a = patch_integrals(scene, 2e-6, one);
  const auto b = patch_integrals(scene, 2e-6, many);
  CHECK(a.target_integral == b.target_integral);
  CHECK(a.other_integral == b.other_integral);
  const Rect r{-1e-4, 2e-4, -3e-4, 1e-4};
  CHECK(rect_kernel_sums(r, scene.ion, 1e-6, 1).sum_k == rect_kernel_sums(r, scene.ion, 1e-6, 3).sum_k);
}

TEST_CASE("scene validation") {
  auto base = load_scene(data_dir / "scenes/paper-chip.cfg");
  CHECK_NOTHROW(base.validate());

  auto s = base;
  s.regions[1].rect.x_max = 400e-6;  // window pokes out of the hole
  CHECK_THROWS_AS(s.validate(), DomainError);

  s = base;
  s.regions[0].holes.push_back({4e-3, 6e-3, 0.0, 1e-3});
  CHECK_THROWS_AS(s.validate(), DomainError);

  s = base;
  s.ion.axial_x = 0.5;
  CHECK_THROWS_AS(s.validate(), DomainError);

  s = base;
  s.ion.height = 0.0;
  CHECK_THROWS_AS(s.validate(), DomainError);

  s = base;
  s.regions[0].weight = -1.0;
  CHECK_THROWS_AS(s.validate(), DomainError);

  s = base;
  s.regions.clear();
  CHECK_THROWS_AS(s.validate(), DomainError);

  PatchOptions exact;
  exact.mode = PatchMode::exact;
  exact.max_patches = 1000;
  CHECK_THROWS_AS(patch_integrals(base, 10e-6, exact), DomainError);
  CHECK_THROWS_AS(patch_integrals(base, 0.0), DomainError);

  const auto in = patch_integrals(base, 10e-6);
  CHECK_THROWS_AS(zeta_from(in, -1.0), DomainError);
  CHECK_THROWS_AS(zeta_inverse(in, 1.0), DomainError);
  CHECK_THROWS_AS(zeta_inverse(in, 0.0), DomainError);
}
