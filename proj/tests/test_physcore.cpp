#include <doctest.h>

#include <cmath>
#include <random>

#include "trapnoise/errors.hpp"
#include "trapnoise/physcore.hpp"

using namespace trapnoise;

TEST_CASE("speed of light is consistent with eps0 and mu0") {
  using namespace constants;
  CHECK(std::abs(c * std::sqrt(eps0 * mu0) - 1.0) < 1e-9);
}

TEST_CASE("frequency conversions") {
  CHECK(angular_from_hz(1e6) == doctest::Approx(6.283185307179586e6).epsilon(1e-15));
  CHECK(hz_from_angular(angular_from_hz(1.37e6)) == doctest::Approx(1.37e6).epsilon(1e-15));
  CHECK(omega_1MHz == angular_from_hz(1e6));
}

TEST_CASE("heating-rate conversion factor at 1 MHz") {
  // q^2 / (4 m hbar omega) for 40Ca+, evaluated by hand.
  const double gamma = heating_rate_from_noise({1.0}, omega_1MHz).value;
  CHECK(gamma == doctest::Approx(1.4594e14).epsilon(2e-4));
  // 1 phonon/s corresponds to about 7e-15 V^2 m^-2 Hz^-1.
  CHECK(noise_from_heating_rate({1.0}, omega_1MHz).value == doctest::Approx(6.9e-15).epsilon(0.02));
}

TEST_CASE("two leads of 7.33e-16 give 0.21 phonons/s") {
  const double g = heating_rate_from_noise({2 * 7.33e-16}, omega_1MHz).value;
  CHECK(g == doctest::Approx(0.21).epsilon(0.05));
}

TEST_CASE("conversion is linear and exactly invertible") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lw(std::log(1e4), std::log(1e8));
  std::uniform_real_distribution<double> ls(std::log(1e-20), std::log(1e-10));
  for (int i = 0; i < 500; ++i) {
    const double w = std::exp(lw(rng));
    const double s = std::exp(ls(rng));
    const double g = heating_rate_from_noise({s}, w).value;
    CHECK(noise_from_heating_rate({g}, w).value == doctest::Approx(s).epsilon(1e-14));
    CHECK(heating_rate_from_noise({2 * s}, w).value == doctest::Approx(2 * g).epsilon(1e-14));
    // Gamma ~ 1/omega at fixed noise.
    CHECK(heating_rate_from_noise({s}, 2 * w).value == doctest::Approx(g / 2).epsilon(1e-14));
  }
}

TEST_CASE("conversion rejects non-positive frequency and mass") {
  CHECK_THROWS_AS(heating_rate_from_noise({1e-15}, 0.0), DomainError);
  CHECK_THROWS_AS(heating_rate_from_noise({1e-15}, -1.0), DomainError);
  CHECK_THROWS_AS(noise_from_heating_rate({1.0}, omega_1MHz, constants::q_e, 0.0), DomainError);
}

TEST_CASE("constants fingerprint is stable") {
  const auto a = constants_fingerprint();
  CHECK(a == constants_fingerprint());
  CHECK(a.size() > 16);
}
