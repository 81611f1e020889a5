#include "trapnoise/physcore.hpp"

#include <cmath>
#include <cstdio>

#include "trapnoise/errors.hpp"

namespace trapnoise {

namespace {

double conversion_factor(double omega, double charge, double mass) {
  if (!(omega > 0.0)) throw DomainError("heating-rate conversion: omega must be > 0");
  if (!(mass > 0.0)) throw DomainError("heating-rate conversion: mass must be > 0");
  return charge * charge / (4.0 * mass * constants::hbar * omega);
}

}  // namespace

HeatingRate heating_rate_from_noise(FieldNoiseDensity noise, double omega, double charge,
                                    double mass) {
  return {conversion_factor(omega, charge, mass) * noise.value};
}

FieldNoiseDensity noise_from_heating_rate(HeatingRate gamma, double omega, double charge,
                                          double mass) {
  return {gamma.value / conversion_factor(omega, charge, mass)};
}

std::string constants_fingerprint() {
  const double values[] = {constants::kB, constants::hbar, constants::eps0, constants::mu0,
                           constants::c,  constants::q_e,  constants::m_Ca40};
  std::uint64_t h = 14695981039346656037ull;
  char buf[64];
  for (double v : values) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g;", v);
    for (int i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace trapnoise
