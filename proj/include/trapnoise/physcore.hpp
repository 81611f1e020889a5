#pragma once

#include <cstdint>
#include <numbers>
#include <string>

namespace trapnoise {

// CODATA 2018 values (SI).
namespace constants {
inline constexpr double kB = 1.380649e-23;           // J/K (exact)
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline constexpr double mu0 = 1.25663706212e-6;      // H/m
inline constexpr double c = 299792458.0;             // m/s (exact)
inline constexpr double q_e = 1.602176634e-19;       // C (exact)
inline constexpr double atomic_mass = 1.66053906660e-27;  // kg
// 40Ca+ : atomic mass of 40Ca; the missing electron is neglected.
inline constexpr double m_Ca40 = 39.9625909 * atomic_mass;
inline constexpr double pi = std::numbers::pi;
}  // namespace constants

// Angular frequency 2*pi*1 MHz, the reference frequency of the heating-rate
// power law and the default secular frequency.
inline constexpr double omega_1MHz = 2.0 * constants::pi * 1.0e6;

inline constexpr double angular_from_hz(double f_hz) { return 2.0 * constants::pi * f_hz; }
inline constexpr double hz_from_angular(double omega) { return omega / (2.0 * constants::pi); }

// A point of the (omega, T) plane at which a noise density is evaluated.
struct SpectralPoint {
  double omega;        // rad/s
  double temperature;  // K
};

// Single-sided electric-field noise spectral density, V^2 m^-2 Hz^-1.
struct FieldNoiseDensity {
  double value = 0.0;
};

// Motional heating rate, phonons/s.
struct HeatingRate {
  double value = 0.0;
};

// Gamma = q^2 S_E / (4 m hbar omega). Throws DomainError for omega <= 0 or
// mass <= 0.
HeatingRate heating_rate_from_noise(FieldNoiseDensity noise, double omega,
                                    double charge = constants::q_e,
                                    double mass = constants::m_Ca40);

// Exact inverse of heating_rate_from_noise.
FieldNoiseDensity noise_from_heating_rate(HeatingRate gamma, double omega,
                                          double charge = constants::q_e,
                                          double mass = constants::m_Ca40);

// FNV-1a hash over the printed constant values; written into every CLI
// output so results can be traced to the constants they were made with.
std::string constants_fingerprint();

}  // namespace trapnoise
