#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "trapnoise/least_squares.hpp"
#include "trapnoise/physcore.hpp"

namespace trapnoise {

struct HeatingRecord {
  double T = 0.0;          // K
  double f_hz = 0.0;       // secular frequency, Hz
  double gamma = 0.0;      // phonons/s
  double sigma = 0.0;      // phonons/s
};

struct HeatingDataset {
  std::vector<HeatingRecord> records;

  void validate() const;
  // Distinct secular frequencies (Hz), ascending.
  std::vector<double> frequencies() const;
};

// CSV with header naming T_K, f_Hz, gamma_phps, sigma_phps (any order).
// Lines starting with '#' and blank lines are skipped. Errors carry the
// 1-based line number.
HeatingDataset read_dataset_csv(std::istream& in);
void write_dataset_csv(std::ostream& out, const HeatingDataset& data);

// ---------------------------------------------------------------- scores

struct ModelScore {
  double rss = 0.0;
  std::size_t n_data = 0;
  std::size_t n_params = 0;
  double aic = 0.0;
  double bic = 0.0;
  bool perfect_fit = false;  // rss == 0; aic and bic are -inf
};

ModelScore information_criteria(double rss, std::size_t n_data, std::size_t n_params);

// ------------------------------------------------------ frequency power law

struct FreqPoint {
  double omega;  // rad/s
  double gamma;
  double sigma;
};

// Gamma(omega) = gamma_coeff * (omega/omega0)^(alpha - 1).
struct FreqPowerLawFit {
  double gamma_coeff = 0.0;
  double alpha = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double omega0 = omega_1MHz;
  double chi2 = 0.0;
  std::size_t n_data = 0;
  std::vector<double> omegas;

  double operator()(double omega) const;
};

FreqPowerLawFit fit_freq_power_law(const std::vector<FreqPoint>& points);

// ---------------------------------------------------- temperature models

struct TempFitParams {
  std::map<double, double> gamma0;  // f_hz -> Gamma0
  double T1 = 0.0;
  double beta1 = 0.0;
  double T2 = 0.0;
  double beta2 = 0.0;
  double T_star = 0.0;
  bool piecewise = false;
};

// Gamma0 [1 + (T/T1)^beta1].
double gamma_simple(double gamma0, double T, const TempFitParams& p);
// Simple law below T*, Gamma1(T*)[1 + ((T - T*)/T2)^beta2] from T* on.
double gamma_piecewise(double gamma0, double T, const TempFitParams& p);
double gamma_model(const TempFitParams& p, double f_hz, double T);

struct TempModelFit {
  TempFitParams params;
  LsqFit fit;
  ModelScore score;
  bool t_star_at_boundary = false;
};

struct TempFitReport {
  TempModelFit simple;
  TempModelFit piecewise;
  std::vector<std::string> warnings;
};

struct TempFitOptions {
  int starts = 8;
  std::uint64_t seed = 1;
};

TempFitReport fit_temperature_models(const HeatingDataset& data, const TempFitOptions& opts = {});

// T2 * tolerance^(1/beta2).
double plateau_width(const TempFitParams& p, double tolerance_frac);

// ---------------------------------------------------------- surface noise

struct SurfacePoint {
  double T;
  double S;
  double sigma;
};

struct SurfaceModelFit {
  std::string model;  // "power_law" or "arrhenius"
  // power_law: S_E0, beta, T0; arrhenius: S_E0, S_ET, T0
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double chi2 = 0.0;
  double chi2_red = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
};

struct SurfaceFitParams {
  SurfaceModelFit power_law;
  SurfaceModelFit arrhenius;
};

double surface_power_law(double T, double s0, double beta, double t0);
double surface_arrhenius(double T, double s0, double st, double t0);

SurfaceFitParams fit_surface_models(const std::vector<SurfacePoint>& curve);

// Upper tail of the chi-squared distribution with `dof` degrees of freedom.
double chi2_survival(double chi2, double dof);

// ------------------------------------------------------------- spline/TAF

struct SplineOptions {
  // Smoothing weight; negative selects it by generalized cross-validation,
  // zero interpolates.
  double lambda = -1.0;
  int bootstrap = 200;
  std::uint64_t seed = 12345;
  double band_level = 0.68;
};

// Cubic smoothing spline in (ln T, ln S) with weights 1/var(ln S).
class LogLogSpline {
public:
  LogLogSpline(const std::vector<SurfacePoint>& curve, const SplineOptions& opts = {});

  double lambda() const { return lambda_; }
  double log_value(double T) const;
  double slope(double T) const;
  // Bootstrap band of the slope at T (lower, upper).
  std::pair<double, double> slope_band(double T) const;
  double t_min() const;
  double t_max() const;

private:
  struct Fit {
    Eigen::VectorXd f;   // values at knots
    Eigen::VectorXd m2;  // second derivatives at knots
  };
  Fit solve(const Eigen::VectorXd& y, double lambda) const;
  double eval(const Fit& fit, double x, bool derivative) const;

  Eigen::VectorXd x_, y_, w_;
  Eigen::MatrixXd Q_, R_;
  double lambda_ = 0.0;
  Fit fit_;
  std::vector<Fit> boot_;
  double band_level_ = 0.68;
};

// Spectral exponent alpha with S_E ~ omega^alpha: the Dutta-Horn exponent
// 1 - (slope - 1)/ln(omega tau0), negated.
double taf_alpha(double slope, double omega, double tau0 = 1e-13);
// |ln(omega tau0)| < 1.
bool taf_ill_conditioned(double omega, double tau0);

struct AlphaPoint {
  double alpha;
  double sigma;
  double T;
};

struct Chi2Result {
  double chi2 = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
};

Chi2Result taf_consistency_chi2(const std::vector<AlphaPoint>& measured,
                                const std::function<double(double)>& predicted);

// Subtracts a (spectrally flat in S_E) JNN level from the fitted total noise
// at every fit frequency and refits. Throws if the subtraction leaves
// non-positive noise.
FreqPowerLawFit jnn_corrected_alpha(const FreqPowerLawFit& fit,
                                    const std::function<double(double)>& jnn_level);

// -------------------------------------------------------------- synthesis

enum class SynthModel { simple, piecewise, surface_power_law, surface_arrhenius };

struct SynthSpec {
  SynthModel model = SynthModel::piecewise;
  TempFitParams temp;               // simple / piecewise
  std::vector<double> surface;      // three surface parameters
  double surface_alpha = -1.0;      // spectral exponent for surface models
  std::vector<double> frequencies;  // Hz; temp models default to gamma0 keys
  std::vector<double> temperatures;
  double noise_frac = 0.1;
  std::uint64_t seed = 1;
};

HeatingDataset synth_dataset(const SynthSpec& spec);

// Noise magnitude S_E(T) at omega0 from per-temperature frequency fits, or a
// direct conversion where only one frequency was measured.
std::vector<SurfacePoint> noise_curve_from_dataset(const HeatingDataset& data);

}  // namespace trapnoise
