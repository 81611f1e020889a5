// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "trapnoise/errors.hpp"
#include "trapnoise/inference.hpp"
#include "trapnoise/layered_media.hpp"
#include "trapnoise/loaders.hpp"
#include "trapnoise/noise_models.hpp"
#include "trapnoise/patch_field.hpp"
#include "trapnoise/physcore.hpp"

using namespace trapnoise;
namespace fs = std::filesystem;
using CD = std::complex<double>;

namespace {

const fs::path data_dir(TRAPNOISE_DATA_DIR);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

bool within_rel(double x, double target, double tol) { return std::abs(x - target) <= tol * std::abs(target); }

// 1. RC filter.
Outcome filter_impedance() {
  const double tol = 1e-3;
  const auto el = load_circuit(data_dir / "circuits/paper-trap.cfg");
  const double r = filter_effective_resistance(*el[0].filter, omega_1MHz);
  return {within_rel(r, 26.25e-3, tol), fmt("R_filter = %.5g mOhm (target 26.25 +/- 0.1%%)", r * 1e3)};
}

// 2. Aluminium lead benchmark.
Outcome al_lead() {
  const auto el = load_circuit(data_dir / "circuits/al-lead.cfg");
  const auto b = jnn_budget(el, omega_1MHz, 20.0);
  const double r = b.entries[0].r_elec + b.entries[0].r_lead + b.entries[0].r_filter;
  const double s = b.entries[0].noise.value;
  const double g = heating_rate_from_noise(b.total, omega_1MHz).value;
  const bool ok = within_rel(r, 17.3, 0.01) && within_rel(s, 7.33e-16, 0.01) && within_rel(g, 0.21, 0.05);
  return {ok, fmt("R = %.4g Ohm, S_E = %.4g per lead, Gamma(2 leads) = %.4g /s", r, s, g)};
}

// 3. Heating-rate conversion.
Outcome conversion() {
  const double s = noise_from_heating_rate({1.0}, omega_1MHz).value;
  const double back = heating_rate_from_noise({s}, omega_1MHz).value;
  const bool ok = within_rel(s, 6.9e-15, 0.02) && within_rel(back, 1.0, 1e-14);
  return {ok, fmt("1 phonon/s <-> S_E = %.4g V^2 m^-2 Hz^-1", s)};
}

// 4. Patch-noise fraction.
Outcome patch_fraction() {
  const auto scene = load_scene(data_dir / "scenes/paper-chip.cfg");
  const auto in = patch_integrals(scene, 1e-6);
  const double z1 = zeta_from(in, 1.0);
  const double f_half = zeta_inverse(in, 0.5);
  const double z05 = zeta(scene, 1.0, 0.5e-6).zeta;
  const double z2 = zeta(scene, 1.0, 2e-6).zeta;
  const double drift = std::abs(z05 - z2) / z05;

  PatchScene plane;
  plane.regions.push_back({"plane", "au", {-50e-3, 50e-3, -50e-3, 50e-3}, {}, 1.0});
  IonPose lo, hi;
  lo.height = 100e-6;
  hi.height = 200e-6;
  const double a = region_noise_integral(plane.regions[0], lo, 2e-6);
  const double b = region_noise_integral(plane.regions[0], hi, 2e-6);
  const double expo = std::log(b / a) / std::log(hi.height / lo.height);

  const bool ok = std::abs(z1 - 0.939) <= 0.02 && std::abs(f_half - 0.06) <= 0.02 && drift < 5e-3 &&
                  std::abs(expo + 4.0) <= 0.05;
  return {ok, fmt("zeta(1) = %.4f, f_ratio(zeta=0.5) = %.4f, drift 0.5-2 um = %.2e, height exponent = %.4f",
                  z1, f_half, drift, expo)};
}

// 5. Superconducting drop of the FDT noise.
Outcome fdt_drop() {
  const auto stack = load_stack(data_dir / "stacks/sapphire-ybco.cfg");
  const double tc = 89.0;
  std::string detail;
  bool ok = true;
  for (double l0 : {80e-9, 635e-9}) {
    const auto s = with_london_depth(stack, l0);
    const double below = fdt_noise(s, omega_1MHz, 0.5 * tc, 225e-6).noise.value;
    const double above = fdt_noise(s, omega_1MHz, 1.05 * tc, 225e-6).noise.value;
    const double decades = std::log10(above / below);
    ok = ok && decades >= 3.0;
    detail += fmt("lambda0 = %.0f nm: %.3g -> %.3g (%.1f decades)  ", l0 * 1e9, above, below, decades);
  }
  return {ok, detail};
}

// 6. Quasi-static scaling above a conductor half-space.
Outcome near_field_scaling() {
  const double w = omega_1MHz;
  auto S = [&](double sigma, double d) {
    const std::vector<CD> e{1.0, CD(0.0, sigma / (w * constants::eps0))};
    const std::vector<double> t{0.0, 0.0};
    return blackbody_noise(w, 300.0).value * greens_parallel(e, t, w, d).enhancement;
  };
  // Least-squares slopes over log-spaced grids.
  auto slope = [](const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += std::log(x[i]);
      my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
      sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
  };
  std::vector<double> ds, sd, sigmas, ss;
  for (int i = 0; i <= 8; ++i) {
    const double d = 10e-6 * std::pow(10.0, i / 8.0);
    ds.push_back(d);
    sd.push_back(S(1e5, d));
    const double sigma = 1e4 * std::pow(100.0, i / 8.0);
    sigmas.push_back(sigma);
    ss.push_back(S(sigma, 50e-6));
  }
  const double kd = slope(ds, sd);
  const double ks = slope(sigmas, ss);
  const bool ok = std::abs(kd + 3.0) <= 0.1 && std::abs(ks + 1.0) <= 0.05;
  return {ok, fmt("dlnS/dln d = %.4f (sigma = 1e5 S/m, d = 10-100 um), dlnS/dln sigma = %.4f (d = 50 um)", kd, ks)};
}

// 7. Fit round trips on synthetic data.
Outcome fit_round_trips() {
  const auto mp = load_params(data_dir / "params/heating-model.cfg");
  const TempFitParams truth = *mp.temp;
  const int trials = 100;
  const char* names[5] = {"T1", "beta1", "T2", "beta2", "T_star"};
  const double true_v[5] = {truth.T1, truth.beta1, truth.T2, truth.beta2, truth.T_star};
  std::vector<std::vector<double>> est(5), err(5);
  int covered[5] = {0, 0, 0, 0, 0};
  int aic_ok = 0, failed = 0;
  for (int t = 0; t < trials; ++t) {
    SynthSpec spec;
    spec.temp = truth;
    spec.temperatures = mp.temperatures;
    spec.frequencies = mp.frequencies;
    spec.noise_frac = 0.1;
    spec.seed = 1000 + static_cast<std::uint64_t>(t);
    TempFitReport rep;
    try {
      rep = fit_temperature_models(synth_dataset(spec));
    } catch (const NumericalError&) {
      ++failed;
      continue;
    }
    if (rep.piecewise.score.aic < rep.simple.score.aic) ++aic_ok;
    const auto& q = rep.piecewise.params;
    const double v[5] = {q.T1, q.beta1, q.T2, q.beta2, q.T_star};
    const std::size_t k = q.gamma0.size();
    for (int i = 0; i < 5; ++i) {
      const double s = rep.piecewise.fit.stderr_of(k + static_cast<std::size_t>(i));
      est[i].push_back(v[i]);
      err[i].push_back(s);
      if (std::abs(v[i] - true_v[i]) <= 2.0 * s) ++covered[i];
    }
  }
  bool ok = failed == 0 && aic_ok >= 95;
  std::string detail = fmt("AIC prefers piecewise in %d/%d trials; ", aic_ok, trials);
  for (int i = 0; i < 5; ++i) {
    if (est[i].empty()) {
      ok = false;
      continue;
    }
    double mean = 0;
    for (double x : est[i]) mean += x;
    mean /= est[i].size();
    auto e = err[i];
    std::nth_element(e.begin(), e.begin() + e.size() / 2, e.end());
    const double med = e[e.size() / 2];
    const bool pass = std::abs(mean - true_v[i]) < 2.0 * med;
    ok = ok && pass;
    detail += fmt("%s mean %.4g (true %.4g, median sigma %.3g, 2-sigma coverage %d%%)%s", names[i], mean,
                  true_v[i], med, covered[i] * 100 / trials, i < 4 ? "; " : "");
  }
  if (failed) detail += fmt("; %d fits failed", failed);
  return {ok, detail};
}

// 8. Plateau width.
Outcome plateau() {
  const auto p = *load_params(data_dir / "params/heating-model.cfg").temp;
  const double w = plateau_width(p, 0.1);
  return {std::abs(w - 59.0) <= 1.0, fmt("Delta T = %.3f K (target 59.0 +/- 1)", w)};
}

// 9. Fluctuator-model exponents.
Outcome taf() {
  const double a1 = taf_alpha(1.0, omega_1MHz, 1e-13);
  const double a2 = taf_alpha(2.0, omega_1MHz, 1e-13);
  const auto p = *load_params(data_dir / "params/heating-model.cfg").temp;
  // Logarithmic slope of the model at 80 K by central difference.
  const double h = 1e-4;
  const double s80 = (std::log(gamma_piecewise(1.0, 80.0 * (1 + h), p)) -
                      std::log(gamma_piecewise(1.0, 80.0 * (1 - h), p))) /
                     (std::log1p(h) - std::log1p(-h));
  const double a80 = taf_alpha(s80, omega_1MHz, 1e-13);
  const bool ok = a1 == -1.0 && std::abs(a2 + 1.070) <= 1e-3 && a80 >= -1.18 && a80 <= -1.10;
  return {ok, fmt("alpha(1) = %.6g, alpha(2) = %.6f, model slope at 80 K = %.4f -> alpha = %.4f", a1, a2, s80, a80)};
}

// 10. Fresnel recursion equivalence.
Outcome fresnel() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> re(-30.0, 30.0), im(0.0, 30.0), kt(0.0, 1.5), uu(0.0, 4.0);
  auto eps = [&] { return CD(re(rng), im(rng)); };
  auto rel = [](CD a, CD b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  double worst = 0.0, worst_deg = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const CD a = eps(), b = eps(), c = eps(), d = eps();
    const double tb = kt(rng), tc = kt(rng), u = uu(rng);
    const std::vector<CD> e3{a, b, c}, e4{a, b, c, d};
    const std::vector<double> k3{0.0, tb, 0.0}, k4{0.0, tb, tc, 0.0};
    const auto r3 = fresnel_recursion(e3, k3, u);
    const auto x3 = fresnel_three_layer(a, b, c, tb, u);
    const auto r4 = fresnel_recursion(e4, k4, u);
    const auto x4 = fresnel_four_layer(a, b, c, d, tb, tc, u);
    worst = std::max({worst, rel(r3.s, x3.s), rel(r3.p, x3.p), rel(r4.s, x4.s), rel(r4.p, x4.p)});

    const auto ac = fresnel_interface(a, c, u);
    const std::vector<double> zero{0.0, 0.0, 0.0};
    const auto z = fresnel_recursion(e3, zero, u);
    const std::vector<CD> same_c{a, c, c};
    const auto sc = fresnel_recursion(same_c, k3, u);
    const std::vector<CD> same_a{a, a, c};
    const auto sa = fresnel_recursion(same_a, k3, u);
    CD wa = std::sqrt(a - u * u);
    if (wa.imag() < 0.0 || (wa.imag() == 0.0 && wa.real() < 0.0)) wa = -wa;
    const CD ph = std::exp(CD(0.0, 2.0) * wa * tb);
    // Splitting one layer into two of the same material.
    const std::vector<CD> split{a, b, b, c};
    const std::vector<double> ksplit{0.0, 0.4 * tb, 0.6 * tb, 0.0};
    const auto sp = fresnel_recursion(split, ksplit, u);
    worst_deg = std::max({worst_deg, rel(z.s, ac.s), rel(z.p, ac.p), rel(sc.s, ac.s), rel(sc.p, ac.p),
                          rel(sa.s, ac.s * ph), rel(sa.p, ac.p * ph), rel(sp.s, r3.s), rel(sp.p, r3.p)});
  }
  const bool ok = worst <= 1e-12 && worst_deg <= 1e-10;
  return {ok, fmt("max rel diff vs explicit formulas %.2e (1000 trials), degenerate identities %.2e", worst, worst_deg)};
}

// 11. Byte-identical CLI output for fixed seeds.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "trapnoise_acceptance";
  fs::create_directories(dir);
  const std::string cli = TRAPNOISE_CLI_PATH;
  const std::string params = (data_dir / "params/heating-model.cfg").string();
  const std::string synth = (dir / "synth.csv").string();
  auto sh = [&](const std::string& args, const fs::path& out) {
    const std::string cmd = "\"" + cli + "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::vector<std::string> commands = {
      "synth --config \"" + params + "\" --seed 99",
      "synth --config \"" + params + "\" --model power_law --seed 5 --noise 0.05",
      "fit --data \"" + synth + "\" --model temp --seed 3",
      "taf --data \"" + synth + "\" --bootstrap 50 --seed 8",
      "zeta --config \"" + (data_dir / "scenes/paper-chip.cfg").string() + "\" --f-ratio 0:1:0.25 --patch-um 4",
      "jnn --config \"" + (data_dir / "circuits/paper-trap.cfg").string() + "\" --temps 10:210:50",
  };
  if (!sh("synth --config \"" + params + "\" --seed 7 --out \"" + synth + "\"", dir / "ignored.txt"))
    return {false, "could not create the fit input"};
  int same = 0;
  std::string failures;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const fs::path a = dir / fmt("run%zu_a.txt", i), b = dir / fmt("run%zu_b.txt", i);
    const bool ran = sh(commands[i], a) && sh(commands[i], b);
    const std::string sa = slurp(a), sb = slurp(b);
    if (ran && !sa.empty() && sa == sb)
      ++same;
    else
      failures += " [" + commands[i].substr(0, commands[i].find(' ')) + "]";
  }
  const bool ok = same == static_cast<int>(commands.size());
  return {ok, fmt("%d/%zu commands byte-identical across two runs", same, commands.size()) + failures};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"filter impedance", filter_impedance},   {"Al lead benchmark", al_lead},
      {"heating-rate conversion", conversion},   {"patch-noise fraction", patch_fraction},
      {"superconducting FDT drop", fdt_drop},    {"near-field scaling", near_field_scaling},
      {"fit round trips", fit_round_trips},      {"plateau width", plateau},
      {"fluctuator exponents", taf},             {"Fresnel recursion equivalence", fresnel},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
