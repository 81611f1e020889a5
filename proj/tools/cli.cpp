#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "trapnoise/errors.hpp"
#include "trapnoise/inference.hpp"
#include "trapnoise/loaders.hpp"
#include "trapnoise/parallel.hpp"
#include "trapnoise/physcore.hpp"

namespace trapnoise::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// "a,b,c" or "start:stop:step" (stop included when hit within rounding).
std::vector<double> parse_grid(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> p;
    std::string t = text;
    std::replace(t.begin(), t.end(), ':', ' ');
    try {
      p = parse_double_list(t);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(flag + ": " + e.what());
    }
    if (p.size() != 3 || !(p[2] > 0.0) || !(p[1] >= p[0]))
      throw ConfigError(flag + ": range must be start:stop:step with step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((p[1] - p[0]) / p[2] + 1e-9));
    if (n > 1000000) throw ConfigError(flag + ": range has too many points");
    for (long i = 0; i <= n; ++i) out.push_back(p[0] + static_cast<double>(i) * p[2]);
  } else {
    try {
      out = parse_double_list(text);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(flag + ": " + e.what());
    }
  }
  if (out.empty()) throw ConfigError(flag + ": empty list");
  return out;
}

struct Manifest {
  std::string command;
  std::vector<fs::path> configs;
  std::map<std::string, std::string> overrides;
  std::uint64_t seed = 0;

  json to_json() const {
    json j;
    j["command"] = command;
    j["input_paths"] = json::array();
    for (const auto& p : configs) {
      json c;
      c["path"] = p.string();
      c["fnv1a64"] = fs::exists(p) ? file_hash(p) : std::string();
      j["input_paths"].push_back(c);
    }
    j["overrides"] = overrides;
    j["seed"] = seed;
    j["tool_version"] = tool_version;
    j["constants_fingerprint"] = constants_fingerprint();
    return j;
  }
};

Manifest manifest_for(const CLI::App& sub) {
  Manifest m;
  m.command = sub.get_name();
  for (const auto* opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    std::string v;
    for (const auto& r : opt->results()) v += (v.empty() ? "" : ",") + r;
    m.overrides[opt->get_name()] = v.empty() ? "true" : v;
  }
  return m;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ConfigError("cannot write output file", out_path);
  f << text;
  if (!f) throw ConfigError("write failed", out_path);
}

void emit_csv(const Manifest& m, const std::string& body, const std::string& out_path, std::ostream& out) {
  emit("# manifest " + m.to_json().dump() + "\n" + body, out_path, out);
}

void emit_json(const Manifest& m, json report, const std::string& out_path, std::ostream& out) {
  report["schema_version"] = report_schema_version;
  report["manifest"] = m.to_json();
  emit(report.dump(2) + "\n", out_path, out);
}

HeatingDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return read_dataset_csv(in);
}

// Measured noise curve with columns T_K, S_E, sigma_S_E.
std::optional<std::vector<SurfacePoint>> read_noise_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  std::string line;
  std::size_t row = 0;
  int ct = -1, cs = -1, ce = -1;
  std::size_t ncol = 0;
  std::vector<SurfacePoint> out;
  bool header = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto a = cell.find_first_not_of(" \t");
      const auto b = cell.find_last_not_of(" \t");
      f.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
    }
    if (!header) {
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == "T_K") ct = static_cast<int>(i);
        if (f[i] == "S_E") cs = static_cast<int>(i);
        if (f[i] == "sigma_S_E") ce = static_cast<int>(i);
      }
      if (cs < 0) return std::nullopt;
      if (ct < 0 || ce < 0) throw DataError("noise curve needs columns T_K, S_E, sigma_S_E", row);
      ncol = f.size();
      header = true;
      continue;
    }
    if (f.size() != ncol) throw DataError("expected " + std::to_string(ncol) + " fields", row);
    SurfacePoint p{};
    const auto t = parse_double(f[ct]), s = parse_double(f[cs]), e = parse_double(f[ce]);
    if (!t || !s || !e) throw DataError("cannot parse number", row);
    p = {*t, *s, *e};
    if (!(p.T > 0.0) || !(p.S > 0.0) || !(p.sigma > 0.0))
      throw DataError("T_K, S_E and sigma_S_E must be > 0", row);
    out.push_back(p);
  }
  if (!header) throw DataError("no header row found");
  return out;
}

// ------------------------------------------------------------------ fdt

struct FdtArgs {
  std::string config, materials, temps, out;
  double omega_hz = 1e6;
  double distance = 225e-6;
  double tolerance = 1e-6;
  unsigned threads = 0;
  bool lambda_band = false;
  std::string lambda_values = "80e-9,635e-9";
};

void cmd_fdt(const FdtArgs& a, const CLI::App& sub, std::ostream& out) {
  Manifest m = manifest_for(sub);
  const fs::path stack_path(a.config);
  m.configs.push_back(stack_path);
  std::optional<fs::path> mat;
  if (!a.materials.empty()) {
    mat = fs::path(a.materials);
    m.configs.push_back(*mat);
  }
  const LayerStack stack = load_stack(stack_path, mat ? &*mat : nullptr);
  const auto temps = parse_grid("--temps", a.temps);
  const double omega = angular_from_hz(a.omega_hz);
  GreensOptions go;
  go.rel_tol = a.tolerance;

  std::vector<LayerStack> variants;
  std::vector<double> lambdas;
  if (a.lambda_band) {
    lambdas = parse_grid("--lambda-values", a.lambda_values);
    for (double l : lambdas) variants.push_back(with_london_depth(stack, l));
  } else {
    variants.push_back(stack);
  }
  const std::size_t nv = variants.size();
  std::vector<FdtResult> res(temps.size() * nv);
  parallel_for(res.size(), a.threads, [&](std::size_t i) {
    res[i] = fdt_noise(variants[i % nv], omega, temps[i / nv], a.distance, go);
  });

  std::ostringstream body;
  if (a.lambda_band) {
    body << "T_K";
    for (double l : lambdas) body << ",S_E_lambda0_" << num(l * 1e9) << "nm";
    body << "\n";
  } else {
    body << "T_K,S_E,g_par,S_E_blackbody\n";
  }
  for (std::size_t t = 0; t < temps.size(); ++t) {
    body << num(temps[t]);
    if (a.lambda_band) {
      for (std::size_t v = 0; v < nv; ++v) body << "," << num(res[t * nv + v].noise.value);
    } else {
      const auto& r = res[t];
      body << "," << num(r.noise.value) << "," << num(r.greens.g_parallel) << ","
           << num(blackbody_noise(omega, temps[t]).value);
    }
    body << "\n";
  }
  emit_csv(m, body.str(), a.out, out);
}

// ------------------------------------------------------------------ jnn

struct JnnArgs {
  std::string config, materials, temps, out;
  double omega_hz = 1e6;
  unsigned threads = 0;
};

void cmd_jnn(const JnnArgs& a, const CLI::App& sub, std::ostream& out) {
  Manifest m = manifest_for(sub);
  const fs::path path(a.config);
  m.configs.push_back(path);
  std::optional<fs::path> mat;
  if (!a.materials.empty()) {
    mat = fs::path(a.materials);
    m.configs.push_back(*mat);
  }
  const auto electrodes = load_circuit(path, mat ? &*mat : nullptr);
  const auto temps = parse_grid("--temps", a.temps);
  const double omega = angular_from_hz(a.omega_hz);
  std::vector<NoiseBudget> budgets(temps.size());
  parallel_for(temps.size(), a.threads, [&](std::size_t i) { budgets[i] = jnn_budget(electrodes, omega, temps[i]); });

  std::ostringstream body;
  body << "T_K,name,R_filter,R_lead,R_elec,D,S_E,Gamma,approximate\n";
  for (std::size_t t = 0; t < temps.size(); ++t) {
    const auto& b = budgets[t];
    for (std::size_t i = 0; i < b.entries.size(); ++i) {
      const auto& e = b.entries[i];
      body << num(temps[t]) << "," << e.name << "," << num(e.r_filter) << "," << num(e.r_lead) << ","
           << num(e.r_elec) << "," << num(e.distance) << "," << num(e.noise.value) << ","
           << num(heating_rate_from_noise(e.noise, omega).value) << ","
           << (electrodes[i].approximate ? 1 : 0) << "\n";
    }
    body << num(temps[t]) << ",total,,,,," << num(b.total.value) << ","
         << num(heating_rate_from_noise(b.total, omega).value) << ",\n";
  }
  emit_csv(m, body.str(), a.out, out);
}

// ------------------------------------------------------------------ fit

struct FitArgs {
  std::string data, model = "temp", out;
  std::uint64_t seed = 1;
  int starts = 8;
};

json lsq_json(const LsqFit& f) {
  json p = json::object(), e = json::object();
  for (Eigen::Index i = 0; i < f.params.size(); ++i) {
    p[f.names[static_cast<std::size_t>(i)]] = f.params[i];
    e[f.names[static_cast<std::size_t>(i)]] = num_or_null(f.stderr_of(static_cast<std::size_t>(i)));
  }
  json j;
  j["params"] = p;
  j["stderr"] = e;
  j["chi2"] = f.chi2;
  j["chi2_red"] = num_or_null(f.chi2_red());
  j["n_data"] = f.n_data;
  j["iterations"] = f.iterations;
  return j;
}

json score_json(const ModelScore& s) {
  json j;
  j["rss"] = s.rss;
  j["n_params"] = s.n_params;
  j["aic"] = num_or_null(s.aic);
  j["bic"] = num_or_null(s.bic);
  j["perfect_fit"] = s.perfect_fit;
  return j;
}

json surface_json(const SurfaceModelFit& f) {
  json p = json::object(), e = json::object();
  for (Eigen::Index i = 0; i < f.params.size(); ++i) {
    p[f.names[static_cast<std::size_t>(i)]] = f.params[i];
    e[f.names[static_cast<std::size_t>(i)]] = num_or_null(std::sqrt(std::max(0.0, f.covariance(i, i))));
  }
  json j;
  j["params"] = p;
  j["stderr"] = e;
  j["chi2"] = f.chi2;
  j["chi2_red"] = num_or_null(f.chi2_red);
  j["dof"] = f.dof;
  j["p_value"] = f.p_value;
  return j;
}

struct TempGroup {
  double T;
  std::vector<FreqPoint> points;
};

std::vector<TempGroup> by_temperature(const HeatingDataset& d) {
  std::vector<TempGroup> g;
  for (const auto& r : d.records) {
    auto it = std::find_if(g.begin(), g.end(), [&](const TempGroup& x) {
      return std::abs(x.T - r.T) <= 1e-9 * std::max(x.T, r.T);
    });
    if (it == g.end()) {
      g.push_back({r.T, {}});
      it = g.end() - 1;
    }
    it->points.push_back({angular_from_hz(r.f_hz), r.gamma, r.sigma});
  }
  std::sort(g.begin(), g.end(), [](const TempGroup& a, const TempGroup& b) { return a.T < b.T; });
  return g;
}

void cmd_fit(const FitArgs& a, const CLI::App& sub, std::ostream& out) {
  Manifest m = manifest_for(sub);
  m.seed = a.seed;
  m.configs.push_back(a.data);
  const HeatingDataset data = read_dataset(a.data);
  if (data.records.size() < 3) throw DataError("fit needs at least 3 data rows");
  data.validate();
  json rep;
  rep["model"] = a.model;
  rep["n_records"] = data.records.size();
  if (a.model == "freq") {
    rep["fits"] = json::array();
    rep["warnings"] = json::array();
    for (const auto& g : by_temperature(data)) {
      try {
        const auto f = fit_freq_power_law(g.points);
        json j;
        j["T_K"] = g.T;
        j["gamma"] = f.gamma_coeff;
        j["gamma_err"] = std::sqrt(std::max(0.0, f.covariance(0, 0)));
        j["alpha"] = f.alpha;
        j["alpha_err"] = std::sqrt(std::max(0.0, f.covariance(1, 1)));
        j["chi2"] = f.chi2;
        j["n_data"] = f.n_data;
        rep["fits"].push_back(j);
      } catch (const DataError& e) {
        rep["warnings"].push_back("T = " + num(g.T) + " K skipped: " + e.what());
      }
    }
    if (rep["fits"].empty()) throw DataError("no temperature has enough points for a frequency fit");
  } else if (a.model == "temp") {
    TempFitOptions o;
    o.seed = a.seed;
    o.starts = a.starts;
    const auto r = fit_temperature_models(data, o);
    rep["simple"] = lsq_json(r.simple.fit);
    rep["simple"]["score"] = score_json(r.simple.score);
    rep["piecewise"] = lsq_json(r.piecewise.fit);
    rep["piecewise"]["score"] = score_json(r.piecewise.score);
    rep["piecewise"]["t_star_at_boundary"] = r.piecewise.t_star_at_boundary;
    rep["piecewise"]["plateau_width_K"] = plateau_width(r.piecewise.params, 0.1);
    rep["aic_prefers_piecewise"] = r.piecewise.score.aic < r.simple.score.aic;
    rep["bic_prefers_piecewise"] = r.piecewise.score.bic < r.simple.score.bic;
    rep["warnings"] = r.warnings;
  } else if (a.model == "surface") {
    const auto curve = noise_curve_from_dataset(data);
    const auto r = fit_surface_models(curve);
    rep["noise_curve"] = json::array();
    for (const auto& p : curve) rep["noise_curve"].push_back({{"T_K", p.T}, {"S_E", p.S}, {"sigma_S_E", p.sigma}});
    rep["power_law"] = surface_json(r.power_law);
    rep["arrhenius"] = surface_json(r.arrhenius);
  } else {
    throw ConfigError("--model must be freq, temp or surface");
  }
  emit_json(m, rep, a.out, out);
}

// ------------------------------------------------------------------ taf

struct TafArgs {
  std::string data, out, report;
  double omega_hz = 1e6;
  double tau0 = 1e-13;
  double lambda = -1.0;
  int bootstrap = 200;
  std::uint64_t seed = 12345;
};

void cmd_taf(const TafArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  Manifest m = manifest_for(sub);
  m.seed = a.seed;
  m.configs.push_back(a.data);
  const double omega = angular_from_hz(a.omega_hz);
  std::vector<SurfacePoint> curve;
  std::vector<AlphaPoint> measured;
  if (auto c = read_noise_curve(a.data)) {
    curve = std::move(*c);
  } else {
    const HeatingDataset data = read_dataset(a.data);
    if (data.records.empty()) throw DataError("no data rows");
    curve = noise_curve_from_dataset(data);
    for (const auto& g : by_temperature(data)) {
      try {
        const auto f = fit_freq_power_law(g.points);
        measured.push_back({f.alpha, std::sqrt(std::max(0.0, f.covariance(1, 1))), g.T});
      } catch (const DataError&) {
      }
    }
  }
  if (curve.empty()) throw DataError("no data rows");
  std::sort(curve.begin(), curve.end(), [](const SurfacePoint& x, const SurfacePoint& y) { return x.T < y.T; });
  SplineOptions so;
  so.lambda = a.lambda;
  so.bootstrap = a.bootstrap;
  so.seed = a.seed;
  const LogLogSpline spline(curve, so);
  if (taf_ill_conditioned(omega, a.tau0))
    err << "warning: |ln(omega tau0)| < 1, TAF prediction is ill-conditioned\n";

  std::ostringstream body;
  body << "T_K,slope,slope_lo,slope_hi,alpha_pred,alpha_pred_lo,alpha_pred_hi\n";
  auto predicted = [&](double T) { return taf_alpha(spline.slope(T), omega, a.tau0); };
  for (const auto& p : curve) {
    const double s = spline.slope(p.T);
    const auto [lo, hi] = spline.slope_band(p.T);
    const double al = taf_alpha(lo, omega, a.tau0), ah = taf_alpha(hi, omega, a.tau0);
    body << num(p.T) << "," << num(s) << "," << num(lo) << "," << num(hi) << "," << num(taf_alpha(s, omega, a.tau0))
         << "," << num(std::min(al, ah)) << "," << num(std::max(al, ah)) << "\n";
  }
  emit_csv(m, body.str(), a.out, out);

  if (!a.report.empty()) {
    json rep;
    rep["omega_hz"] = a.omega_hz;
    rep["tau0"] = a.tau0;
    rep["spline_lambda"] = spline.lambda();
    rep["ill_conditioned"] = taf_ill_conditioned(omega, a.tau0);
    if (measured.size() >= 2) {
      const auto c = taf_consistency_chi2(measured, predicted);
      rep["consistency"] = {{"chi2", c.chi2}, {"dof", c.dof}, {"p_value", c.p_value}};
      rep["measured_alpha"] = json::array();
      for (const auto& p : measured)
        rep["measured_alpha"].push_back(
            {{"T_K", p.T}, {"alpha", p.alpha}, {"sigma", p.sigma}, {"alpha_pred", predicted(p.T)}});
    } else {
      rep["consistency"] = nullptr;
    }
    emit_json(m, rep, a.report, out);
  }
}

// ----------------------------------------------------------------- zeta

struct ZetaArgs {
  std::string config, f_ratio = "1", out;
  double patch_um = 1.0;
  double near_mm = 1.0;
  bool exact = false;
  unsigned threads = 0;
};

void cmd_zeta(const ZetaArgs& a, const CLI::App& sub, std::ostream& out) {
  Manifest m = manifest_for(sub);
  const fs::path path(a.config);
  m.configs.push_back(path);
  const PatchScene scene = load_scene(path);
  const auto ratios = parse_grid("--f-ratio", a.f_ratio);
  for (double r : ratios)
    if (!(r >= 0.0)) throw ConfigError("--f-ratio values must be >= 0");
  if (!(a.patch_um > 0.0)) throw ConfigError("--patch-um must be > 0");
  PatchOptions po;
  po.mode = a.exact ? PatchMode::exact : PatchMode::hierarchical;
  po.near_half_width = a.near_mm * 1e-3;
  po.threads = a.threads;
  const ZetaResult base = patch_integrals(scene, a.patch_um * 1e-6, po);
  std::ostringstream body;
  body << "f_ratio,zeta\n";
  for (double r : ratios) body << num(r) << "," << num(zeta_from(base, r)) << "\n";
  emit_csv(m, body.str(), a.out, out);
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string config, model = "piecewise", temps, freqs, out;
  double noise = 0.1;
  std::uint64_t seed = 1;
};

void cmd_synth(const SynthArgs& a, const CLI::App& sub, std::ostream& out) {
  Manifest m = manifest_for(sub);
  m.seed = a.seed;
  const fs::path path(a.config);
  m.configs.push_back(path);
  const ModelParams mp = load_params(path);
  SynthSpec s;
  s.noise_frac = a.noise;
  s.seed = a.seed;
  s.surface_alpha = mp.surface_alpha;
  if (a.model == "simple" || a.model == "piecewise") {
    if (!mp.temp) throw ConfigError("params file has no [temperature_model] section", path.string());
    s.model = a.model == "simple" ? SynthModel::simple : SynthModel::piecewise;
    s.temp = *mp.temp;
  } else if (a.model == "power_law" || a.model == "arrhenius") {
    const auto& p = a.model == "power_law" ? mp.power_law : mp.arrhenius;
    if (!p) throw ConfigError("params file has no [surface_model " + a.model + "] section", path.string());
    s.model = a.model == "power_law" ? SynthModel::surface_power_law : SynthModel::surface_arrhenius;
    s.surface.assign(p->begin(), p->end());
  } else {
    throw ConfigError("--model must be simple, piecewise, power_law or arrhenius");
  }
  s.temperatures = a.temps.empty() ? mp.temperatures : parse_grid("--temps", a.temps);
  s.frequencies = a.freqs.empty() ? mp.frequencies : parse_grid("--freqs", a.freqs);
  if (s.temperatures.empty()) throw ConfigError("no temperature grid: pass --temps or add [grid] temperatures");
  if (s.frequencies.empty() && !(s.model == SynthModel::simple || s.model == SynthModel::piecewise))
    throw ConfigError("no frequency grid: pass --freqs or add [grid] frequencies");
  const HeatingDataset d = synth_dataset(s);
  std::ostringstream body;
  write_dataset_csv(body, d);
  emit_csv(m, body.str(), a.out, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Electric-field noise toolkit for surface ion traps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version);

  FdtArgs fa;
  auto* fdt = app.add_subcommand("fdt", "Thermal noise above a layered stack versus temperature");
  fdt->add_option("--config", fa.config, "Stack file")->required();
  fdt->add_option("--materials", fa.materials, "Materials file overriding the stack's own");
  fdt->add_option("--temps", fa.temps, "Temperatures in K: a,b,c or start:stop:step")->required();
  fdt->add_option("--omega-hz", fa.omega_hz, "Frequency in Hz")->capture_default_str();
  fdt->add_option("--distance", fa.distance, "Ion-surface distance in m")->capture_default_str();
  fdt->add_option("--tolerance", fa.tolerance, "Relative quadrature tolerance")->capture_default_str();
  fdt->add_option("--threads", fa.threads, "Worker threads (0 = all cores)");
  fdt->add_flag("--lambda-band", fa.lambda_band, "One column per London depth in --lambda-values");
  fdt->add_option("--lambda-values", fa.lambda_values, "London depths lambda0 in m")->capture_default_str();
  fdt->add_option("--out", fa.out, "Output CSV (default stdout)");

  JnnArgs ja;
  auto* jnn = app.add_subcommand("jnn", "Johnson-Nyquist noise budget per electrode");
  jnn->add_option("--config", ja.config, "Circuit file")->required();
  jnn->add_option("--materials", ja.materials, "Materials file overriding the circuit's own");
  jnn->add_option("--temps", ja.temps, "Temperatures in K")->required();
  jnn->add_option("--omega-hz", ja.omega_hz, "Frequency in Hz")->capture_default_str();
  jnn->add_option("--threads", ja.threads, "Worker threads (0 = all cores)");
  jnn->add_option("--out", ja.out, "Output CSV (default stdout)");

  FitArgs fi;
  auto* fit = app.add_subcommand("fit", "Fit heating-rate data");
  fit->add_option("--data", fi.data, "Heating-rate CSV (T_K,f_Hz,gamma_phps,sigma_phps)")->required();
  fit->add_option("--model", fi.model, "freq, temp or surface")->capture_default_str();
  fit->add_option("--seed", fi.seed, "Seed for the multi-start jitter")->capture_default_str();
  fit->add_option("--starts", fi.starts, "Piecewise-model start points")->capture_default_str();
  fit->add_option("--out", fi.out, "Output JSON (default stdout)");

  TafArgs ta;
  auto* taf = app.add_subcommand("taf", "Fluctuator-model prediction of the spectral exponent");
  taf->add_option("--data", ta.data, "Heating-rate CSV or noise curve (T_K,S_E,sigma_S_E)")->required();
  taf->add_option("--omega-hz", ta.omega_hz, "Frequency in Hz")->capture_default_str();
  taf->add_option("--tau0", ta.tau0, "Attempt time in s")->capture_default_str();
  taf->add_option("--lambda", ta.lambda, "Spline smoothing (negative = cross-validation)");
  taf->add_option("--bootstrap", ta.bootstrap, "Bootstrap resamples for the slope band")->capture_default_str();
  taf->add_option("--seed", ta.seed, "Bootstrap seed")->capture_default_str();
  taf->add_option("--out", ta.out, "Output CSV (default stdout)");
  taf->add_option("--report", ta.report, "JSON report with the consistency test");

  ZetaArgs za;
  auto* zeta = app.add_subcommand("zeta", "Patch-noise fraction of the target region");
  zeta->add_option("--config", za.config, "Scene file")->required();
  zeta->add_option("--f-ratio", za.f_ratio, "Fluctuation-strength ratios: a,b,c or start:stop:step")
      ->capture_default_str();
  zeta->add_option("--patch-um", za.patch_um, "Patch size in um")->capture_default_str();
  zeta->add_option("--near-mm", za.near_mm, "Half width of the direct-sum box in mm")->capture_default_str();
  zeta->add_flag("--exact", za.exact, "Direct summation over every region");
  zeta->add_option("--threads", za.threads, "Worker threads (0 = all cores)");
  zeta->add_option("--out", za.out, "Output CSV (default stdout)");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Synthetic heating-rate dataset");
  synth->add_option("--config", sa.config, "Parameter file")->required();
  synth->add_option("--model", sa.model, "simple, piecewise, power_law or arrhenius")->capture_default_str();
  synth->add_option("--temps", sa.temps, "Temperatures in K");
  synth->add_option("--freqs", sa.freqs, "Frequencies in Hz");
  synth->add_option("--noise", sa.noise, "Relative Gaussian noise")->capture_default_str();
  synth->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
  synth->add_option("--out", sa.out, "Output CSV (default stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*fdt) cmd_fdt(fa, *fdt, out);
    if (*jnn) cmd_jnn(ja, *jnn, out);
    if (*fit) cmd_fit(fi, *fit, out);
    if (*taf) cmd_taf(ta, *taf, out, err);
    if (*zeta) cmd_zeta(za, *zeta, out);
    if (*synth) cmd_synth(sa, *synth, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return data_error;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return numerical_error;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return config_error;
  }
  return ok;
}

}  // namespace trapnoise::cli
