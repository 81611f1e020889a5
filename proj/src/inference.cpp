#include "trapnoise/inference.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "trapnoise/errors.hpp"

namespace trapnoise {

namespace {

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

std::vector<double> distinct_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || !same_value(out.back(), x)) out.push_back(x);
  return out;
}

std::size_t index_of(const std::vector<double>& keys, double v) {
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (same_value(keys[i], v)) return i;
  throw DomainError("value not found among grouping keys");
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line, const std::string& column) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || s.empty())
    throw DataError("column '" + column + "': cannot parse '" + s + "' as a number", line);
  return v;
}

}  // namespace

// ----------------------------------------------------------------- dataset

void HeatingDataset::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::string at = "record " + std::to_string(i + 1) + ": ";
    if (!(r.T > 0.0) || !std::isfinite(r.T)) throw DataError(at + "temperature must be > 0");
    if (!(r.f_hz > 0.0) || !std::isfinite(r.f_hz)) throw DataError(at + "frequency must be > 0");
    if (!(r.gamma >= 0.0) || !std::isfinite(r.gamma)) throw DataError(at + "heating rate must be >= 0");
    if (!(r.sigma > 0.0) || !std::isfinite(r.sigma)) throw DataError(at + "uncertainty must be > 0");
  }
}

std::vector<double> HeatingDataset::frequencies() const {
  std::vector<double> f;
  for (const auto& r : records) f.push_back(r.f_hz);
  return distinct_sorted(std::move(f));
}

HeatingDataset read_dataset_csv(std::istream& in) {
  static const char* required[] = {"T_K", "f_Hz", "gamma_phps", "sigma_phps"};
  HeatingDataset data;
  std::string line;
  std::size_t line_no = 0;
  int col[4] = {-1, -1, -1, -1};
  std::size_t n_cols = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split_csv(t);
    if (!header) {
      n_cols = fields.size();
      for (int k = 0; k < 4; ++k) {
        for (std::size_t i = 0; i < fields.size(); ++i)
          if (fields[i] == required[k]) col[k] = static_cast<int>(i);
        if (col[k] < 0)
          throw DataError(std::string("header is missing column '") + required[k] + "'", line_no);
      }
      header = true;
      continue;
    }
    if (fields.size() != n_cols)
      throw DataError("expected " + std::to_string(n_cols) + " fields, found " +
                          std::to_string(fields.size()),
                      line_no);
    HeatingRecord r;
    r.T = parse_number(fields[col[0]], line_no, required[0]);
    r.f_hz = parse_number(fields[col[1]], line_no, required[1]);
    r.gamma = parse_number(fields[col[2]], line_no, required[2]);
    r.sigma = parse_number(fields[col[3]], line_no, required[3]);
    if (!(r.T > 0.0)) throw DataError("temperature must be > 0", line_no);
    if (!(r.f_hz > 0.0)) throw DataError("frequency must be > 0", line_no);
    if (!(r.gamma >= 0.0)) throw DataError("heating rate must be >= 0", line_no);
    if (!(r.sigma > 0.0)) throw DataError("uncertainty must be > 0", line_no);
    data.records.push_back(r);
  }
  if (!header) throw DataError("no header row found");
  return data;
}

void write_dataset_csv(std::ostream& out, const HeatingDataset& data) {
  out << "T_K,f_Hz,gamma_phps,sigma_phps\n";
  char buf[160];
  for (const auto& r : data.records) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", r.T, r.f_hz, r.gamma, r.sigma);
    out << buf;
  }
}

// ------------------------------------------------------------------ scores

ModelScore information_criteria(double rss, std::size_t n, std::size_t m) {
  if (!(rss >= 0.0)) throw DomainError("information_criteria: rss must be >= 0");
  if (n <= m) throw DomainError("information_criteria: need more data points than parameters");
  ModelScore s;
  s.rss = rss;
  s.n_data = n;
  s.n_params = m;
  if (rss == 0.0) {
    s.perfect_fit = true;
    s.aic = s.bic = -INFINITY;
    return s;
  }
  const double N = static_cast<double>(n);
  const double base = N * std::log(rss / N);
  s.aic = base + 2.0 * static_cast<double>(m);
  s.bic = base + static_cast<double>(m) * std::log(N);
  return s;
}

double chi2_survival(double chi2, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi2_survival: dof must be > 0");
  if (!(chi2 > 0.0)) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, chi2));
}

// -------------------------------------------------------- frequency law

double FreqPowerLawFit::operator()(double omega) const {
  return gamma_coeff * std::pow(omega / omega0, alpha - 1.0);
}

FreqPowerLawFit fit_freq_power_law(const std::vector<FreqPoint>& points) {
  if (points.size() < 3) throw DataError("frequency power-law fit needs at least 3 points");
  std::vector<double> om;
  for (const auto& p : points) {
    if (!(p.omega > 0.0)) throw DataError("frequencies must be > 0");
    if (!(p.sigma > 0.0)) throw DataError("uncertainties must be > 0");
    om.push_back(p.omega);
  }
  if (distinct_sorted(om).size() < 2) throw DataError("frequency power-law fit needs distinct frequencies");

  const double omega0 = omega_1MHz;
  // Weighted log-log regression for the start point.
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    if (!(p.gamma > 0.0)) continue;
    const double w = (p.gamma / p.sigma) * (p.gamma / p.sigma);
    const double x = std::log(p.omega / omega0);
    const double y = std::log(p.gamma);
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  double slope = 0.0, icpt = 0.0;
  const double det = sw * sxx - sx * sx;
  if (sw > 0.0 && std::abs(det) > 1e-300) {
    slope = (sw * sxy - sx * sy) / det;
    icpt = (sy - slope * sx) / sw;
  } else if (sw > 0.0) {
    icpt = sy / sw;
  } else {
    icpt = std::log(1e-3);
  }

  WeightedProblem prob;
  prob.names = {"gamma", "alpha"};
  prob.transforms = {ParamTransform::positive(), ParamTransform::identity()};
  const auto n = static_cast<Eigen::Index>(points.size());
  prob.y.resize(n);
  prob.sigma.resize(n);
  Eigen::VectorXd lx(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    prob.y[i] = points[i].gamma;
    prob.sigma[i] = points[i].sigma;
    lx[i] = std::log(points[i].omega / omega0);
  }
  prob.model = [lx](const Eigen::VectorXd& p) {
    return (p[0] * ((p[1] - 1.0) * lx.array()).exp()).matrix().eval();
  };
  Eigen::VectorXd start(2);
  start << std::exp(icpt), slope + 1.0;
  const LsqFit f = weighted_least_squares(prob, start);
  FreqPowerLawFit out;
  out.gamma_coeff = f.params[0];
  out.alpha = f.params[1];
  out.covariance = f.covariance;
  out.omega0 = omega0;
  out.chi2 = f.chi2;
  out.n_data = f.n_data;
  out.omegas = om;
  return out;
}

// -------------------------------------------------------- temperature

double gamma_simple(double gamma0, double T, const TempFitParams& p) {
  return gamma0 * (1.0 + std::pow(T / p.T1, p.beta1));
}

double gamma_piecewise(double gamma0, double T, const TempFitParams& p) {
  if (T < p.T_star) return gamma_simple(gamma0, T, p);
  return gamma_simple(gamma0, p.T_star, p) * (1.0 + std::pow((T - p.T_star) / p.T2, p.beta2));
}

double gamma_model(const TempFitParams& p, double f_hz, double T) {
  for (const auto& [f, g0] : p.gamma0)
    if (same_value(f, f_hz)) return p.piecewise ? gamma_piecewise(g0, T, p) : gamma_simple(g0, T, p);
  throw DomainError("no Gamma0 for frequency " + std::to_string(f_hz) + " Hz");
}

namespace {

struct TempProblem {
  std::vector<double> freqs;
  std::vector<std::size_t> group;
  Eigen::VectorXd T;
  Eigen::VectorXd y;
  Eigen::VectorXd sigma;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

TempProblem make_temp_problem(const HeatingDataset& data) {
  TempProblem tp;
  tp.freqs = data.frequencies();
  const auto n = static_cast<Eigen::Index>(data.records.size());
  tp.T.resize(n);
  tp.y.resize(n);
  tp.sigma.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = data.records[static_cast<std::size_t>(i)];
    tp.group.push_back(index_of(tp.freqs, r.f_hz));
    tp.T[i] = r.T;
    tp.y[i] = r.gamma;
    tp.sigma[i] = r.sigma;
  }
  tp.t_lo = tp.T.minCoeff();
  tp.t_hi = tp.T.maxCoeff();
  return tp;
}

TempFitParams unpack(const TempProblem& tp, const Eigen::VectorXd& p, bool piecewise) {
  TempFitParams out;
  const std::size_t k = tp.freqs.size();
  for (std::size_t i = 0; i < k; ++i) out.gamma0[tp.freqs[i]] = p[static_cast<Eigen::Index>(i)];
  out.T1 = p[static_cast<Eigen::Index>(k)];
  out.beta1 = p[static_cast<Eigen::Index>(k + 1)];
  out.piecewise = piecewise;
  if (piecewise) {
    out.T2 = p[static_cast<Eigen::Index>(k + 2)];
    out.beta2 = p[static_cast<Eigen::Index>(k + 3)];
    out.T_star = p[static_cast<Eigen::Index>(k + 4)];
  }
  return out;
}

WeightedProblem temp_weighted_problem(const TempProblem& tp, bool piecewise) {
  WeightedProblem prob;
  const std::size_t k = tp.freqs.size();
  for (std::size_t i = 0; i < k; ++i) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "Gamma0[%.6g Hz]", tp.freqs[i]);
    prob.names.emplace_back(buf);
    prob.transforms.push_back(ParamTransform::positive());
  }
  prob.names.insert(prob.names.end(), {"T1", "beta1"});
  prob.transforms.insert(prob.transforms.end(), {ParamTransform::positive(), ParamTransform::positive()});
  if (piecewise) {
    prob.names.insert(prob.names.end(), {"T2", "beta2", "T_star"});
    prob.transforms.insert(prob.transforms.end(),
                           {ParamTransform::positive(), ParamTransform::positive(),
                            ParamTransform::bounded(tp.t_lo, tp.t_hi)});
  }
  prob.y = tp.y;
  prob.sigma = tp.sigma;
  prob.model = [&tp, piecewise, k](const Eigen::VectorXd& p) {
    TempFitParams q;
    q.T1 = p[static_cast<Eigen::Index>(k)];
    q.beta1 = p[static_cast<Eigen::Index>(k + 1)];
    if (piecewise) {
      q.T2 = p[static_cast<Eigen::Index>(k + 2)];
      q.beta2 = p[static_cast<Eigen::Index>(k + 3)];
      q.T_star = p[static_cast<Eigen::Index>(k + 4)];
    }
    Eigen::VectorXd out(tp.T.size());
    for (Eigen::Index i = 0; i < tp.T.size(); ++i) {
      const double g0 = p[static_cast<Eigen::Index>(tp.group[static_cast<std::size_t>(i)])];
      out[i] = piecewise ? gamma_piecewise(g0, tp.T[i], q) : gamma_simple(g0, tp.T[i], q);
    }
    return out;
  };
  return prob;
}

// Lowest-chi2 fit among the start points; starts that fail are skipped.
LsqFit best_of(const WeightedProblem& prob, const std::vector<Eigen::VectorXd>& starts,
               const std::string& what) {
  bool have = false;
  LsqFit best;
  std::string last_error;
  for (const auto& s : starts) {
    try {
      LsqFit f = weighted_least_squares(prob, s);
      if (!have || f.chi2 < best.chi2) {
        best = std::move(f);
        have = true;
      }
    } catch (const NumericalError& e) {
      last_error = e.what();
    } catch (const DomainError& e) {
      last_error = e.what();
    }
  }
  if (!have) throw NumericalError(what + ": every start point failed (" + last_error + ")");
  return best;
}

}  // namespace

TempFitReport fit_temperature_models(const HeatingDataset& data, const TempFitOptions& opts) {
  data.validate();
  const TempProblem tp = make_temp_problem(data);
  std::vector<double> temps(tp.T.data(), tp.T.data() + tp.T.size());
  temps = distinct_sorted(temps);
  if (temps.size() < 4) throw DataError("temperature fit needs at least 4 distinct temperatures");
  const std::size_t k = tp.freqs.size();
  if (data.records.size() <= k + 5)
    throw DataError("temperature fit needs more records than piecewise-model parameters");
  if (opts.starts < 1) throw DomainError("temperature fit needs at least one start");

  // Start Gamma0 at the lowest-temperature rate of each group.
  std::vector<double> g0(k, 0.0), tmin(k, INFINITY);
  for (Eigen::Index i = 0; i < tp.T.size(); ++i) {
    const std::size_t g = tp.group[static_cast<std::size_t>(i)];
    if (tp.T[i] < tmin[g]) {
      tmin[g] = tp.T[i];
      g0[g] = std::max(tp.y[i], 1e-12);
    }
  }
  const double t_mid = temps[temps.size() / 2];
  auto simple_start = [&](double T1, double beta1) {
    Eigen::VectorXd s(static_cast<Eigen::Index>(k + 2));
    for (std::size_t i = 0; i < k; ++i) s[static_cast<Eigen::Index>(i)] = g0[i];
    s[static_cast<Eigen::Index>(k)] = T1;
    s[static_cast<Eigen::Index>(k + 1)] = beta1;
    return s;
  };

  TempFitReport rep;
  const WeightedProblem p1 = temp_weighted_problem(tp, false);
  std::vector<Eigen::VectorXd> starts1;
  for (double fac : {0.3, 1.0, 3.0})
    for (double b : {1.5, 3.0}) starts1.push_back(simple_start(fac * t_mid, b));
  const LsqFit f1 = best_of(p1, starts1, "simple temperature model");
  rep.simple.params = unpack(tp, f1.params, false);
  rep.simple.fit = f1;
  rep.simple.score = information_criteria(f1.chi2, f1.n_data, static_cast<std::size_t>(f1.params.size()));

  const WeightedProblem p2 = temp_weighted_problem(tp, true);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::vector<Eigen::VectorXd> starts2;
  const double span = tp.t_hi - tp.t_lo;
  for (int s = 0; s < opts.starts; ++s) {
    Eigen::VectorXd st(static_cast<Eigen::Index>(k + 5));
    for (std::size_t i = 0; i < k; ++i) st[static_cast<Eigen::Index>(i)] = g0[i];
    const double u = (s + 0.5) / opts.starts;
    const double tstar = tp.t_lo + span * (0.1 + 0.8 * u);
    st[static_cast<Eigen::Index>(k)] = std::max(0.5 * tstar, tp.t_lo) * std::exp(jitter(rng));
    st[static_cast<Eigen::Index>(k + 1)] = 3.0 * std::exp(jitter(rng));
    st[static_cast<Eigen::Index>(k + 2)] = 0.5 * span * std::exp(jitter(rng));
    st[static_cast<Eigen::Index>(k + 3)] = 3.0 * std::exp(jitter(rng));
    st[static_cast<Eigen::Index>(k + 4)] = tstar;
    starts2.push_back(st);
  }
  const LsqFit f2 = best_of(p2, starts2, "piecewise temperature model");
  rep.piecewise.params = unpack(tp, f2.params, true);
  rep.piecewise.fit = f2;
  rep.piecewise.score = information_criteria(f2.chi2, f2.n_data, static_cast<std::size_t>(f2.params.size()));
  const double ts = rep.piecewise.params.T_star;
  if (ts - tp.t_lo < 1e-3 * span || tp.t_hi - ts < 1e-3 * span) {
    rep.piecewise.t_star_at_boundary = true;
    rep.warnings.push_back("T* converged to the edge of the data range; it is constrained, not fitted");
  }
  return rep;
}

double plateau_width(const TempFitParams& p, double tolerance_frac) {
  if (!(tolerance_frac >= 0.0)) throw DomainError("plateau_width: tolerance must be >= 0");
  if (!(p.T2 > 0.0) || !(p.beta2 > 0.0)) throw DomainError("plateau_width: needs T2 > 0 and beta2 > 0");
  if (tolerance_frac == 0.0) return 0.0;
  return p.T2 * std::pow(tolerance_frac, 1.0 / p.beta2);
}

// ------------------------------------------------------------- surface

double surface_power_law(double T, double s0, double beta, double t0) {
  return s0 * std::pow(1.0 + T / t0, beta);
}

double surface_arrhenius(double T, double s0, double st, double t0) {
  return s0 + st * std::exp(-t0 / T);
}

namespace {

SurfaceModelFit finish_surface(const std::string& model, const LsqFit& f) {
  SurfaceModelFit out;
  out.model = model;
  out.names = f.names;
  out.params = f.params;
  out.covariance = f.covariance;
  out.chi2 = f.chi2;
  out.dof = f.n_data - static_cast<std::size_t>(f.params.size());
  out.chi2_red = f.chi2_red();
  out.p_value = chi2_survival(f.chi2, static_cast<double>(out.dof));
  return out;
}

}  // namespace

SurfaceFitParams fit_surface_models(const std::vector<SurfacePoint>& curve) {
  if (curve.size() < 5) throw DataError("surface-noise fits need at least 5 points");
  const auto n = static_cast<Eigen::Index>(curve.size());
  Eigen::VectorXd T(n), y(n), s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = curve[static_cast<std::size_t>(i)];
    if (!(c.T > 0.0) || !(c.S > 0.0) || !(c.sigma > 0.0))
      throw DataError("surface-noise points need T > 0, S > 0 and sigma > 0");
    T[i] = c.T;
    y[i] = c.S;
    s[i] = c.sigma;
  }
  std::vector<double> ts(T.data(), T.data() + n);
  std::sort(ts.begin(), ts.end());
  const double t_med = ts[ts.size() / 2];
  const double t_max = ts.back();
  const double s_min = y.minCoeff(), s_max = y.maxCoeff();
  Eigen::Index i_lo = 0, i_hi = 0;
  T.minCoeff(&i_lo);
  T.maxCoeff(&i_hi);

  SurfaceFitParams out;
  {
    WeightedProblem prob;
    prob.names = {"S_E0", "beta", "T0"};
    prob.transforms = {ParamTransform::positive(), ParamTransform::identity(), ParamTransform::positive()};
    prob.y = y;
    prob.sigma = s;
    prob.model = [T](const Eigen::VectorXd& p) {
      return (p[0] * (1.0 + T.array() / p[2]).pow(p[1])).matrix().eval();
    };
    std::vector<Eigen::VectorXd> starts;
    for (double fac : {0.1, 0.3, 1.0, 3.0}) {
      const double t0 = fac * t_med;
      const double a = std::log1p(T[i_lo] / t0), b = std::log1p(T[i_hi] / t0);
      double beta = b > a ? std::log(y[i_hi] / y[i_lo]) / (b - a) : 1.0;
      if (!std::isfinite(beta)) beta = 1.0;
      Eigen::VectorXd st(3);
      st << y[i_lo] / std::pow(1.0 + T[i_lo] / t0, beta), beta, t0;
      starts.push_back(st);
    }
    out.power_law = finish_surface("power_law", best_of(prob, starts, "power-law surface fit"));
  }
  {
    WeightedProblem prob;
    prob.names = {"S_E0", "S_ET", "T0"};
    prob.transforms = {ParamTransform::positive(), ParamTransform::positive(), ParamTransform::positive()};
    prob.y = y;
    prob.sigma = s;
    prob.model = [T](const Eigen::VectorXd& p) {
      return (p[0] + p[1] * (-p[2] / T.array()).exp()).matrix().eval();
    };
    std::vector<Eigen::VectorXd> starts;
    for (double fac : {0.3, 1.0, 3.0}) {
      const double t0 = fac * t_med;
      const double s0 = 0.9 * s_min;
      Eigen::VectorXd st(3);
      st << s0, std::max(s_max - s0, 1e-3 * s_max) * std::exp(t0 / t_max), t0;
      starts.push_back(st);
    }
    out.arrhenius = finish_surface("arrhenius", best_of(prob, starts, "Arrhenius surface fit"));
  }
  return out;
}

// -------------------------------------------------------------- spline

LogLogSpline::LogLogSpline(const std::vector<SurfacePoint>& curve, const SplineOptions& opts)
    : band_level_(opts.band_level) {
  if (curve.size() < 4) throw DataError("spline needs at least 4 points");
  const auto n = static_cast<Eigen::Index>(curve.size());
  x_.resize(n);
  y_.resize(n);
  w_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = curve[static_cast<std::size_t>(i)];
    if (!(c.T > 0.0) || !(c.S > 0.0) || !(c.sigma > 0.0))
      throw DataError("spline points need T > 0, S > 0 and sigma > 0");
    x_[i] = std::log(c.T);
    y_[i] = std::log(c.S);
    const double rel = c.sigma / c.S;
    w_[i] = 1.0 / (rel * rel);
    if (i > 0 && !(x_[i] > x_[i - 1])) throw DataError("spline temperatures must be strictly increasing");
  }

  // Penalty pieces: Q (n x n-2) and R (n-2 x n-2).
  const Eigen::Index m = n - 2;
  Eigen::VectorXd h = x_.tail(n - 1) - x_.head(n - 1);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 1; j <= m; ++j) {
    Q(j - 1, j - 1) = 1.0 / h[j - 1];
    Q(j, j - 1) = -1.0 / h[j - 1] - 1.0 / h[j];
    Q(j + 1, j - 1) = 1.0 / h[j];
    R(j - 1, j - 1) = (h[j - 1] + h[j]) / 3.0;
    if (j < m) R(j - 1, j) = R(j, j - 1) = h[j] / 6.0;
  }
  Q_ = Q;
  R_ = R;

  if (opts.lambda >= 0.0) {
    lambda_ = opts.lambda;
  } else {
    // Generalized cross-validation over a log grid, then golden-section.
    const Eigen::VectorXd winv = w_.cwiseInverse();
    auto gcv = [&](double lam) {
      const Eigen::MatrixXd M = R + lam * Q.transpose() * winv.asDiagonal() * Q;
      const Eigen::MatrixXd Minv = M.ldlt().solve(Eigen::MatrixXd::Identity(m, m));
      const Eigen::MatrixXd S = lam * winv.asDiagonal() * Q * Minv * Q.transpose();
      const Eigen::VectorXd f = y_ - S * y_;
      const double tr = static_cast<double>(n) - S.trace();
      const double rss = (w_.array() * (y_ - f).array().square()).sum();
      const double denom = 1.0 - tr / static_cast<double>(n);
      return rss / static_cast<double>(n) / (denom * denom);
    };
    double best_s = -12.0, best_v = INFINITY;
    for (double sgrid = -12.0; sgrid <= 8.0 + 1e-9; sgrid += 0.25) {
      const double v = gcv(std::pow(10.0, sgrid));
      if (v < best_v) {
        best_v = v;
        best_s = sgrid;
      }
    }
    double a = best_s - 0.25, b = best_s + 0.25;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 40; ++it) {
      const double c = b - g * (b - a), d = a + g * (b - a);
      if (gcv(std::pow(10.0, c)) < gcv(std::pow(10.0, d)))
        b = d;
      else
        a = c;
    }
    lambda_ = std::pow(10.0, 0.5 * (a + b));
  }
  fit_ = solve(y_, lambda_);

  if (opts.bootstrap > 0) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    Eigen::VectorXd e = (w_.array().sqrt() * (y_ - fit_.f).array()).matrix();
    for (int b = 0; b < opts.bootstrap; ++b) {
      Eigen::VectorXd yb(n);
      for (Eigen::Index i = 0; i < n; ++i) yb[i] = fit_.f[i] + e[pick(rng)] / std::sqrt(w_[i]);
      boot_.push_back(solve(yb, lambda_));
    }
  }
}

LogLogSpline::Fit LogLogSpline::solve(const Eigen::VectorXd& y, double lambda) const {
  const Eigen::Index n = x_.size();
  const Eigen::Index m = n - 2;
  const Eigen::VectorXd winv = w_.cwiseInverse();
  const Eigen::MatrixXd M = R_ + lambda * Q_.transpose() * winv.asDiagonal() * Q_;
  const Eigen::VectorXd gamma = M.ldlt().solve(Q_.transpose() * y);
  Fit f;
  f.f = y - lambda * (winv.asDiagonal() * (Q_ * gamma));
  f.m2 = Eigen::VectorXd::Zero(n);
  f.m2.segment(1, m) = gamma;
  return f;
}

double LogLogSpline::eval(const Fit& fit, double x, bool derivative) const {
  const Eigen::Index n = x_.size();
  const double tol = 1e-9 * std::max(1.0, std::abs(x));
  if (x < x_[0] - tol || x > x_[n - 1] + tol)
    throw DomainError("spline evaluated outside the data range");
  Eigen::Index i = static_cast<Eigen::Index>(
      std::upper_bound(x_.data(), x_.data() + n, x) - x_.data()) - 1;
  i = std::clamp<Eigen::Index>(i, 0, n - 2);
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - x) / h;
  const double B = (x - x_[i]) / h;
  if (!derivative)
    return A * fit.f[i] + B * fit.f[i + 1] +
           ((A * A * A - A) * fit.m2[i] + (B * B * B - B) * fit.m2[i + 1]) * h * h / 6.0;
  return (fit.f[i + 1] - fit.f[i]) / h - (3.0 * A * A - 1.0) / 6.0 * h * fit.m2[i] +
         (3.0 * B * B - 1.0) / 6.0 * h * fit.m2[i + 1];
}

double LogLogSpline::log_value(double T) const { return eval(fit_, std::log(T), false); }
double LogLogSpline::slope(double T) const { return eval(fit_, std::log(T), true); }
double LogLogSpline::t_min() const { return std::exp(x_[0]); }
double LogLogSpline::t_max() const { return std::exp(x_[x_.size() - 1]); }

std::pair<double, double> LogLogSpline::slope_band(double T) const {
  const double s = slope(T);
  if (boot_.empty()) return {s, s};
  std::vector<double> v;
  v.reserve(boot_.size());
  for (const auto& b : boot_) v.push_back(eval(b, std::log(T), true));
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {q(0.5 * (1.0 - band_level_)), q(0.5 * (1.0 + band_level_))};
}

// ----------------------------------------------------------------- TAF

double taf_alpha(double slope, double omega, double tau0) {
  if (!(omega > 0.0) || !(tau0 > 0.0)) throw DomainError("taf_alpha: omega and tau0 must be > 0");
  const double l = std::log(omega * tau0);
  if (l == 0.0) throw DomainError("taf_alpha: omega * tau0 must differ from 1");
  const double alpha_dh = 1.0 - (slope - 1.0) / l;
  return -alpha_dh;
}

bool taf_ill_conditioned(double omega, double tau0) {
  return std::abs(std::log(omega * tau0)) < 1.0;
}

Chi2Result taf_consistency_chi2(const std::vector<AlphaPoint>& measured,
                                const std::function<double(double)>& predicted) {
  if (measured.size() < 2) throw DataError("TAF consistency test needs at least 2 points");
  Chi2Result r;
  for (const auto& m : measured) {
    if (!(m.sigma > 0.0)) throw DataError("alpha uncertainties must be > 0");
    const double d = (m.alpha - predicted(m.T)) / m.sigma;
    r.chi2 += d * d;
  }
  r.dof = measured.size();
  r.p_value = chi2_survival(r.chi2, static_cast<double>(r.dof));
  return r;
}

FreqPowerLawFit jnn_corrected_alpha(const FreqPowerLawFit& fit,
                                    const std::function<double(double)>& jnn_level) {
  if (fit.omegas.empty()) throw DomainError("jnn_corrected_alpha: fit carries no frequencies");
  const auto [lo_it, hi_it] = std::minmax_element(fit.omegas.begin(), fit.omegas.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw DomainError("jnn_corrected_alpha: fit spans a single frequency");
  std::vector<FreqPoint> pts;
  const int n = 9;
  for (int i = 0; i < n; ++i) {
    const double w = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    const double total = noise_from_heating_rate({fit(w)}, w).value;
    const double corrected = total - jnn_level(w);
    if (!(corrected > 0.0))
      throw DomainError("jnn_corrected_alpha: JNN level reaches the total noise");
    const double g = heating_rate_from_noise({corrected}, w).value;
    pts.push_back({w, g, 0.01 * g});
  }
  FreqPowerLawFit out = fit_freq_power_law(pts);
  out.omegas = fit.omegas;
  return out;
}

// ------------------------------------------------------------ synthesis

HeatingDataset synth_dataset(const SynthSpec& spec) {
  if (!(spec.noise_frac >= 0.0)) throw DomainError("synth: noise fraction must be >= 0");
  if (spec.temperatures.empty()) throw DomainError("synth: empty temperature grid");
  std::vector<double> freqs = spec.frequencies;
  const bool temp_model = spec.model == SynthModel::simple || spec.model == SynthModel::piecewise;
  if (freqs.empty() && temp_model)
    for (const auto& [f, g] : spec.temp.gamma0) freqs.push_back(f);
  if (freqs.empty()) throw DomainError("synth: empty frequency grid");
  if (!temp_model && spec.surface.size() != 3)
    throw DomainError("synth: surface models take three parameters");
  TempFitParams tp = spec.temp;
  tp.piecewise = spec.model == SynthModel::piecewise;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma_frac = spec.noise_frac > 0.0 ? spec.noise_frac : 0.01;
  HeatingDataset out;
  for (double f : freqs) {
    const double w = angular_from_hz(f);
    for (double T : spec.temperatures) {
      double value = 0.0;
      switch (spec.model) {
        case SynthModel::simple:
        case SynthModel::piecewise:
          value = gamma_model(tp, f, T);
          break;
        case SynthModel::surface_power_law:
        case SynthModel::surface_arrhenius: {
          const double s = spec.model == SynthModel::surface_power_law
                               ? surface_power_law(T, spec.surface[0], spec.surface[1], spec.surface[2])
                               : surface_arrhenius(T, spec.surface[0], spec.surface[1], spec.surface[2]);
          const double sw = s * std::pow(w / omega_1MHz, spec.surface_alpha);
          value = heating_rate_from_noise({sw}, w).value;
          break;
        }
      }
      const double noisy = spec.noise_frac > 0.0 ? value * (1.0 + spec.noise_frac * gauss(rng)) : value;
      out.records.push_back({T, f, std::max(noisy, 0.0), sigma_frac * value});
    }
  }
  return out;
}

std::vector<SurfacePoint> noise_curve_from_dataset(const HeatingDataset& data) {
  data.validate();
  std::vector<double> temps;
  for (const auto& r : data.records) temps.push_back(r.T);
  temps = distinct_sorted(temps);
  std::vector<SurfacePoint> out;
  for (double T : temps) {
    std::vector<FreqPoint> pts;
    for (const auto& r : data.records)
      if (same_value(r.T, T)) pts.push_back({angular_from_hz(r.f_hz), r.gamma, r.sigma});
    std::vector<double> om;
    for (const auto& p : pts) om.push_back(p.omega);
    if (pts.size() >= 3 && distinct_sorted(om).size() >= 2) {
      const FreqPowerLawFit f = fit_freq_power_law(pts);
      const double s = noise_from_heating_rate({f.gamma_coeff}, f.omega0).value;
      const double sg = std::sqrt(std::max(f.covariance(0, 0), 0.0));
      out.push_back({T, s, std::max(s * sg / f.gamma_coeff, 1e-6 * s)});
    } else {
      double sw = 0.0, swy = 0.0, omega = pts.front().omega;
      for (const auto& p : pts) {
        const double w = 1.0 / (p.sigma * p.sigma);
        sw += w;
        swy += w * p.gamma;
      }
      const double g = swy / sw;
      const double s = noise_from_heating_rate({g}, omega).value;
      out.push_back({T, s, s * (1.0 / std::sqrt(sw)) / std::max(g, 1e-300)});
    }
  }
  return out;
}

}  // namespace trapnoise
