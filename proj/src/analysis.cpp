// Copyright 2025 The dicke-bmf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dicke/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dicke/least_squares.hpp"
#include "dicke/quadrature.hpp"
#include "dicke/special.hpp"

namespace dicke {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 4 int J(w) / w^2 K(w) dw with K the bath factor of the imaginary-time
// exponent at separation tau.
double chi_exponent(const SpectralDensity& j, double beta_t, double tau, const QuadOptions& q) {
  if (tau == 0.0) return 0.0;
  auto f = [&](double w) {
    if (w == 0.0) return 0.0;
    const double jw = eval_spectral_density(j, w) / (w * w);
    if (std::isinf(beta_t)) return 4.0 * jw * -std::expm1(-tau * w);
    const double k = std::expm1(-(beta_t - tau) * w) * std::expm1(-tau * w) / -std::expm1(-beta_t * w);
    return 4.0 * jw * k;
  };
  return checked(integrate_to_infinity(f, 0.0, 10.0 * j.omega_c, q), "chi inner integral").value;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double r_squared(const std::vector<double>& y, double ssr) {
  const double m = mean(y);
  double syy = 0.0;
  for (double v : y) syy += (v - m) * (v - m);
  return syy > 0.0 ? 1.0 - ssr / syy : 1.0;
}

}  // namespace

double chi_ohmic_closed_form(double alpha, double omega_c, double omega_z) {
  require(alpha >= 0.0 && alpha < 0.5, ErrorKind::domain, "closed form needs 0 <= alpha < 1/2");
  const double z = 2.0 * omega_z / omega_c;
  if (alpha == 0.0) return -1.0 / omega_z;
  return -(2.0 / omega_c) * std::exp(z) * std::pow(z, 2.0 * alpha - 1.0) * upper_incomplete_gamma(1.0 - 2.0 * alpha, z);
}

ChiResult chi_susceptibility(const SpectralDensity& j, double beta_t, double omega_z, const ChiOptions& opt) {
  require(omega_z > 0.0, ErrorKind::domain, "chi needs omega_z > 0");
  require(beta_t > 0.0, ErrorKind::domain, "beta_t must be positive");
  j.validate();
  ChiResult out;
  out.beta_t = beta_t;
  out.omega_z = omega_z;
  out.spectral = j;
  const bool ohmic1 = j.form == SpectralForm::ohmic && j.s == 1.0 && j.alpha < 0.5;
  out.closed_form = std::isinf(beta_t) && ohmic1 ? chi_ohmic_closed_form(j.alpha, j.omega_c, omega_z) : kNaN;
  if (j.is_zero() && std::isinf(beta_t)) {
    out.chi = -1.0 / omega_z;
    return out;
  }
  require(std::isfinite(j.omega_c), ErrorKind::domain, "chi needs a finite cutoff frequency omega_c");

  // Zero temperature runs tau out to where e^{-2 tau w_z} is negligible;
  // finite temperature folds [0, beta] onto [0, beta / 2].
  const double tau_max = std::isinf(beta_t) ? 40.0 / omega_z : 0.5 * beta_t;
  const double scale = j.is_zero() ? 1.0 : j.omega_c;
  const double u_max = std::log1p(scale * tau_max);
  const QuadOptions inner{1e-13, 1e-12, 40000};
  std::vector<double> us(opt.spline_nodes), fs(opt.spline_nodes);
  for (int k = 0; k < opt.spline_nodes; ++k) {
    us[k] = u_max * k / (opt.spline_nodes - 1);
    fs[k] = j.is_zero() ? 0.0 : chi_exponent(j, beta_t, std::expm1(us[k]) / scale, inner);
  }
  const CubicSpline exponent(us, fs);

  auto integrand = [&](double tau) {
    const double e = exponent(std::log1p(scale * tau));
    double pref = std::exp(-2.0 * tau * omega_z);
    if (std::isfinite(beta_t))
      pref = (pref + std::exp(-2.0 * (beta_t - tau) * omega_z)) / (1.0 + std::exp(-2.0 * beta_t * omega_z));
    return pref * std::exp(-e);
  };
  // Integrate in u so the short cutoff scale and the long w_z scale are
  // both resolved.
  auto in_u = [&](double u) { return integrand(std::expm1(u) / scale) * std::exp(u) / scale; };
  const QuadOptions outer{1e-14, opt.rel_tol, 40000};
  const auto r = checked(integrate(in_u, 0.0, u_max, outer), "chi outer integral");
  out.chi = -2.0 * r.value;
  out.error = 2.0 * r.error;
  return out;
}

double critical_coupling(double chi, double omega, double kappa) {
  require(chi < 0.0, ErrorKind::domain, "critical coupling needs chi < 0");
  require(omega > 0.0, ErrorKind::domain, "critical coupling needs omega > 0");
  return std::sqrt((omega * omega + kappa * kappa) / (-2.0 * omega * chi));
}

double static_susceptibility(const DickeParams& p, const ChiOptions& opt) {
  require(p.omega_z > 0.0, ErrorKind::domain, "static susceptibility needs omega_z > 0");
  switch (p.bath.backend) {
    case BathBackend::none: return -1.0 / p.omega_z;
    case BathBackend::markovian: return -p.omega_z / (p.omega_z * p.omega_z + p.bath.gamma_phi * p.bath.gamma_phi);
    case BathBackend::pseudomode: return chi_susceptibility(p.bath.spectral, p.bath.beta_t, p.omega_z, opt).chi;
  }
  return 0.0;
}

double FitReport::value(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return values[k];
  fail(ErrorKind::validation, "fit report has no parameter " + name);
}

double FitReport::error(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return errors[k];
  fail(ErrorKind::validation, "fit report has no parameter " + name);
}

FitReport linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::fit, "linear fit needs two or more points");
  const std::size_t n = x.size();
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  require(sxx > 0.0, ErrorKind::fit, "linear fit needs distinct abscissae");
  const double slope = sxy / sxx, icpt = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < n; ++k) ssr += std::pow(y[k] - slope * x[k] - icpt, 2);
  const double s2 = n > 2 ? ssr / static_cast<double>(n - 2) : 0.0;
  FitReport r;
  r.model = "y = slope * x + intercept";
  r.names = {"slope", "intercept"};
  r.values = {slope, icpt};
  r.errors = {std::sqrt(s2 / sxx), std::sqrt(s2 * (1.0 / n + mx * mx / sxx))};
  r.window_lo = *std::min_element(x.begin(), x.end());
  r.window_hi = *std::max_element(x.begin(), x.end());
  r.residual_norm = std::sqrt(ssr);
  r.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  r.data["x"] = x;
  r.data["y"] = y;
  return r;
}

FitReport power_law_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k) {
    require(x[k] > 0.0 && y[k] != 0.0, ErrorKind::fit, "power-law fit needs positive x and nonzero y");
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(std::abs(y[k])));
  }
  FitReport r = linear_fit(lx, ly);
  r.model = "|y| = A * x^exponent";
  r.names = {"exponent", "log_amplitude"};
  r.window_lo = *std::min_element(x.begin(), x.end());
  r.window_hi = *std::max_element(x.begin(), x.end());
  r.data["x"] = x;
  r.data["y"] = y;
  return r;
}

FitReport critical_exponent_fit(const std::vector<SweepPoint>& sweep, double g_c_hint,
                                const CriticalFitOptions& opt) {
  require(g_c_hint > 0.0, ErrorKind::validation, "critical fit needs a positive g_c hint");
  auto pick = [&](const SweepPoint& p) {
    if (opt.field == "re_a") return p.re_a;
    if (opt.field == "im_a") return p.im_a;
    if (opt.field == "sx") return p.sx;
    if (opt.field == "abs_a") return p.abs_a;
    fail(ErrorKind::validation, "unknown critical fit field " + opt.field);
  };
  // Contiguous superradiant branch (|a| above the floor), walked down from the
  // top of the window.
  std::vector<SweepPoint> sorted = sweep;
  std::sort(sorted.begin(), sorted.end(), [](const SweepPoint& a, const SweepPoint& b) { return a.g > b.g; });
  std::vector<double> g, y;
  for (const auto& p : sorted) {
    if (p.g >= opt.window_factor * g_c_hint) continue;
    if (p.abs_a <= opt.floor || pick(p) == 0.0) break;
    g.insert(g.begin(), p.g);
    y.insert(y.begin(), std::log(std::abs(pick(p))));
  }
  require(!g.empty(), ErrorKind::fit, "no superradiant points in the critical window");
  require(g.size() >= opt.min_points, ErrorKind::fit,
          "critical fit needs " + std::to_string(opt.min_points) + " superradiant points, found " +
              std::to_string(g.size()));
  const double g_min = *std::min_element(g.begin(), g.end());
  double spacing = g_min;
  for (std::size_t k = 1; k < g.size(); ++k) spacing = std::min(spacing, std::abs(g[k] - g[k - 1]));
  // g_c = g_min - exp(x0) keeps every fitted point above threshold.
  auto residual = [&](const Eigen::VectorXd& x) {
    const double gc = g_min - std::exp(x(0));
    Eigen::VectorXd r(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) r(k) = y[k] - x(2) - x(1) * std::log(g[k] - gc);
    return r;
  };
  const double gap0 = g_c_hint < g_min ? g_min - g_c_hint : 0.5 * spacing;
  Eigen::VectorXd x0(3);
  x0 << std::log(gap0), 0.5, y.back() - 0.5 * std::log(g.back() - (g_min - gap0));
  const LmResult lm = levenberg_marquardt(residual, x0);
  const Eigen::MatrixXd cov = lm.covariance();
  const double gc = g_min - std::exp(lm.x(0));
  FitReport r;
  r.model = "|" + opt.field + "| = A * (g - g_c)^beta";
  r.names = {"g_c", "beta", "A"};
  r.values = {gc, lm.x(1), std::exp(lm.x(2))};
  r.errors = {std::exp(lm.x(0)) * std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)),
              std::exp(lm.x(2)) * std::sqrt(cov(2, 2))};
  r.window_lo = g_min;
  r.window_hi = *std::max_element(g.begin(), g.end());
  r.residual_norm = lm.residual.norm();
  r.ok = lm.converged;
  r.data["g"] = g;
  r.data["log_abs_value"] = y;
  return r;
}

double first_crossing(const std::vector<double>& t, const std::vector<double>& y, double level) {
  for (std::size_t k = 1; k < y.size(); ++k)
    if (y[k - 1] < level && y[k] >= level) return t[k - 1] + (level - y[k - 1]) * (t[k] - t[k - 1]) / (y[k] - y[k - 1]);
  return kNaN;
}

double plateau_value(const std::vector<double>& y, const RiseOptions& opt) {
  require(!y.empty(), ErrorKind::fit, "plateau of an empty series");
  if (opt.plateau == PlateauRule::peak) return *std::max_element(y.begin(), y.end());
  const std::size_t tail = std::max<std::size_t>(1, static_cast<std::size_t>(opt.plateau_fraction * y.size()));
  return std::accumulate(y.end() - tail, y.end(), 0.0) / static_cast<double>(tail);
}

FitReport growth_rate_fit(const TimeSeries& s, const RiseOptions& opt) {
  const auto t = s.column("t");
  const auto y = s.column(opt.column);
  double lo = opt.gamma_lo / opt.omega, hi = opt.gamma_hi / opt.omega;
  if (opt.window == GrowthWindow::level) {
    const double plateau = plateau_value(y, opt);
    lo = first_crossing(t, y, opt.gamma_lo * plateau);
    hi = first_crossing(t, y, opt.gamma_hi * plateau);
    require(!std::isnan(lo) && !std::isnan(hi), ErrorKind::fit, "growth window levels are never crossed");
  }
  std::vector<double> tw, yw;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] >= lo && t[k] <= hi) {
      tw.push_back(t[k]);
      yw.push_back(y[k]);
    }
  require(tw.size() >= 4, ErrorKind::fit, "growth fit window holds fewer than four samples");
  // Start from the log-slope between the window ends.
  const double ratio = yw.back() / yw.front();
  double g0 = ratio > 0.0 ? std::log(ratio) / (opt.omega * (tw.back() - tw.front())) : 0.01;
  const double scale = std::max(std::abs(yw.back()), 1e-300);
  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(tw.size());
    for (std::size_t k = 0; k < tw.size(); ++k)
      r(k) = (x(0) * std::exp(x(1) * opt.omega * (tw[k] - tw.back())) + x(2) - yw[k] / scale);
    return r;
  };
  Eigen::VectorXd x0(3);
  x0 << 1.0, g0, 0.0;
  const LmResult lm = levenberg_marquardt(residual, x0);
  const Eigen::MatrixXd cov = lm.covariance();
  FitReport r;
  r.model = opt.column + " = a * exp(gamma * omega * t) + c";
  r.names = {"a", "gamma", "c"};
  const double a = lm.x(0) * scale * std::exp(-lm.x(1) * opt.omega * tw.back());
  r.values = {a, lm.x(1), lm.x(2) * scale};
  r.errors = {std::abs(a) * std::sqrt(cov(0, 0)) / std::max(std::abs(lm.x(0)), 1e-300), std::sqrt(cov(1, 1)),
              scale * std::sqrt(cov(2, 2))};
  r.window_lo = lo;
  r.window_hi = hi;
  r.residual_norm = lm.residual.norm() * scale;
  r.r_squared = r_squared(yw, r.residual_norm * r.residual_norm);
  r.ok = lm.converged;
  return r;
}

FitReport rise_time_fit(const std::vector<std::pair<double, TimeSeries>>& runs, const RiseOptions& opt) {
  require(runs.size() >= 2, ErrorKind::fit, "rise-time fit needs two or more runs");
  std::vector<double> ns, log_ns, tr, gammas;
  std::vector<std::string> notes;
  for (const auto& [n, s] : runs) {
    const auto t = s.column("t");
    const auto y = s.column(opt.column);
    const double plateau = plateau_value(y, opt);
    const double crossing = first_crossing(t, y, opt.level_fraction * plateau);
    double gamma = kNaN;
    try {
      gamma = growth_rate_fit(s, opt).value("gamma");
    } catch (const Error& e) {
      notes.push_back("N = " + std::to_string(n) + ": " + e.what());
    }
    if (std::isnan(crossing)) {
      notes.push_back("N = " + std::to_string(n) + ": no crossing of the half plateau");
      continue;
    }
    ns.push_back(n);
    log_ns.push_back(std::log(n));
    tr.push_back(crossing);
    gammas.push_back(gamma);
  }
  require(ns.size() >= 2, ErrorKind::fit, "fewer than two runs cross their half plateau");
  FitReport r = linear_fit(log_ns, tr);
  r.model = "t_r = A * ln N + B";
  r.names = {"A", "B"};
  const double gm = mean(gammas);
  double spread = 0.0;
  for (double g : gammas) spread = std::max(spread, std::abs(g - gm));
  r.names.insert(r.names.end(), {"gamma_mean", "gamma_spread"});
  r.values.insert(r.values.end(), {gm, spread});
  r.errors.insert(r.errors.end(), {kNaN, kNaN});
  r.window_lo = *std::min_element(ns.begin(), ns.end());
  r.window_hi = *std::max_element(ns.begin(), ns.end());
  r.notes = notes;
  r.data.clear();
  r.data["N"] = ns;
  r.data["t_r"] = tr;
  r.data["gamma"] = gammas;
  return r;
}

FitReport relaxation_time_fit(const TimeSeries& s, const RelaxOptions& opt) {
  const auto t = s.column("t");
  const auto y = s.column(opt.column);
  const double hi = opt.t_hi > 0.0 ? opt.t_hi : t.back();
  const double lo = opt.t_lo > 0.0 ? opt.t_lo : 0.5 * (t.front() + hi);
  std::vector<double> tw, yw;
  FitReport r;
  const bool photons = s.has("q") && s.has("p");
  double photon_max = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] >= lo && t[k] <= hi) {
      tw.push_back(t[k]);
      yw.push_back(y[k]);
      if (photons) photon_max = std::max({photon_max, std::abs(s.at(k, "q")), std::abs(s.at(k, "p"))});
    }
  require(tw.size() >= 4, ErrorKind::fit, "relaxation window holds fewer than four samples");
  if (photon_max >= opt.normal_tolerance) r.notes.push_back("photon field above the normal-phase tolerance");
  bool monotone = true;
  for (std::size_t k = 2; k < yw.size(); ++k)
    if ((yw[k] - yw[k - 1]) * (yw[1] - yw[0]) < 0.0) monotone = false;
  if (!monotone) r.notes.push_back("non-monotone tail");

  // Initial guess from three equally spaced samples.
  const std::size_t m = yw.size() / 2;
  const double y0 = yw.front(), y1 = yw[m], y2 = yw[2 * m];
  const double h = tw[m] - tw.front();
  double tau0 = 0.25 * (tw.back() - tw.front());
  double c0 = yw.back();
  const double rho = (y2 - y1) / (y1 - y0);
  if (rho > 0.0 && rho < 1.0) {
    tau0 = -h / std::log(rho);
    c0 = (y0 * y2 - y1 * y1) / (y0 + y2 - 2.0 * y1);
  }
  const double yscale = std::max(std::abs(y0 - c0), 1e-300);
  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd res(tw.size());
    for (std::size_t k = 0; k < tw.size(); ++k)
      res(k) = (x(0) + x(1) * std::exp(-(tw[k] - tw.front()) / std::exp(x(2))) - yw[k]) / yscale;
    return res;
  };
  Eigen::VectorXd x0(3);
  x0 << c0, y0 - c0, std::log(tau0);
  const LmResult lm = levenberg_marquardt(residual, x0);
  const Eigen::MatrixXd cov = lm.covariance();
  const double tau = std::exp(lm.x(2));
  r.model = opt.column + " = c + A * exp(-t / tau)";
  r.names = {"c", "A", "tau"};
  const double a = lm.x(1) * std::exp(tw.front() / tau);
  r.values = {lm.x(0), a, tau};
  r.errors = {std::sqrt(cov(0, 0)), std::abs(a) * std::sqrt(cov(1, 1)) / std::max(std::abs(lm.x(1)), 1e-300),
              tau * std::sqrt(cov(2, 2))};
  r.window_lo = tw.front();
  r.window_hi = tw.back();
  r.residual_norm = lm.residual.norm() * yscale;
  r.r_squared = r_squared(yw, r.residual_norm * r.residual_norm);
  r.ok = lm.converged;
  return r;
}

std::vector<FitReport> connected_scaling_fit(const std::vector<std::pair<double, TimeSeries>>& runs, double t_star,
                                             double floor) {
  require(runs.size() >= 2, ErrorKind::fit, "connected scaling needs two or more runs");
  static const std::vector<std::string> names = {"c_xx", "c_yy", "c_zz", "c_xy", "c_xz", "c_yz"};
  std::vector<FitReport> out;
  for (const auto& name : names) {
    std::vector<double> ns, vs;
    for (const auto& [n, s] : runs) {
      const auto t = s.column("t");
      const auto it = std::lower_bound(t.begin(), t.end(), t_star - 1e-9);
      require(it != t.end(), ErrorKind::fit, "t* lies beyond a run");
      ns.push_back(n);
      vs.push_back(s.at(static_cast<std::size_t>(it - t.begin()), name));
    }
    const double smallest = std::abs(*std::min_element(vs.begin(), vs.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    }));
    FitReport r;
    if (smallest <= floor) {
      r.model = "|" + name + "| = A * N^exponent";
      r.names = {"exponent", "log_amplitude"};
      r.values = {kNaN, kNaN};
      r.errors = {kNaN, kNaN};
      r.ok = false;
      r.notes.push_back(name + " below the numerical floor; excluded");
      r.data["N"] = ns;
      r.data["value"] = vs;
    } else {
      r = power_law_fit(ns, vs);
      r.model = "|" + name + "| = A * N^exponent";
      r.data.clear();
      r.data["N"] = ns;
      r.data["value"] = vs;
    }
    r.notes.insert(r.notes.begin(), name);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dicke
