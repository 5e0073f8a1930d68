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

// Steady-state linear response and time-series fits.
//
//   chi = -int_0^beta dtau cosh(beta w_z - 2 tau w_z) / cosh(beta w_z)
//         exp[-4 int J / w^2 (coth(beta w / 2)(1 - cosh tau w) + sinh tau w)]
//
// reduces at zero temperature to -2 int e^{-2 tau w_z} exp[-4 int J (1 - e^{-tau w}) / w^2],
// and the superradiant threshold is g_c^2 = (Omega^2 + kappa^2) / (-2 Omega chi).

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dicke/bath.hpp"
#include "dicke/meanfield.hpp"
#include "dicke/series.hpp"

namespace dicke {

struct ChiResult {
  double chi = 0.0;
  double error = 0.0;  // quadrature error estimate
  double beta_t = kInf;
  double omega_z = 0.0;
  SpectralDensity spectral;
  // Zero-temperature ohmic s = 1 closed form; NaN where it does not apply.
  double closed_form = 0.0;
};

struct ChiOptions {
  int spline_nodes = 600;
  double rel_tol = 1e-11;
};

ChiResult chi_susceptibility(const SpectralDensity& j, double beta_t, double omega_z, const ChiOptions& opt = {});

// -(2 / w_c) e^z z^{2 alpha - 1} Gamma(1 - 2 alpha, z), z = 2 w_z / w_c.
double chi_ohmic_closed_form(double alpha, double omega_c, double omega_z);

double critical_coupling(double chi, double omega, double kappa);

// Static chi for the configured bath: -1 / w_z bath-free, -w_z / (w_z^2 + Gamma^2)
// for Markovian dephasing and the quadrature of the exact spectral density
// for the pseudomode backend.
double static_susceptibility(const DickeParams& p, const ChiOptions& opt = {});

struct FitReport {
  std::string model;
  std::vector<std::string> names;
  std::vector<double> values, errors;
  double window_lo = 0.0, window_hi = 0.0;
  double residual_norm = 0.0;
  double r_squared = 0.0;
  bool ok = true;
  std::vector<std::string> notes;
  std::map<std::string, std::vector<double>> data;

  double value(const std::string& name) const;
  double error(const std::string& name) const;
};

// y = slope x + intercept.
FitReport linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// y = A x^exponent by a linear fit in log-log coordinates.
FitReport power_law_fit(const std::vector<double>& x, const std::vector<double>& y);

struct CriticalFitOptions {
  std::string field = "re_a";  // re_a, im_a, sx or abs_a
  double window_factor = 1.2;  // points with g < window_factor * g_c_hint
  double floor = 1e-4;         // |a| below this counts as normal phase
  std::size_t min_points = 6;
};

// |field| = A (g - g_c)^beta fitted on log-transformed data.
FitReport critical_exponent_fit(const std::vector<SweepPoint>& sweep, double g_c_hint,
                                const CriticalFitOptions& opt = {});

enum class PlateauRule { peak, tail };
enum class GrowthWindow { time, level };

struct RiseOptions {
  std::string column = "n_total";
  double level_fraction = 0.5;  // of each curve's plateau
  PlateauRule plateau = PlateauRule::peak;
  double plateau_fraction = 0.1;  // tail rule: trailing share of samples averaged
  // time window: gamma_lo <= omega t <= gamma_hi; level window: from the first
  // crossing of gamma_lo * plateau to that of gamma_hi * plateau.
  GrowthWindow window = GrowthWindow::time;
  double gamma_lo = 10.0, gamma_hi = 50.0;
  double omega = 1.0;
};

double plateau_value(const std::vector<double>& y, const RiseOptions& opt = {});

// Crossing time of `level`, linearly interpolated; NaN if never crossed.
double first_crossing(const std::vector<double>& t, const std::vector<double>& y, double level);

// y = a e^{gamma omega t} + c on the configured window.
FitReport growth_rate_fit(const TimeSeries& s, const RiseOptions& opt = {});

// t_r = A ln N + B across runs, plus per-run growth rates in data["gamma"].
FitReport rise_time_fit(const std::vector<std::pair<double, TimeSeries>>& runs, const RiseOptions& opt = {});

struct RelaxOptions {
  std::string column = "sz";
  double t_lo = 0.0, t_hi = 0.0;  // t_hi = 0 selects the series end; t_lo = 0 its midpoint
  double normal_tolerance = 1e-6;
};

// column = c + A e^{-t / tau}.
FitReport relaxation_time_fit(const TimeSeries& s, const RelaxOptions& opt = {});

// One log-log fit per connected correlator sampled at t_star.
std::vector<FitReport> connected_scaling_fit(const std::vector<std::pair<double, TimeSeries>>& runs, double t_star,
                                             double floor = 1e-12);

}  // namespace dicke
