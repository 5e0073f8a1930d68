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


#include <doctest.h>

#include <cmath>
#include <functional>

#include "dicke/analysis.hpp"

using namespace dicke;

namespace {

TimeSeries series(const std::vector<std::string>& cols, const std::vector<double>& t,
                  const std::function<std::vector<double>(double)>& row) {
  TimeSeries s(cols);
  for (double x : t) {
    std::vector<double> r = {x};
    for (double v : row(x)) r.push_back(v);
    s.append(r);
  }
  return s;
}

std::vector<double> grid(double t_max, double dt) {
  std::vector<double> t;
  for (long k = 0; k * dt <= t_max + 1e-12; ++k) t.push_back(k * dt);
  return t;
}

}  // namespace

TEST_CASE("bath-free susceptibility is minus one over omega_z") {
  const ChiResult r = chi_susceptibility(SpectralDensity::ohmic(0.0, 1.0), kInf, 0.025);
  CHECK(r.chi == doctest::Approx(-40.0).epsilon(1e-12));
  CHECK(critical_coupling(r.chi, 1.0, 1.0) == doctest::Approx(std::sqrt(0.025)).epsilon(1e-12));
}

TEST_CASE("zero temperature ohmic quadrature matches the incomplete gamma closed form") {
  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double alpha = 0.05 + 0.4 * i / 7.0;
    for (int k = 0; k < 5; ++k) {
      const double wz = 0.01 + 0.09 * k / 4.0;
      const ChiResult r = chi_susceptibility(SpectralDensity::ohmic(alpha, 1.0), kInf, wz);
      const double exact = chi_ohmic_closed_form(alpha, 1.0, wz);
      worst = std::max(worst, std::abs(r.chi / exact - 1.0));
      CHECK(r.chi < 0.0);
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("low temperature susceptibility approaches zero temperature") {
  const SpectralDensity j = SpectralDensity::ohmic(0.3, 1.0);
  const double cold = chi_susceptibility(j, kInf, 0.025).chi;
  const double warm = chi_susceptibility(j, 1e4, 0.025).chi;
  CHECK(std::abs(warm / cold - 1.0) < 1e-3);
}

TEST_CASE("critical coupling rises with dephasing strength") {
  double last = 0.0;
  for (double alpha : {0.0, 0.1, 0.2, 0.3, 0.4}) {
    const double gc = critical_coupling(chi_susceptibility(SpectralDensity::ohmic(alpha, 1.0), kInf, 0.025).chi, 1, 1);
    CHECK(gc > last);
    last = gc;
  }
  CHECK_THROWS_AS(critical_coupling(0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(critical_coupling(0.5, 1.0, 1.0), Error);
}

TEST_CASE("static susceptibility per backend") {
  DickeParams p;
  CHECK(static_susceptibility(p) == doctest::Approx(-1.0 / p.omega_z));
  p.bath.backend = BathBackend::markovian;
  p.bath.gamma_phi = 0.2;
  CHECK(static_susceptibility(p) == doctest::Approx(-0.025 / (0.025 * 0.025 + 0.04)));
}

TEST_CASE("linear and power-law fits recover exact data") {
  const std::vector<double> x = {1, 2, 4, 8};
  std::vector<double> lin, pw;
  for (double v : x) {
    lin.push_back(3.0 * v - 2.0);
    pw.push_back(-5.0 * std::pow(v, -1.5));
  }
  const FitReport a = linear_fit(x, lin);
  CHECK(a.value("slope") == doctest::Approx(3.0));
  CHECK(a.value("intercept") == doctest::Approx(-2.0));
  const FitReport b = power_law_fit(x, pw);
  CHECK(b.value("exponent") == doctest::Approx(-1.5));
  CHECK(std::exp(b.value("log_amplitude")) == doctest::Approx(5.0));
}

TEST_CASE("critical exponent of a manufactured square root") {
  std::vector<SweepPoint> sweep;
  for (double g = 0.15; g <= 0.26; g += 0.0025) {
    SweepPoint s;
    s.g = g;
    s.re_a = g > 0.2 ? 0.7 * std::sqrt(g - 0.2) : 0.0;
    s.abs_a = std::abs(s.re_a);
    sweep.push_back(s);
  }
  const FitReport r = critical_exponent_fit(sweep, 0.2);
  CHECK(r.value("beta") == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(r.value("g_c") == doctest::Approx(0.2).epsilon(1e-3));
  for (auto& s : sweep) s.re_a = s.abs_a = 0.0;
  CHECK_THROWS_AS(critical_exponent_fit(sweep, 0.2), Error);
}

TEST_CASE("first crossing interpolates linearly") {
  CHECK(first_crossing({0, 1, 2, 3}, {0, 0.2, 0.6, 1.0}, 0.5) == doctest::Approx(1.75));
  CHECK(std::isnan(first_crossing({0, 1}, {0, 0.2}, 0.5)));
}

TEST_CASE("rise time grows as the logarithm of N") {
  const double gamma = 0.1, c = 10.0;
  std::vector<std::pair<double, TimeSeries>> runs;
  for (double n : {1e3, 1e4, 1e5, 1e6})
    runs.emplace_back(n, series({"t", "n_total"}, grid(200.0, 0.05), [&](double t) {
                        return std::vector<double>{std::min(1.0, std::exp(gamma * (t - c * std::log(n))))};
                      }));
  RiseOptions opt;
  opt.window = GrowthWindow::level;
  opt.gamma_lo = 0.01;
  opt.gamma_hi = 0.5;
  const FitReport r = rise_time_fit(runs, opt);
  CHECK(r.value("A") == doctest::Approx(c).epsilon(0.01));
  CHECK(r.value("B") == doctest::Approx(std::log(0.5) / gamma).epsilon(0.01));
  for (double g : r.data.at("gamma")) CHECK(g == doctest::Approx(gamma).epsilon(0.01));
}

TEST_CASE("relaxation time of a manufactured exponential") {
  const TimeSeries s = series({"t", "q", "p", "sz"}, grid(400.0, 0.5), [](double t) {
    return std::vector<double>{0.0, 0.0, -0.2 - 0.7 * std::exp(-t / 80.0)};
  });
  const FitReport r = relaxation_time_fit(s);
  CHECK(r.value("tau") == doctest::Approx(80.0).epsilon(1e-6));
  CHECK(r.value("c") == doctest::Approx(-0.2).epsilon(1e-6));
  CHECK(r.value("A") == doctest::Approx(-0.7).epsilon(1e-6));
  CHECK(r.r_squared > 1.0 - 1e-12);
}

TEST_CASE("connected correlators of product states are excluded") {
  const std::vector<std::string> cols = {"t", "c_xx", "c_yy", "c_zz", "c_xy", "c_xz", "c_yz"};
  std::vector<std::pair<double, TimeSeries>> runs;
  for (double n : {20.0, 40.0, 80.0})
    runs.emplace_back(n, series(cols, grid(5.0, 1.0), [](double) { return std::vector<double>(6, 0.0); }));
  for (const FitReport& r : connected_scaling_fit(runs, 3.0)) CHECK_FALSE(r.ok);
}

TEST_CASE("connected scaling slopes of manufactured data") {
  const std::vector<std::string> cols = {"t", "c_xx", "c_yy", "c_zz", "c_xy", "c_xz", "c_yz"};
  std::vector<std::pair<double, TimeSeries>> runs;
  for (double n : {20.0, 40.0, 80.0, 160.0})
    runs.emplace_back(n, series(cols, grid(5.0, 1.0), [n](double) {
                        return std::vector<double>{0.3 / n, -0.2 / n, 0.5 / (n * n), 0.1 / n, 0.0, 0.0};
                      }));
  const auto fits = connected_scaling_fit(runs, 3.0);
  REQUIRE(fits.size() == 6);
  CHECK(fits[0].notes[0] == "c_xx");
  CHECK(fits[0].value("exponent") == doctest::Approx(-1.0));
  CHECK(fits[2].value("exponent") == doctest::Approx(-2.0));
  CHECK_FALSE(fits[4].ok);
  CHECK_FALSE(fits[5].ok);
}

TEST_CASE("cavity and spin fields share the critical exponent near threshold") {
  DickeParams p;
  p.n_sites = kInf;
  std::vector<double> grid;
  for (int k = 0; k <= 26; ++k) grid.push_back(0.15 + 0.0005 * k);
  const auto sweep = mf_steady_sweep(p, grid, {M_PI, cplx(1e-3, 1e-3)}, 3000.0, 0.05);
  std::map<std::string, FitReport> fits;
  for (const char* field : {"re_a", "im_a", "sx"}) {
    CriticalFitOptions opt;
    opt.field = field;
    opt.window_factor = 1.03;
    fits[field] = critical_exponent_fit(sweep, std::sqrt(0.025), opt);
  }
  auto agree = [&](const char* a, const char* b) {
    const double d = std::abs(fits[a].value("beta") - fits[b].value("beta"));
    return d <= 2.0 * std::hypot(fits[a].error("beta"), fits[b].error("beta"));
  };
  CHECK(fits["re_a"].value("beta") == doctest::Approx(0.5).epsilon(0.1));
  CHECK(agree("re_a", "im_a"));
  CHECK(agree("im_a", "sx"));
}
