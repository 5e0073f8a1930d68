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


// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dicke/analysis.hpp"
#include "dicke/bmf.hpp"
#include "dicke/meanfield.hpp"
#include "dicke/naive.hpp"

using namespace dicke;

namespace {

constexpr double kChiTol = 1e-6;
constexpr double kCouplingTol = 1e-12;
constexpr double kOnsetGrid = 0.005;
constexpr double kBeta = 0.5, kBetaTol = 0.05;
constexpr double kOracleTol = 1e-2;
constexpr double kMfSpreadMin = 0.1;
constexpr double kBmfSpreadMax = 0.05;
constexpr double kVacuumTol = 1e-6, kMfMatchTol = 1e-10;
constexpr double kRiseR2 = 0.99, kGammaTol = 0.1;
constexpr double kSlopeN = 1.0, kSlopeG = -2.0, kSlopeNTol = 0.15, kSlopeGTol = 0.2;
constexpr double kConnectedSlopeMax = -1.0 + 0.15, kConnectedFloor = 1e-12;
constexpr double kNaiveRelTol = 1e-8, kNaiveSlope = -1.0, kNaiveSlopeTol = 0.01;
constexpr double kEtaRatio = 1e-3, kEtaRel = 1e-2;
constexpr double kSymmetryTol = 1e-10, kDualityTol = 1e-10, kWindowTol = 1e-6;
constexpr double kOrderLo = 8.0, kOrderHi = 32.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

DickeParams markov(double gamma, double g, double n) {
  DickeParams p;
  p.g = g;
  p.n_sites = n;
  p.bath.backend = BathBackend::markovian;
  p.bath.gamma_phi = gamma;
  return p;
}

// Single-pseudomode embedding of the zero-temperature ohmic bath.
DickeParams ohmic_one_mode(double g, double n) {
  DickeParams p;
  p.g = g;
  p.n_sites = n;
  p.bath.backend = BathBackend::pseudomode;
  p.bath.spectral = SpectralDensity::ohmic(0.3, 1.0);
  p.bath.fit.n_terms = p.bath.fit.max_terms = 1;
  p.bath.fit.fock_cutoff = 3;
  p.bath.fit.residual_threshold = 1.0;
  resolve_bath(p);
  return p;
}

const std::vector<double> kThetas = {0.2 * M_PI, 0.4 * M_PI, 0.6 * M_PI, 0.8 * M_PI};

double max_abs_diff(const TimeSeries& a, const TimeSeries& b, const std::string& col) {
  double worst = 0.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
    worst = std::max(worst, std::abs(a.at(k, col) - b.at(k, col)));
  return worst;
}

double spread(const std::vector<double>& v) {
  return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
}

std::vector<SweepPoint> bath_free_sweep() {
  static const std::vector<SweepPoint> sweep = [] {
    DickeParams p;
    p.n_sites = kInf;
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(0.1 + kOnsetGrid * k);
    return mf_steady_sweep(p, grid, {M_PI, cplx(1e-3, 1e-3)}, 3000.0, 0.05);
  }();
  return sweep;
}

Outcome chi_identity() {
  double worst = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 5; ++k) {
      const double alpha = 0.05 + 0.4 * i / 7.0, wz = 0.01 + 0.09 * k / 4.0;
      const ChiResult r = chi_susceptibility(SpectralDensity::ohmic(alpha, 1.0), kInf, wz);
      worst = std::max(worst, std::abs(r.chi / chi_ohmic_closed_form(alpha, 1.0, wz) - 1.0));
    }
  return {worst < kChiTol, "max relative deviation " + fmt("%.2e", worst) + " on 40 points"};
}

Outcome bath_free_coupling() {
  const double chi = chi_susceptibility(SpectralDensity::ohmic(0.0, 1.0), kInf, 0.025).chi;
  const double gc = critical_coupling(chi, 1.0, 1.0), exact = std::sqrt(0.025 * 2.0 / 2.0);
  const auto [lo, hi] = sweep_onset(bath_free_sweep());
  const bool bracket = lo <= exact && exact <= hi && hi - lo <= kOnsetGrid + 1e-12;
  return {std::abs(gc - exact) < kCouplingTol && bracket,
          "g_c " + fmt("%.12f", gc) + ", onset in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]"};
}

Outcome critical_exponent() {
  const auto sweep = bath_free_sweep();
  std::string detail;
  bool pass = false;
  for (const char* field : {"re_a", "im_a", "sx"}) {
    CriticalFitOptions opt;
    opt.field = field;
    const FitReport r = critical_exponent_fit(sweep, std::sqrt(0.025), opt);
    if (std::string(field) == "re_a") pass = std::abs(r.value("beta") - kBeta) <= kBetaTol;
    detail += std::string(detail.empty() ? "" : ", ") + field + " beta " + fmt("%.3f", r.value("beta")) + " +- " +
              fmt("%.3f", r.error("beta"));
  }
  return {pass, detail};
}

Outcome dephasing_oracle() {
  DickeParams p;
  p.n_sites = kInf;
  p.bath.backend = BathBackend::pseudomode;
  p.bath.spectral = SpectralDensity::ohmic(0.3, 1.0);
  p.bath.fit.n_terms = p.bath.fit.max_terms = 3;
  p.bath.fit.fock_cutoff = 5;
  p.bath.fit.residual_threshold = 1.0;
  resolve_bath(p);
  RunOptions ro;
  ro.track_min_eigenvalue = false;
  const TimeSeries s = mf_run(p, {M_PI / 2, 0.0}, 20.0, 0.05, ro);
  double worst = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double t = s.at(k, "t");
    const double exact = std::pow(1.0 + t * t, -0.3);
    worst = std::max(worst, std::abs(std::hypot(s.at(k, "sx"), s.at(k, "sy")) - exact) / exact);
  }
  return {worst < kOracleTol, fmt("max relative error %.2e", worst) + " with " +
                                  std::to_string(p.bath.embedding.size()) + " modes"};
}

Outcome mf_pathology() {
  const DickeParams p = ohmic_one_mode(0.16, kInf);
  RunOptions ro;
  ro.track_min_eigenvalue = false;
  std::vector<double> late;
  for (double th : kThetas) late.push_back(mf_run(p, {th, cplx(1e-3, 1e-3)}, 2000.0, 0.05, ro).back("sz"));
  const double s = spread(late);
  return {s > kMfSpreadMin, fmt("late sz spread %.3f", s)};
}

Outcome bmf_thermalization() {
  const DickeParams p = ohmic_one_mode(0.16, 10);
  BmfOptions o;
  o.track_min_eigenvalue = false;
  o.record_every = 100;
  std::vector<double> late;
  for (double th : kThetas) late.push_back(bmf_run(p, {th, 0.0}, 2000.0, 0.05, o).back("sz"));
  const double s = spread(late);
  return {s < kBmfSpreadMax, fmt("late sz spread %.2e", s) + fmt(", mean %.4f", (late[0] + late[3]) / 2)};
}

Outcome vacuum_fixed_point() {
  DickeParams p = markov(0.1, 0.0, 20);
  const InitialState init{0.825 * M_PI, cplx(0.2, -0.1)};
  BmfOptions o;
  o.track_min_eigenvalue = false;
  const TimeSeries b = bmf_run(p, init, 50.0, 0.02, o);
  p.n_sites = kInf;
  const TimeSeries m = mf_run(p, init, 50.0, 0.02, o);
  const double vac = std::max({std::abs(b.back("dn")), std::abs(b.back("dx2") - 1.0 / 20), std::abs(b.back("dxp"))});
  double mf = 0.0;
  for (const char* c : {"re_a", "im_a", "sx", "sy", "sz"}) mf = std::max(mf, max_abs_diff(b, m, c));
  return {vac < kVacuumTol && mf < kMfMatchTol, fmt("vacuum deviation %.1e", vac) + fmt(", MF deviation %.1e", mf)};
}

Outcome rise_time() {
  DickeParams p = markov(0.01, 0.26, 160);
  BmfOptions o;
  o.track_min_eigenvalue = false;
  std::vector<std::pair<double, TimeSeries>> runs;
  for (double n : {160.0, 640.0, 2560.0, 10240.0}) {
    p.n_sites = n;
    runs.emplace_back(n, bmf_run(p, {M_PI, 0.0}, 250.0, 0.05, o));
  }
  RiseOptions opt;
  opt.window = GrowthWindow::level;
  opt.gamma_lo = 0.02;
  opt.gamma_hi = 0.2;
  const FitReport r = rise_time_fit(runs, opt);

  p.n_sites = kInf;
  RunOptions ro;
  ro.track_min_eigenvalue = false;
  const TimeSeries mf = mf_run(p, {M_PI, cplx(1e-3, 1e-3)}, 100.0, 0.05, ro);
  RiseOptions mopt;
  mopt.column = "n";
  mopt.gamma_lo = 40.0;
  mopt.gamma_hi = 100.0;
  const double gamma_mf = growth_rate_fit(mf, mopt).value("gamma");

  const double gm = r.value("gamma_mean"), rel = r.value("gamma_spread") / gm;
  const double mf_rel = std::abs(gm - gamma_mf) / gamma_mf;
  const bool pass = r.data.at("N").size() == 4 && r.r_squared > kRiseR2 && rel <= kGammaTol && mf_rel <= kGammaTol;
  return {pass, fmt("R2 %.5f", r.r_squared) + fmt(", slope %.2f", r.value("A")) + fmt(", gamma %.4f", gm) +
                    fmt(" (spread %.1f%%)", 100 * rel) + fmt(", MF gamma %.4f", gamma_mf) +
                    fmt(" (diff %.1f%%); reference 0.045", 100 * mf_rel)};
}

double relaxation_time(double g, double n) {
  const double est = 9.5 * n * (0.2 / g) * (0.2 / g);
  BmfOptions o;
  o.track_min_eigenvalue = false;
  o.record_every = 10;
  const TimeSeries s = bmf_run(markov(0.2, g, n), {M_PI, 0.0}, 12.0 * est, 0.05, o);
  RelaxOptions r;
  r.t_lo = 3.0 * est;
  r.t_hi = 12.0 * est;
  return relaxation_time_fit(s, r).value("tau");
}

Outcome relaxation_scaling() {
  std::vector<double> ns = {10, 20, 40, 80}, gs = {0.1, 0.14, 0.2}, tn, tg;
  for (double n : ns) tn.push_back(relaxation_time(0.2, n));
  for (double g : gs) tg.push_back(relaxation_time(g, 10));
  const double sn = power_law_fit(ns, tn).value("exponent"), sg = power_law_fit(gs, tg).value("exponent");
  return {std::abs(sn - kSlopeN) <= kSlopeNTol && std::abs(sg - kSlopeG) <= kSlopeGTol,
          fmt("tau vs N slope %.3f", sn) + fmt(", tau vs g slope %.3f", sg)};
}

Outcome connected_decay() {
  BmfOptions o;
  o.track_min_eigenvalue = false;
  std::vector<std::pair<double, TimeSeries>> runs;
  for (double n : {20.0, 40.0, 80.0, 160.0}) runs.emplace_back(n, bmf_run(markov(0.2, 0.2, n), {M_PI, 0.0}, 20.0, 0.05, o));
  bool pass = true;
  int nonzero = 0;
  std::string detail;
  for (const FitReport& r : connected_scaling_fit(runs, 20.0, kConnectedFloor)) {
    if (!r.ok) continue;
    ++nonzero;
    const double s = r.value("exponent");
    pass = pass && s <= kConnectedSlopeMax;
    detail += r.notes[0].substr(2) + " " + fmt("%.3f", s) + ", ";
  }
  return {pass && nonzero == 4, detail + std::to_string(nonzero) + " nonzero"};
}

Outcome naive_control() {
  std::vector<double> ns = {10, 100, 1000}, scaled, unscaled;
  DickeParams p;
  p.g = 0.3;
  for (double n : ns) {
    p.n_sites = n;
    const NaiveSteadyState s = naive_steady_state(p);
    scaled.push_back(s.dn);
    unscaled.push_back(s.unscaled_photons(n));
  }
  double rel = 0.0;
  for (double u : unscaled) rel = std::max(rel, std::abs(u / unscaled[0] - 1.0));
  const double slope = power_law_fit(ns, scaled).value("exponent");
  return {rel < kNaiveRelTol && std::abs(slope - kNaiveSlope) <= kNaiveSlopeTol,
          fmt("unscaled photons %.6f", unscaled[0]) + fmt(", relative spread %.1e", rel) + fmt(", slope %.5f", slope)};
}

Outcome markov_limit() {
  const double gamma = 0.05, dt = 0.1, wc = 1e5, beta = 1e-3 / wc;
  const SpectralDensity j = SpectralDensity::tanh_lindblad(gamma, beta, wc);
  const EtaCoefficients eta = eta_coefficients(j, beta, dt, 2);
  const double ratio = std::abs(eta.eta[1].real() / eta.eta[0].real());
  const double rel = std::abs(eta.eta[0].real() / (gamma * dt / 2.0) - 1.0);
  const bool divergent = reorganization_energy(SpectralDensity::tanh_lindblad(gamma, 1.0), 1e3).divergent;
  return {ratio < kEtaRatio && rel < kEtaRel && divergent,
          fmt("|Re eta_1 / Re eta_0| %.1e", ratio) + fmt(", Re eta_0 deviation %.1e", rel) +
              (divergent ? ", divergence flagged" : ", divergence not flagged")};
}

Outcome structural_suite() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };
  BmfOptions o;
  o.track_min_eigenvalue = false;
  const TimeSeries s = bmf_run(markov(0.1, 0.3, 20), {0.825 * M_PI, cplx(1e-3, 1e-3)}, 30.0, 0.05, o);
  double swap = 0.0, herm = 0.0, tr = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    swap = std::max(swap, s.at(k, "swap_defect"));
    herm = std::max(herm, s.at(k, "herm_defect"));
    tr = std::max(tr, s.at(k, "trace_defect"));
  }
  expect(swap < kSymmetryTol, "swap");
  expect(herm < kSymmetryTol, "hermiticity");
  expect(tr < kSymmetryTol, "trace");

  const TimeSeries parity = bmf_run(markov(0.1, 0.3, 20), {M_PI, 0.0}, 30.0, 0.05, o);
  double odd = 0.0;
  for (std::size_t k = 0; k < parity.size(); ++k)
    for (const char* c : {"q", "p", "sx", "sy"}) odd = std::max(odd, std::abs(parity.at(k, c)));
  expect(odd < kSymmetryTol, "parity sector");

  const LiouvillianSpec l = site_liouvillian(ohmic_one_mode(0.0, kInf), 0.3);
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  CMatrix a(6, 6), x(6, 6);
  for (Index i = 0; i < 6; ++i)
    for (Index k = 0; k < 6; ++k) {
      a(i, k) = cplx(nd(rng), nd(rng));
      x(i, k) = cplx(nd(rng), nd(rng));
    }
  const cplx lhs = (a * propagate(l, x, 0.05, 40)).trace(), rhs = (propagate_adjoint(l, a, 0.05, 40) * x).trace();
  expect(std::abs(lhs - rhs) < kDualityTol, "duality");

  const DickeParams mp = markov(0.05, 0.5, kInf);
  RunOptions ro;
  ro.track_min_eigenvalue = false;
  auto final_a = [&](double dt) {
    const TimeSeries r = mf_run(mp, {0.825 * M_PI, cplx(0.1, 0.0)}, 5.0, dt, ro);
    return cplx(r.back("re_a"), r.back("im_a"));
  };
  const cplx ref = final_a(0.0025);
  const double order = std::abs(final_a(0.1) - ref) / std::abs(final_a(0.05) - ref);
  expect(order > kOrderLo && order < kOrderHi, "rk4 order");

  const DickeParams wp = markov(0.1, 0.3, 20);
  BmfOptions w1 = o;
  w1.scheme = MemoryScheme::window;
  BmfOptions w2 = w1;
  w2.t_mem = -2.0 * std::log(w1.eps_mem) / wp.kappa;
  const InitialState init{0.825 * M_PI, cplx(1e-3, 1e-3)};
  const TimeSeries x1 = bmf_run(wp, init, 45.0, 0.05, w1), x2 = bmf_run(wp, init, 45.0, 0.05, w2);
  double window = 0.0;
  for (const char* c : {"q", "p", "sz", "dn", "dx2", "dxp", "c_xx", "c_zz"})
    window = std::max(window, max_abs_diff(x1, x2, c));
  expect(window < kWindowTol, "memory window");

  std::string detail = fmt("swap %.1e", swap) + fmt(", herm %.1e", herm) + fmt(", trace %.1e", tr) +
                       fmt(", parity %.1e", odd) + fmt(", duality %.1e", std::abs(lhs - rhs)) +
                       fmt(", order ratio %.1f", order) + fmt(", window %.1e", window);
  for (const auto& f : failed) detail += "; failed " + f;
  return {failed.empty(), detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "chi closed-form identity", chi_identity},
      {2, "bath-free critical coupling", bath_free_coupling},
      {3, "critical exponent", critical_exponent},
      {4, "pure-dephasing oracle", dephasing_oracle},
      {5, "mean-field pathology witness", mf_pathology},
      {6, "beyond-mean-field thermalization", bmf_thermalization},
      {7, "vacuum fixed point", vacuum_fixed_point},
      {8, "rise-time scaling", rise_time},
      {9, "relaxation scaling", relaxation_scaling},
      {10, "connected-correlation decay", connected_decay},
      {11, "naive-projector control", naive_control},
      {12, "Markov limit of the tanh bath", markov_limit},
      {13, "structural invariant suite", structural_suite},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::printf("%s %2d %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
