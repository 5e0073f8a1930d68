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

#include "dicke/meanfield.hpp"

#include <cmath>
#include <limits>

#include "dicke/parallel.hpp"

namespace dicke {

namespace {

struct Deriv {
  cplx a;
  CMatrix rho;
};

class MfSystem {
 public:
  explicit MfSystem(const DickeParams& p) : p_(p), site_(build_site_model(p)) {}

  const SiteModel& site() const { return site_; }

  Deriv rhs(cplx a, const CMatrix& rho) const {
    const double sx = trace_product(site_.sx, rho).real();
    Deriv d;
    d.a = cplx(-p_.kappa, -p_.omega) * a - cplx(0, 1) * p_.g * sx;
    d.rho = site_.base.apply(rho);
    const double drive = 2.0 * p_.g * a.real();
    if (drive != 0.0) d.rho.noalias() += cplx(0, -drive) * commutator(site_.sx, rho);
    return d;
  }

 private:
  const DickeParams& p_;
  SiteModel site_;
};

std::vector<double> observe(const SiteModel& site, const MfState& s, bool min_eig) {
  const double sx = trace_product(site.sx, s.rho).real();
  const double sy = trace_product(site.sy, s.rho).real();
  const double sz = trace_product(site.sz, s.rho).real();
  const double defect = std::abs(s.rho.trace() - 1.0);
  const double me = min_eig ? min_eigenvalue(s.rho) : std::numeric_limits<double>::quiet_NaN();
  return {s.t, s.a.real(), s.a.imag(), std::norm(s.a), sx, sy, sz, defect, me};
}

const std::vector<std::string> kMfColumns = {"t", "re_a", "im_a", "n", "sx", "sy", "sz", "trace_defect",
                                             "min_eig"};

}  // namespace

MfState mf_evolve(const DickeParams& params, MfState s, double t_max, double dt, TimeSeries* series,
                  const RunOptions& opt) {
  require(dt > 0.0 && t_max >= s.t, ErrorKind::validation, "mf run needs dt > 0 and t_max >= t0");
  MfSystem sys(params);
  const auto& site = sys.site();
  require(s.rho.rows() == site.dim, ErrorKind::structural, "initial site state has the wrong dimension");
  const long steps = std::lround((t_max - s.t) / dt);
  const double t0 = s.t;
  if (series && series->columns().empty()) *series = TimeSeries(kMfColumns);
  if (series) series->append(observe(site, s, opt.track_min_eigenvalue));
  for (long k = 1; k <= steps; ++k) {
    const Deriv k1 = sys.rhs(s.a, s.rho);
    const Deriv k2 = sys.rhs(s.a + 0.5 * dt * k1.a, s.rho + 0.5 * dt * k1.rho);
    const Deriv k3 = sys.rhs(s.a + 0.5 * dt * k2.a, s.rho + 0.5 * dt * k2.rho);
    const Deriv k4 = sys.rhs(s.a + dt * k3.a, s.rho + dt * k3.rho);
    MfState next;
    next.a = s.a + dt / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
    next.rho = s.rho + dt / 6.0 * (k1.rho + 2.0 * k2.rho + 2.0 * k3.rho + k4.rho);
    next.t = t0 + k * dt;
    if (!std::isfinite(std::abs(next.a)) || !next.rho.allFinite()) {
      if (series) series->diverged = true;
      if (opt.throw_on_divergence)
        fail(ErrorKind::divergence, "non-finite mean-field state after t = " + std::to_string(s.t));
      return s;
    }
    s = std::move(next);
    if (series && (k % opt.record_every == 0 || k == steps))
      series->append(observe(site, s, opt.track_min_eigenvalue));
  }
  return s;
}

TimeSeries mf_run(const DickeParams& params, const InitialState& init, double t_max, double dt,
                  const RunOptions& opt) {
  const InitialBundle b = build_initial_state(params, init);
  MfState s;
  s.a = init.a0;
  s.rho = b.site;
  TimeSeries series(kMfColumns);
  mf_evolve(params, std::move(s), t_max, dt, &series, opt);
  return series;
}

std::vector<SweepPoint> mf_steady_sweep(const DickeParams& params, const std::vector<double>& g_grid,
                                        const InitialState& init, double t_max, double dt, unsigned workers) {
  std::vector<SweepPoint> out(g_grid.size());
  parallel_for(g_grid.size(), workers, [&](std::size_t k) {
    DickeParams p = params;
    p.g = g_grid[k];
    RunOptions opt;
    opt.track_min_eigenvalue = false;
    const TimeSeries ts = mf_run(p, init, t_max, dt, opt);
    const std::size_t n = ts.size(), start = n - n / 4, mid = n - n / 8;
    auto mean = [&](const std::string& col, std::size_t a, std::size_t b) {
      double acc = 0.0;
      for (std::size_t i = a; i < b; ++i) acc += ts.at(i, col);
      return acc / static_cast<double>(b - a);
    };
    auto abs_a = [&](std::size_t i) { return std::hypot(ts.at(i, "re_a"), ts.at(i, "im_a")); };
    double a1 = 0.0, a2 = 0.0;
    for (std::size_t i = start; i < mid; ++i) a1 += abs_a(i);
    for (std::size_t i = mid; i < n; ++i) a2 += abs_a(i);
    a1 /= static_cast<double>(mid - start);
    a2 /= static_cast<double>(n - mid);
    const double z1 = mean("sz", start, mid), z2 = mean("sz", mid, n);
    SweepPoint pt;
    pt.g = p.g;
    pt.re_a = mean("re_a", start, n);
    pt.im_a = mean("im_a", start, n);
    pt.abs_a = 0.5 * (a1 + a2);
    pt.sx = mean("sx", start, n);
    pt.sz = 0.5 * (z1 + z2);
    pt.ratio = pt.im_a != 0.0 ? pt.re_a / pt.im_a : std::numeric_limits<double>::quiet_NaN();
    const double floor = 1e-8;
    pt.converged = std::abs(a2 - a1) < 1e-4 * std::max(pt.abs_a, floor) + floor &&
                   std::abs(z2 - z1) < 1e-4 * std::max(std::abs(pt.sz), floor) + floor;
    out[k] = pt;
  });
  return out;
}

std::pair<double, double> sweep_onset(const std::vector<SweepPoint>& sweep, double threshold) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < sweep.size(); ++k)
    if (sweep[k].abs_a > threshold) return {k == 0 ? nan : sweep[k - 1].g, sweep[k].g};
  return {nan, nan};
}

}  // namespace dicke
