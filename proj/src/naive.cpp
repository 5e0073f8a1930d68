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

#include "dicke/naive.hpp"

#include <Eigen/LU>
#include <cmath>

namespace dicke {

namespace {

const std::vector<std::string> kNaiveColumns = {"t",   "q",       "p",          "re_a", "im_a",
                                                "n",   "dn",      "dx2",        "dxp",  "n_total",
                                                "n_unscaled", "sx", "sy",       "sz"};

struct State {
  double t = 0.0;
  PhotonMoments m;
  CMatrix rho, w;
  std::array<CMatrix, 4> y;
};

State axpy(const State& s, double h, const State& k) {
  State out;
  out.t = s.t;
  out.m = {s.m.q + h * k.m.q, s.m.p + h * k.m.p, s.m.dn + h * k.m.dn, s.m.dx2 + h * k.m.dx2,
           s.m.dxp + h * k.m.dxp};
  out.rho = s.rho + h * k.rho;
  out.w = s.w + h * k.w;
  for (int i = 0; i < 4; ++i) out.y[i] = s.y[i] + h * k.y[i];
  return out;
}

class NaiveSystem {
 public:
  explicit NaiveSystem(const DickeParams& p) : p_(p), site_(build_site_model(p)) {
    require(p.bath.backend == BathBackend::none, ErrorKind::validation, "the naive projector is bath-free");
    require(std::isfinite(p.n_sites), ErrorKind::validation, "the naive projector needs a finite N");
  }

  const SiteModel& site() const { return site_; }

  CMatrix gen(const CMatrix& x, double q) const {
    CMatrix out = site_.base.apply(x);
    const double drive = p_.g * q;
    if (drive != 0.0) out.noalias() += cplx(0.0, -drive) * commutator(site_.sx, x);
    return out;
  }

  State rhs(const State& s) const {
    const double n = p_.n_sites, q = s.m.q, g2 = p_.g * p_.g;
    const auto& sx = site_.sx;
    const double mx = trace_product(sx, s.rho).real();
    const cplx lp(p_.kappa, p_.omega), lm(p_.kappa, -p_.omega);
    const cplx h = n * cplx(s.m.dx2, -s.m.dxp), m1(s.m.dxp, s.m.dx2);
    const CMatrix comm = commutator(sx, s.rho);
    const CMatrix anti = anticommutator(sx, s.rho) - 2.0 * mx * s.rho;
    const CMatrix same = sx * s.rho - mx * s.rho;

    State d;
    const CMatrix wa = s.w - s.w.adjoint();
    d.rho = gen(s.rho, q) - (0.5 * g2 / n) * commutator(sx, wa);
    d.w = h * comm + anti + gen(s.w, q) - lp * s.w;
    d.y[0] = same / n + gen(s.y[0], q) - lp * s.y[0];
    d.y[1] = same / n + gen(s.y[1], q) - lm * s.y[1];
    d.y[2] = m1 * same + gen(s.y[2], q) - lp * s.y[2];
    d.y[3] = std::conj(m1) * same + gen(s.y[3], q) - lm * s.y[3];

    std::array<cplx, 4> y;
    for (int i = 0; i < 4; ++i) y[i] = trace_product(sx, s.y[i]);
    PhotonMemory mem;
    mem.rc = 0.5 * (y[0] + y[1]).real();
    mem.rs = 0.5 * (y[1] - y[0]).imag();
    mem.i1 = 0.5 * (y[2] + y[3]).imag();
    mem.i2 = 0.5 * (y[2] - y[3]).real();
    const auto [dq, dp] = photon_first_moment_rhs(s.m, mx, p_);
    const auto second = photon_second_moment_rhs(s.m, mem, p_);
    d.m = {dq, dp, second[0], second[1], second[2]};
    return d;
  }

  std::vector<double> observe(const State& s) const {
    const double n_coh = 0.25 * (s.m.q * s.m.q + s.m.p * s.m.p);
    const double total = n_coh + s.m.dn;
    return {s.t,
            s.m.q,
            s.m.p,
            0.5 * s.m.q,
            0.5 * s.m.p,
            n_coh,
            s.m.dn,
            s.m.dx2,
            s.m.dxp,
            total,
            p_.n_sites * total,
            trace_product(site_.sx, s.rho).real(),
            trace_product(site_.sy, s.rho).real(),
            trace_product(site_.sz, s.rho).real()};
  }

 private:
  const DickeParams& p_;
  SiteModel site_;
};

bool finite(const State& s) {
  return std::isfinite(s.m.q) && std::isfinite(s.m.p) && std::isfinite(s.m.dn) && std::isfinite(s.m.dx2) &&
         std::isfinite(s.m.dxp) && s.rho.allFinite();
}

}  // namespace

const std::vector<std::string>& naive_columns() { return kNaiveColumns; }

TimeSeries naive_run(const DickeParams& params, const InitialState& init, double t_max, double dt,
                     const RunOptions& opt) {
  require(dt > 0.0 && t_max >= 0.0, ErrorKind::validation, "naive run needs dt > 0 and t_max >= 0");
  const NaiveSystem sys(params);
  const InitialBundle b = build_initial_state(params, init);
  State s;
  s.m = b.moments;
  s.rho = b.site;
  s.w = CMatrix::Zero(2, 2);
  for (auto& y : s.y) y = CMatrix::Zero(2, 2);
  TimeSeries series(kNaiveColumns);
  series.append(sys.observe(s));
  const long steps = std::lround(t_max / dt);
  for (long k = 1; k <= steps; ++k) {
    const State k1 = sys.rhs(s);
    const State k2 = sys.rhs(axpy(s, 0.5 * dt, k1));
    const State k3 = sys.rhs(axpy(s, 0.5 * dt, k2));
    const State k4 = sys.rhs(axpy(s, dt, k3));
    State next = axpy(axpy(axpy(axpy(s, dt / 6.0, k1), dt / 3.0, k2), dt / 3.0, k3), dt / 6.0, k4);
    next.t = k * dt;
    if (!finite(next)) {
      series.diverged = true;
      if (opt.throw_on_divergence)
        fail(ErrorKind::divergence, "non-finite naive state after t = " + std::to_string(s.t));
      return series;
    }
    s = std::move(next);
    if (k % opt.record_every == 0 || k == steps) series.append(sys.observe(s));
  }
  return series;
}

std::array<double, 4> exp_trig_integrals(double kappa, double omega, double a) {
  auto ic = [kappa](double b) { return kappa / (kappa * kappa + b * b); };
  auto is = [kappa](double b) { return b / (kappa * kappa + b * b); };
  const double m = omega - a, p = omega + a;
  return {0.5 * (ic(m) + ic(p)), 0.5 * (ic(m) - ic(p)), 0.5 * (is(p) + is(m)), 0.5 * (is(p) - is(m))};
}

NaiveSteadyState naive_steady_state(const DickeParams& params, const NaiveSteadyOptions& opt) {
  params.validate();
  require(params.bath.backend == BathBackend::none, ErrorKind::validation, "the naive projector is bath-free");
  require(params.kappa > 0.0, ErrorKind::validation, "naive steady state needs kappa > 0");
  require(std::isfinite(params.n_sites), ErrorKind::validation, "the naive projector needs a finite N");
  const double k = params.kappa, w = params.omega, g2 = params.g * params.g, n = params.n_sites;
  const auto [pcc, pss, psc, pcs] = exp_trig_integrals(k, w, 2.0 * params.omega_z);

  // Unscaled photon variables (n~, X~, Y~) at fixed sz.
  auto photons = [&](double z) {
    Eigen::Matrix3d m;
    Eigen::Vector3d r;
    m << -2.0 * k, 2.0 * g2 * z * pss, 2.0 * g2 * z * pcs,
         0.0, -2.0 * k, -2.0 * w,
         -4.0 * w, 2.0 * w + 4.0 * g2 * z * pcs, -2.0 * k - 4.0 * g2 * z * pss;
    r << -2.0 * g2 * pcc, -2.0 * k, 2.0 * w + 4.0 * g2 * psc;
    return Eigen::Vector3d(m.partialPivLu().solve(r));
  };

  NaiveSteadyState out;
  double z = opt.sz_start;
  Eigen::Vector3d v = photons(z);
  if (params.g == 0.0) {
    out.converged = true;
  } else {
    for (int it = 1; it <= opt.max_iterations; ++it) {
      const double denom = v(1) * pcc - v(2) * psc;
      require(denom != 0.0, ErrorKind::domain, "degenerate naive spin balance");
      const double target = std::clamp(-pss / denom, -1.0, 1.0);
      const double next = (1.0 - opt.damping) * z + opt.damping * target;
      out.residual = std::abs(next - z);
      z = next;
      v = photons(z);
      out.iterations = it;
      if (out.residual < opt.tolerance) {
        out.converged = true;
        break;
      }
    }
  }
  out.dn = v(0) / n;
  out.dx2 = v(1) / n;
  out.dxp = v(2) / n;
  out.sz = z;
  return out;
}

}  // namespace dicke
