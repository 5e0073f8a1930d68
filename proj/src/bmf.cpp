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

#include "dicke/bmf.hpp"

#include <cmath>
#include <limits>

namespace dicke {

namespace {

constexpr cplx kI(0.0, 1.0);

}  // namespace

std::pair<double, double> photon_first_moment_rhs(const PhotonMoments& m, double sx, const DickeParams& p) {
  return {p.omega * m.p - p.kappa * m.q, -p.omega * m.q - p.kappa * m.p - 2.0 * p.g * sx};
}

std::array<double, 3> photon_second_moment_rhs(const PhotonMoments& m, const PhotonMemory& mem,
                                               const DickeParams& p) {
  const double g2 = p.g * p.g, n = p.n_sites, k = p.kappa, w = p.omega;
  return {-2.0 * k * m.dn + 2.0 * g2 * (mem.rc + mem.i1),
          -2.0 * w * m.dxp - 2.0 * k * m.dx2 + 2.0 * k / n,
          2.0 * w * m.dx2 - 2.0 * k * m.dxp - 2.0 * w / n - 4.0 * w * m.dn - 4.0 * g2 * (mem.rs + mem.i2)};
}

std::vector<double> trapezoid_weights(std::size_t nodes, double dt, double c) {
  std::vector<double> w(nodes + 1, dt);
  w[nodes] = 0.5 * c * dt;
  if (nodes == 0) return w;
  if (nodes == 1) {
    w[0] = 0.5 * c * dt;
    return w;
  }
  w[0] = 0.5 * dt;
  w[nodes - 1] = 0.5 * dt + 0.5 * c * dt;
  return w;
}

BmfSystem::BmfSystem(const DickeParams& params) : p_(params) {
  require(std::isfinite(p_.n_sites) && p_.n_sites >= 2.0, ErrorKind::validation,
          "beyond-mean-field dynamics needs a finite N >= 2");
  site_ = build_site_model(p_);
  pair_ = build_pair_model(site_, p_.dimension_budget);
}

Seeds BmfSystem::seeds(const CMatrix& rho) const {
  const Index d = site_.dim;
  Seeds s;
  s.rho_i = trace_right(rho, d, d);
  s.rho_j = trace_left(rho, d, d);
  s.sx = trace_product(site_.sx, s.rho_i).real();
  const CMatrix sl = pair_.sx_left * rho, sr = pair_.sx_right * rho;
  const CMatrix x_r = trace_right(sr, d, d) - s.sx * s.rho_i;
  const CMatrix x_l = trace_left(sl, d, d) - s.sx * s.rho_j;
  const CMatrix srho = sl + sr, rhos = times_adjoint(rho, pair_.s_sum);
  s.comm = srho - rhos;
  s.b = srho + rhos - 4.0 * s.sx * rho + 2.0 * (n() - 2.0) * (kron(x_r, s.rho_j) + kron(s.rho_i, x_l));
  s.same = site_.sx * s.rho_i - s.sx * s.rho_i;
  s.cross = x_r;
  return s;
}

CMatrix BmfSystem::pair_generator(const CMatrix& x, double q) const {
  CMatrix out = pair_.base.apply(x);
  const double drive = p_.g * q;
  if (drive != 0.0) out.noalias() += cplx(0.0, -drive) * commutator(pair_.s_sum, x);
  return out;
}

CMatrix BmfSystem::site_generator(const CMatrix& x, double q) const {
  CMatrix out = site_.base.apply(x);
  const double drive = p_.g * q;
  if (drive != 0.0) out.noalias() += cplx(0.0, -drive) * commutator(site_.sx, x);
  return out;
}

CMatrix BmfSystem::pair_local(const CMatrix& rho, double q) const { return pair_generator(rho, q); }

KernelEntry BmfSystem::seed_entry(double t, const PhotonMoments& m, const Seeds& s) const {
  KernelEntry e;
  e.t_seed = t;
  e.dx2 = m.dx2;
  e.dxp = m.dxp;
  e.a = s.comm;
  e.b = s.b;
  e.d_same = s.same;
  e.d_cross = s.cross;
  return e;
}

void BmfSystem::propagate_entry_rhs(const KernelEntry& e, double q, KernelEntry& out) const {
  out.a = pair_generator(e.a, q);
  out.b = pair_generator(e.b, q);
  out.d_same = site_generator(e.d_same, q);
  out.d_cross = site_generator(e.d_cross, q);
}

KernelSequences spin_corr_kernels(const KernelHistory& history, const BmfSystem& sys) {
  KernelSequences k;
  for (const auto& e : history.entries) {
    k.t_seed.push_back(e.t_seed);
    k.same.push_back(sys.kernel_trace(e.d_same));
    k.cross.push_back(sys.kernel_trace(e.d_cross));
  }
  return k;
}

CMatrix pair_rhs(const BmfSystem& sys, const CMatrix& rho, double q, const CMatrix& memory) {
  const auto& s = sys.pair().s_sum;
  const double g = sys.params().g;
  CMatrix out = sys.pair_local(rho, q);
  if (g != 0.0) out.noalias() -= (g * g / sys.n()) * commutator(s, memory);
  return out;
}

namespace {

// Derivative of a BmfState; history entries carry only operator parts.
struct Deriv {
  PhotonMoments m;
  CMatrix rho, w;
  std::array<CMatrix, 4> y;
  std::vector<KernelEntry> hist;
};

PhotonMoments add(const PhotonMoments& a, double h, const PhotonMoments& b) {
  return {a.q + h * b.q, a.p + h * b.p, a.dn + h * b.dn, a.dx2 + h * b.dx2, a.dxp + h * b.dxp};
}

BmfState stage(const BmfState& s, double h, const Deriv& k) {
  BmfState out;
  out.t = s.t;
  out.scheme = s.scheme;
  out.m = add(s.m, h, k.m);
  out.rho = s.rho + h * k.rho;
  if (s.scheme == MemoryScheme::exponential) {
    out.w = s.w + h * k.w;
    for (int i = 0; i < 4; ++i) out.y[i] = s.y[i] + h * k.y[i];
  } else {
    out.history = s.history;
    for (std::size_t i = 0; i < k.hist.size(); ++i) {
      auto& e = out.history.entries[i];
      e.a += h * k.hist[i].a;
      e.b += h * k.hist[i].b;
      e.d_same += h * k.hist[i].d_same;
      e.d_cross += h * k.hist[i].d_cross;
    }
  }
  return out;
}

void set_moments(Deriv& d, const PhotonMoments& m, double sx, const PhotonMemory& mem, const DickeParams& p) {
  const auto [dq, dp] = photon_first_moment_rhs(m, sx, p);
  const auto second = photon_second_moment_rhs(m, mem, p);
  d.m = {dq, dp, second[0], second[1], second[2]};
}

Deriv rhs_exponential(const BmfSystem& sys, const BmfState& s) {
  const auto& p = sys.params();
  const double n = sys.n(), q = s.m.q;
  const Seeds sd = sys.seeds(s.rho);
  const cplx lp(p.kappa, p.omega), lm(p.kappa, -p.omega);
  const cplx h = n * cplx(s.m.dx2, -s.m.dxp);
  const cplx m1(s.m.dxp, s.m.dx2);

  Deriv d;
  const CMatrix wa = s.w - s.w.adjoint();
  d.rho = pair_rhs(sys, s.rho, q, 0.5 * wa);
  d.w = h * sd.comm + sd.b + sys.pair_generator(s.w, q) - lp * s.w;

  const CMatrix seed_r = sd.same / n + (1.0 - 1.0 / n) * sd.cross;
  const CMatrix seed_i = sd.same + (n - 1.0) * sd.cross;
  d.y[0] = seed_r + sys.site_generator(s.y[0], q) - lp * s.y[0];
  d.y[1] = seed_r + sys.site_generator(s.y[1], q) - lm * s.y[1];
  d.y[2] = m1 * seed_i + sys.site_generator(s.y[2], q) - lp * s.y[2];
  d.y[3] = std::conj(m1) * seed_i + sys.site_generator(s.y[3], q) - lm * s.y[3];

  std::array<cplx, 4> y;
  for (int i = 0; i < 4; ++i) y[i] = sys.kernel_trace(s.y[i]);
  PhotonMemory mem;
  mem.rc = 0.5 * (y[0] + y[1]).real();
  mem.rs = 0.5 * (y[1] - y[0]).imag();
  mem.i1 = 0.5 * (y[2] + y[3]).imag();
  mem.i2 = 0.5 * (y[2] - y[3]).real();
  set_moments(d, s.m, sd.sx, mem, p);
  return d;
}

// Stage state at time t_n + c dt; the newest history entry is seeded at t_n.
Deriv rhs_window(const BmfSystem& sys, const BmfState& s, double dt, double c) {
  const auto& p = sys.params();
  const double n = sys.n(), q = s.m.q;
  const Seeds sd = sys.seeds(s.rho);
  const auto& entries = s.history.entries;
  const std::vector<double> w = trapezoid_weights(entries.size(), dt, c);
  const double t_now = entries.empty() ? s.t : entries.back().t_seed + c * dt;

  CMatrix mem_op = CMatrix::Zero(s.rho.rows(), s.rho.cols());
  PhotonMemory mem;
  auto accumulate = [&](double weight, double tau, double dx2, double dxp, const CMatrix& a, const CMatrix& b,
                        const CMatrix& same, const CMatrix& cross) {
    if (weight == 0.0) return;
    const double e = std::exp(-p.kappa * tau), co = std::cos(p.omega * tau), si = std::sin(p.omega * tau);
    const double c0r = e * n * (co * dx2 - si * dxp), c0i = -e * si;
    mem_op += weight * c0r * a;
    if (c0i != 0.0) mem_op += (weight * c0i) * kI * b;
    const cplx ks = sys.kernel_trace(same), kc = sys.kernel_trace(cross);
    const double kr = (ks / n + (1.0 - 1.0 / n) * kc).real();
    const double ki = (ks + (n - 1.0) * kc).imag();
    mem.rc += weight * e * co * kr;
    mem.rs += weight * e * si * kr;
    mem.i1 += weight * e * (si * dx2 + co * dxp) * ki;
    mem.i2 += weight * e * (si * dxp - co * dx2) * ki;
  };
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& en = entries[i];
    accumulate(w[i], t_now - en.t_seed, en.dx2, en.dxp, en.a, en.b, en.d_same, en.d_cross);
  }
  accumulate(w.back(), 0.0, s.m.dx2, s.m.dxp, sd.comm, sd.b, sd.same, sd.cross);

  Deriv d;
  d.rho = pair_rhs(sys, s.rho, q, mem_op);
  d.hist.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) sys.propagate_entry_rhs(entries[i], q, d.hist[i]);
  set_moments(d, s.m, sd.sx, mem, p);
  return d;
}

Deriv rhs(const BmfSystem& sys, const BmfState& s, double dt, double c) {
  return s.scheme == MemoryScheme::exponential ? rhs_exponential(sys, s) : rhs_window(sys, s, dt, c);
}

bool finite(const BmfState& s) {
  const auto& m = s.m;
  return std::isfinite(m.q) && std::isfinite(m.p) && std::isfinite(m.dn) && std::isfinite(m.dx2) &&
         std::isfinite(m.dxp) && s.rho.allFinite();
}

const std::vector<std::string> kBmfColumns = {
    "t",     "q",     "p",     "re_a",         "im_a",        "n",           "dn",      "dx2",
    "dxp",   "n_total", "sx",  "sy",           "sz",          "trace_defect", "herm_defect",
    "swap_defect", "min_eig", "c_xx", "c_yy", "c_zz", "c_xy", "c_xz", "c_yz"};

std::vector<double> observe(const BmfSystem& sys, const BmfState& s, bool min_eig) {
  const auto& site = sys.site();
  const Index d = site.dim;
  const CMatrix rho_i = trace_right(s.rho, d, d);
  const double n_coh = 0.25 * (s.m.q * s.m.q + s.m.p * s.m.p);
  std::vector<double> row = {s.t,
                             s.m.q,
                             s.m.p,
                             0.5 * s.m.q,
                             0.5 * s.m.p,
                             n_coh,
                             s.m.dn,
                             s.m.dx2,
                             s.m.dxp,
                             n_coh + s.m.dn,
                             trace_product(site.sx, rho_i).real(),
                             trace_product(site.sy, rho_i).real(),
                             trace_product(site.sz, rho_i).real(),
                             std::abs(s.rho.trace() - 1.0),
                             hermiticity_defect(s.rho),
                             (s.rho - swap_factors(s.rho, d)).cwiseAbs().maxCoeff(),
                             min_eig ? min_eigenvalue(s.rho) : std::numeric_limits<double>::quiet_NaN()};
  for (double c : connected_correlators(sys, s.rho)) row.push_back(c);
  return row;
}

}  // namespace

const std::vector<std::string>& bmf_columns() { return kBmfColumns; }

std::array<double, 6> connected_correlators(const BmfSystem& sys, const CMatrix& rho) {
  const auto& site = sys.site();
  const Index d = site.dim;
  SpMatrix id(d, d);
  id.setIdentity();
  const std::array<const SpMatrix*, 3> ops = {&site.sx, &site.sy, &site.sz};
  const CMatrix rho_i = trace_right(rho, d, d), rho_j = trace_left(rho, d, d);
  auto joint = [&](int a, int b) {
    return 0.5 * (trace_product(kron(*ops[a], *ops[b]), rho) + trace_product(kron(*ops[b], *ops[a]), rho)).real();
  };
  auto single = [&](int a, const CMatrix& r) { return trace_product(*ops[a], r).real(); };
  auto conn = [&](int a, int b) {
    return joint(a, b) - 0.5 * (single(a, rho_i) * single(b, rho_j) + single(b, rho_i) * single(a, rho_j));
  };
  return {conn(0, 0), conn(1, 1), conn(2, 2), conn(0, 1), conn(0, 2), conn(1, 2)};
}

BmfState bmf_initial_state(const BmfSystem& sys, const InitialState& init, MemoryScheme scheme) {
  const InitialBundle b = build_initial_state(sys.params(), init);
  BmfState s;
  s.scheme = scheme;
  s.m = b.moments;
  s.rho = b.pair;
  if (scheme == MemoryScheme::exponential) {
    s.w = CMatrix::Zero(s.rho.rows(), s.rho.cols());
    for (auto& y : s.y) y = CMatrix::Zero(sys.site().dim, sys.site().dim);
  } else {
    s.history.entries.push_back(sys.seed_entry(s.t, s.m, sys.seeds(s.rho)));
  }
  return s;
}

BmfState bmf_evolve(const BmfSystem& sys, BmfState s, double t_max, double dt, TimeSeries* series,
                    const BmfOptions& opt) {
  require(dt > 0.0 && t_max >= s.t, ErrorKind::validation, "bmf run needs dt > 0 and t_max >= t0");
  const Index pd = sys.pair().d * sys.pair().d;
  require(s.rho.rows() == pd && s.rho.cols() == pd, ErrorKind::structural,
          "pair state has the wrong dimension");
  const double kappa = sys.params().kappa;
  require(opt.scheme == MemoryScheme::exponential || kappa > 0.0 || opt.t_mem > 0.0, ErrorKind::validation,
          "window memory needs kappa > 0 or an explicit t_mem");
  const double t_mem = opt.t_mem > 0.0 ? opt.t_mem : -std::log(opt.eps_mem) / kappa;
  if (s.scheme == MemoryScheme::window && s.history.entries.empty())
    s.history.entries.push_back(sys.seed_entry(s.t, s.m, sys.seeds(s.rho)));

  const long steps = std::lround((t_max - s.t) / dt);
  const double t0 = s.t;
  if (series && series->columns().empty()) *series = TimeSeries(kBmfColumns);
  if (series) series->append(observe(sys, s, opt.track_min_eigenvalue));
  for (long k = 1; k <= steps; ++k) {
    const Deriv k1 = rhs(sys, s, dt, 0.0);
    const Deriv k2 = rhs(sys, stage(s, 0.5 * dt, k1), dt, 0.5);
    const Deriv k3 = rhs(sys, stage(s, 0.5 * dt, k2), dt, 0.5);
    const Deriv k4 = rhs(sys, stage(s, dt, k3), dt, 1.0);
    BmfState next = stage(s, dt / 6.0, k1);
    next = stage(next, dt / 3.0, k2);
    next = stage(next, dt / 3.0, k3);
    next = stage(next, dt / 6.0, k4);
    next.t = t0 + k * dt;
    if (!finite(next)) {
      if (series) series->diverged = true;
      if (opt.throw_on_divergence)
        fail(ErrorKind::divergence, "non-finite beyond-mean-field state after t = " + std::to_string(s.t));
      return s;
    }
    if (next.scheme == MemoryScheme::window) {
      auto& entries = next.history.entries;
      entries.push_back(sys.seed_entry(next.t, next.m, sys.seeds(next.rho)));
      while (entries.size() > 1 && next.t - entries.front().t_seed > t_mem) entries.pop_front();
      require(entries.size() <= opt.max_window, ErrorKind::dimension_budget, "memory window exceeds max_window");
    }
    s = std::move(next);
    if (series && (k % opt.record_every == 0 || k == steps))
      series->append(observe(sys, s, opt.track_min_eigenvalue));
  }
  return s;
}

TimeSeries bmf_run(const DickeParams& params, const InitialState& init, double t_max, double dt,
                   const BmfOptions& opt) {
  DickeParams p = params;
  resolve_bath(p);
  const BmfSystem sys(p);
  TimeSeries series(kBmfColumns);
  bmf_evolve(sys, bmf_initial_state(sys, init, opt.scheme), t_max, dt, &series, opt);
  return series;
}

}  // namespace dicke
