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

// Beyond-mean-field dynamics.
//
// Photon first and scaled second moments are coupled to a permutation
// symmetric two-site density matrix through second-order memory kernels.
// With S = sx_i + sx_j, DS = S - 2<sx>, C0R(tau) = e^{-k tau}(cos(W tau) N dx2'
// - sin(W tau) N dxp') and C0I(tau) = -e^{-k tau} sin(W tau):
//
//   drho/dt = L_pair rho - i g q [S, rho]
//           - (g^2/N) int C0R [S, U [DS', rho']]
//           - i (g^2/N) int C0I [S, U ({DS', rho'} + 2(N-2)(X_R' (x) rho_j' + rho_i' (x) X_L'))]
//
// where primes mark the source time t', U propagates with the driven pair
// generator and X_R = Tr_j[(1 (x) Dsx) rho], X_L = Tr_i[(Dsx (x) 1) rho].
// The spin kernels C(t, t') = Tr[sx U_site (seed')] use the same-site seed
// Dsx rho_i and the cross-site seed X_R.
//
// Two memory schemes share these equations. `window` stores one propagated
// auxiliary per retained grid time and sums with trapezoid weights.
// `exponential` uses that the photon kernels are e^{-(k +- iW) tau} times a
// function of t', so each memory integral obeys a linear ODE and is carried
// exactly by a handful of auxiliaries.

#pragma once

#include <array>
#include <deque>
#include <utility>
#include <vector>

#include "dicke/meanfield.hpp"
#include "dicke/model.hpp"
#include "dicke/series.hpp"

namespace dicke {

enum class MemoryScheme { exponential, window };

struct BmfOptions : RunOptions {
  MemoryScheme scheme = MemoryScheme::exponential;
  double eps_mem = 1e-8;
  double t_mem = 0.0;  // 0 selects -ln(eps_mem) / kappa
  std::size_t max_window = 200000;
};

std::pair<double, double> photon_first_moment_rhs(const PhotonMoments& m, double sx, const DickeParams& p);

// The four memory integrals entering the second moments:
//   rc = int e cos K_R, rs = int e sin K_R,
//   i1 = int e (sin dx2' + cos dxp') K_I, i2 = int e (sin dxp' - cos dx2') K_I.
struct PhotonMemory {
  double rc = 0.0, rs = 0.0, i1 = 0.0, i2 = 0.0;
};

// (d dn/dt, d dx2/dt, d dxp/dt).
std::array<double, 3> photon_second_moment_rhs(const PhotonMoments& m, const PhotonMemory& mem,
                                               const DickeParams& p);

// Trapezoid weights for `nodes` grid points spaced dt, followed by the
// weight of the endpoint at stage offset c * dt past the last node.
std::vector<double> trapezoid_weights(std::size_t nodes, double dt, double c);

struct KernelEntry {
  double t_seed = 0.0;
  double dx2 = 0.0, dxp = 0.0;
  CMatrix a;        // pair: propagated [DS, rho]
  CMatrix b;        // pair: propagated anticommutator-plus-partial-trace seed
  CMatrix d_same;   // site: propagated Dsx rho_i
  CMatrix d_cross;  // site: propagated Tr_j[(1 (x) Dsx) rho_ij]
};

struct KernelHistory {
  std::deque<KernelEntry> entries;
};

struct KernelSequences {
  std::vector<double> t_seed;
  std::vector<cplx> same, cross;  // C^R = real part, C^I = imaginary part
};

struct Seeds {
  double sx = 0.0;
  CMatrix rho_i, rho_j;
  CMatrix comm;     // [S, rho] = [DS, rho]
  CMatrix b;        // {DS, rho} + 2(N-2)(X_R (x) rho_j + rho_i (x) X_L)
  CMatrix same;     // Dsx rho_i
  CMatrix cross;    // X_R
};

// Static ingredients and right-hand-side pieces shared by both schemes.
class BmfSystem {
 public:
  explicit BmfSystem(const DickeParams& params);

  const DickeParams& params() const { return p_; }
  const SiteModel& site() const { return site_; }
  const PairModel& pair() const { return pair_; }
  double n() const { return p_.n_sites; }

  Seeds seeds(const CMatrix& rho) const;
  // Driven generators at photon quadrature q.
  CMatrix pair_generator(const CMatrix& x, double q) const;
  CMatrix site_generator(const CMatrix& x, double q) const;
  // Local part of d rho_ij / dt.
  CMatrix pair_local(const CMatrix& rho, double q) const;
  cplx kernel_trace(const CMatrix& site_op) const { return trace_product(site_.sx, site_op); }

  KernelEntry seed_entry(double t, const PhotonMoments& m, const Seeds& s) const;
  void propagate_entry_rhs(const KernelEntry& e, double q, KernelEntry& out) const;

 private:
  DickeParams p_;
  SiteModel site_;
  PairModel pair_;
};

KernelSequences spin_corr_kernels(const KernelHistory& history, const BmfSystem& sys);

// d rho_ij/dt given the pair memory operator M, entering as -(g^2/N)[S, M].
CMatrix pair_rhs(const BmfSystem& sys, const CMatrix& rho, double q, const CMatrix& memory);

// Full dynamical state. The exponential scheme uses `w` and `y`; the window
// scheme uses `history`.
struct BmfState {
  double t = 0.0;
  PhotonMoments m;
  CMatrix rho;
  CMatrix w;                  // pair auxiliary for both kernel families
  std::array<CMatrix, 4> y;   // site auxiliaries R+, R-, I+, I-
  KernelHistory history;
  MemoryScheme scheme = MemoryScheme::exponential;
};

BmfState bmf_initial_state(const BmfSystem& sys, const InitialState& init, MemoryScheme scheme);

// Columns: t, q, p, re_a, im_a, n, dn, dx2, dxp, n_total, sx, sy, sz,
// trace_defect, herm_defect, swap_defect, min_eig, c_xx, c_yy, c_zz, c_xy,
// c_xz, c_yz.
const std::vector<std::string>& bmf_columns();

BmfState bmf_evolve(const BmfSystem& sys, BmfState state, double t_max, double dt, TimeSeries* series,
                    const BmfOptions& opt = {});

TimeSeries bmf_run(const DickeParams& params, const InitialState& init, double t_max, double dt,
                   const BmfOptions& opt = {});

// Connected correlators <s^mu_i s^nu_j> - <s^mu><s^nu> in the order
// xx, yy, zz, xy, xz, yz.
std::array<double, 6> connected_correlators(const BmfSystem& sys, const CMatrix& rho);

}  // namespace dicke
