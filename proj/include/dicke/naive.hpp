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

// Born dynamics under the fully factorized projector for the bath-free
// model. Only same-site spin correlations enter the kernels, so the photon
// equations carry K_R = C_same / N and K_I = C_same, and the spin memory
// loses its partial-trace terms:
//
//   drho/dt = L rho - i g q [sx, rho]
//           - (g^2/N) int C0R [sx, U [sx', rho']] - i (g^2/N) int C0I [sx, U {Dsx', rho'}]
//
// In unscaled variables (n~ = N dn, X~ = N dx2, Y~ = N dxp) the parity
// symmetric steady state does not depend on N.

#pragma once

#include "dicke/bmf.hpp"

namespace dicke {

// Columns: t, q, p, re_a, im_a, n, dn, dx2, dxp, n_total, n_unscaled, sx,
// sy, sz.
const std::vector<std::string>& naive_columns();

TimeSeries naive_run(const DickeParams& params, const InitialState& init, double t_max, double dt,
                     const RunOptions& opt = {});

struct NaiveSteadyState {
  double dn = 0.0, dx2 = 0.0, dxp = 0.0, sz = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;

  // Photon number <a^dag a> without the 1/N scaling.
  double unscaled_photons(double n_sites) const { return n_sites * dn; }
};

struct NaiveSteadyOptions {
  double damping = 0.5;
  double tolerance = 1e-12;
  int max_iterations = 10000;
  double sz_start = -1.0;  // returned unchanged at g = 0
};

NaiveSteadyState naive_steady_state(const DickeParams& params, const NaiveSteadyOptions& opt = {});

// Closed forms of int_0^inf e^{-k t} f(W t) h(a t) dt for f, h in {cos, sin}:
// {cc, ss, sc, cs} with the first letter referring to W.
std::array<double, 4> exp_trig_integrals(double kappa, double omega, double a);

}  // namespace dicke
