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

// Mean-field dynamics: the scaled cavity amplitude a = <a>/sqrt(N) drives a
// single open site through the field 2 g Re a.
//
//   da/dt   = (-i Omega - kappa) a - i g Tr(sigma^x rho)
//   drho/dt = L_site rho - i (2 g Re a) [sigma^x, rho]

#pragma once

#include <vector>

#include "dicke/model.hpp"
#include "dicke/series.hpp"

namespace dicke {

struct MfState {
  double t = 0.0;
  cplx a = 0.0;
  CMatrix rho;
};

struct RunOptions {
  int record_every = 1;
  bool throw_on_divergence = true;
  bool track_min_eigenvalue = true;
};

// Columns: t, re_a, im_a, n, sx, sy, sz, trace_defect, min_eig.
TimeSeries mf_run(const DickeParams& params, const InitialState& init, double t_max, double dt,
                  const RunOptions& opt = {});

// Same integration starting from an explicit state; returns the final state.
MfState mf_evolve(const DickeParams& params, MfState state, double t_max, double dt, TimeSeries* series,
                  const RunOptions& opt = {});

struct SweepPoint {
  double g = 0.0;
  double abs_a = 0.0, re_a = 0.0, im_a = 0.0, sx = 0.0, sz = 0.0;
  double ratio = 0.0;  // Re a_ss / Im a_ss
  bool converged = false;
};

std::vector<SweepPoint> mf_steady_sweep(const DickeParams& params, const std::vector<double>& g_grid,
                                        const InitialState& init, double t_max, double dt,
                                        unsigned workers = 1);

// Smallest g in a sweep with |a_ss| above `threshold`, bracketed by its
// predecessor. Returns {g_below, g_above}; both NaN if no onset is seen.
std::pair<double, double> sweep_onset(const std::vector<SweepPoint>& sweep, double threshold = 1e-3);

}  // namespace dicke
