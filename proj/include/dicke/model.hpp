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

// Open Dicke model ingredients.
//
//   H = Omega a^dag a + sum_i [omega_z sigma^z_i + (g / sqrt N)(a + a^dag) sigma^x_i + H^E_i]
//
// with photon loss at amplitude rate kappa and an identical local dephasing
// bath on every site. The diamagnetic A^2 term is omitted.

#pragma once

#include <complex>

#include "dicke/bath.hpp"
#include "dicke/hilbert.hpp"

namespace dicke {

enum class BathBackend { none, markovian, pseudomode };

struct BathSpec {
  BathBackend backend = BathBackend::none;
  double gamma_phi = 0.0;  // markovian rate
  SpectralDensity spectral;
  double beta_t = kInf;
  BathFitSettings fit;
  // Resolved embedding; filled by resolve_bath.
  PseudomodeEmbedding embedding;
  bool resolved = false;
};

struct DickeParams {
  double omega = 1.0;
  double kappa = 1.0;
  double omega_z = 0.025;
  double g = 0.0;
  double n_sites = 10.0;  // N; infinite for mean-field only
  BathSpec bath;
  Index dimension_budget = kDefaultDimensionBudget;

  void validate() const;
};

// Fits and embeds a pseudomode bath when needed; idempotent.
void resolve_bath(DickeParams& params);

struct InitialState {
  double theta = M_PI;  // Bloch polar angle from +z towards +x
  cplx a0 = 0.0;        // scaled cavity amplitude <a>/sqrt(N)
};

// Scaled photon moments: q = <a + a^dag>/sqrt N, p = <-i(a - a^dag)>/sqrt N,
// dn = D<a^dag a>/N, dx2 = D<(a + a^dag)^2>/N, dxp = D<i(a a - a^dag a^dag)>/N.
struct PhotonMoments {
  double q = 0.0, p = 0.0, dn = 0.0, dx2 = 0.0, dxp = 0.0;
};

// One site: spin followed by pseudomodes.
struct SiteModel {
  std::vector<Index> dims;
  Index dim = 2;
  SpMatrix sx, sy, sz;
  LiouvillianSpec base;  // zero drive
};

SiteModel build_site_model(const DickeParams& params);

// Site generator with drive * sigma^x added to the Hamiltonian.
LiouvillianSpec site_liouvillian(const DickeParams& params, double drive);

// Two sites with the left site as slow index.
struct PairModel {
  Index d = 2;
  SpMatrix sx_left, sx_right, s_sum;
  LiouvillianSpec base;
};

PairModel build_pair_model(const SiteModel& site, Index budget = kDefaultDimensionBudget);

struct InitialBundle {
  CMatrix site;
  CMatrix pair;
  PhotonMoments moments;
};

InitialBundle build_initial_state(const DickeParams& params, const InitialState& init);

}  // namespace dicke
