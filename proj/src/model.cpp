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

#include "dicke/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace dicke {

void DickeParams::validate() const {
  require(std::isfinite(omega), ErrorKind::validation, "omega must be finite");
  require(kappa >= 0.0, ErrorKind::validation, "kappa must be non-negative");
  require(g >= 0.0, ErrorKind::validation, "g must be non-negative");
  require(n_sites >= 1.0, ErrorKind::validation, "N must be positive");
  require(std::isinf(n_sites) || n_sites == std::floor(n_sites), ErrorKind::validation,
          "N must be an integer or infinite");
  if (bath.backend == BathBackend::markovian)
    require(bath.gamma_phi >= 0.0, ErrorKind::validation, "gamma_phi must be non-negative");
  if (bath.backend == BathBackend::pseudomode) bath.spectral.validate();
}

void resolve_bath(DickeParams& params) {
  auto& b = params.bath;
  if (b.resolved || b.backend != BathBackend::pseudomode) {
    b.resolved = true;
    return;
  }
  b.embedding = embed_bath(b.spectral, b.beta_t, b.fit, params.kappa);
  b.resolved = true;
}

namespace {

// Pseudomode Hamiltonian, sigma^z coupling and jumps on spin (x) modes.
void add_pseudomodes(const PseudomodeEmbedding& emb, const std::vector<Index>& dims, const SpMatrix& sz,
                     SpMatrix& h, std::vector<Jump>& jumps) {
  const int m = emb.size();
  std::vector<SpMatrix> b;
  for (int k = 0; k < m; ++k) b.push_back(embed(annihilation(emb.fock_cutoff), k + 1, dims));
  SpMatrix x(h.rows(), h.cols());
  for (int k = 0; k < m; ++k) {
    SpMatrix bd = b[k].adjoint();
    for (int l = 0; l < m; ++l)
      if (std::abs(emb.hamiltonian(k, l)) > 0.0) h += emb.hamiltonian(k, l) * (bd * b[l]);
    x += emb.coupling(k) * b[k] + std::conj(emb.coupling(k)) * bd;
  }
  h += sz * x;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(emb.damping);
  for (int r = 0; r < m; ++r) {
    const double rate = es.eigenvalues()(r);
    if (std::abs(rate) < 1e-14) continue;
    SpMatrix op(h.rows(), h.cols());
    for (int l = 0; l < m; ++l) op += std::conj(es.eigenvectors()(l, r)) * b[l];
    jumps.push_back({op, rate});
  }
}

}  // namespace

SiteModel build_site_model(const DickeParams& params) {
  params.validate();
  const auto& bath = params.bath;
  SiteModel site;
  site.dims = {2};
  const bool modes = bath.backend == BathBackend::pseudomode && !bath.embedding.empty();
  require(bath.backend != BathBackend::pseudomode || bath.resolved || bath.spectral.is_zero(),
          ErrorKind::validation, "pseudomode backend used before the bath was resolved");
  if (modes)
    for (int k = 0; k < bath.embedding.size(); ++k) site.dims.push_back(bath.embedding.fock_cutoff);
  site.dim = 1;
  for (Index d : site.dims) site.dim *= d;
  check_dimension_budget(site.dim, params.dimension_budget);

  site.sx = embed(pauli::x(), 0, site.dims);
  site.sy = embed(pauli::y(), 0, site.dims);
  site.sz = embed(pauli::z(), 0, site.dims);
  SpMatrix h = params.omega_z * site.sz;
  std::vector<Jump> jumps;
  if (bath.backend == BathBackend::markovian && bath.gamma_phi > 0.0) jumps.push_back({site.sz, bath.gamma_phi});
  if (modes) add_pseudomodes(bath.embedding, site.dims, site.sz, h, jumps);
  h.makeCompressed();
  site.base = LiouvillianSpec(h, jumps);
  return site;
}

LiouvillianSpec site_liouvillian(const DickeParams& params, double drive) {
  const SiteModel site = build_site_model(params);
  SpMatrix h = site.base.hamiltonian() + drive * site.sx;
  return LiouvillianSpec(h, site.base.jumps());
}

PairModel build_pair_model(const SiteModel& site, Index budget) {
  check_dimension_budget(site.dim * site.dim, budget);
  PairModel pair;
  pair.d = site.dim;
  SpMatrix id(site.dim, site.dim);
  id.setIdentity();
  pair.sx_left = kron(site.sx, id);
  pair.sx_right = kron(id, site.sx);
  pair.s_sum = pair.sx_left + pair.sx_right;
  SpMatrix h = kron(site.base.hamiltonian(), id) + kron(id, site.base.hamiltonian());
  std::vector<Jump> jumps;
  for (const auto& j : site.base.jumps()) {
    jumps.push_back({kron(j.op, id), j.rate});
    jumps.push_back({kron(id, j.op), j.rate});
  }
  pair.base = LiouvillianSpec(h, jumps);
  return pair;
}

InitialBundle build_initial_state(const DickeParams& params, const InitialState& init) {
  require(init.theta >= 0.0 && init.theta < 2.0 * M_PI, ErrorKind::validation, "theta must lie in [0, 2 pi)");
  const SiteModel site = build_site_model(params);
  const Index modes = site.dim / 2;
  CVector psi = CVector::Zero(site.dim);
  psi(0) = std::cos(0.5 * init.theta);
  psi(modes) = std::sin(0.5 * init.theta);
  InitialBundle out;
  out.site = psi * psi.adjoint();
  if (site.dim * site.dim <= params.dimension_budget) out.pair = kron(out.site, out.site);
  out.moments.q = 2.0 * init.a0.real();
  out.moments.p = 2.0 * init.a0.imag();
  out.moments.dn = 0.0;
  out.moments.dx2 = std::isinf(params.n_sites) ? 0.0 : 1.0 / params.n_sites;
  out.moments.dxp = 0.0;
  return out;
}

}  // namespace dicke
