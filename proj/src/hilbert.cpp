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

#include "dicke/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace dicke {

SpMatrix kron(const SpMatrix& a, const SpMatrix& b) {
  SpMatrix out = Eigen::kroneckerProduct(a, b).eval();
  out.makeCompressed();
  return out;
}

CMatrix times_adjoint(const CMatrix& x, const SpMatrix& a) {
  const CMatrix xd = x.adjoint();
  const CMatrix ax = a * xd;
  return ax.adjoint();
}

CMatrix commutator(const SpMatrix& h, const CMatrix& x) {
  CMatrix out = h * x;
  out -= times_adjoint(x, h);
  return out;
}

CMatrix anticommutator(const SpMatrix& h, const CMatrix& x) {
  CMatrix out = h * x;
  out += times_adjoint(x, h);
  return out;
}

cplx trace_product(const SpMatrix& op, const CMatrix& x) {
  cplx acc = 0.0;
  for (Index j = 0; j < op.outerSize(); ++j)
    for (SpMatrix::InnerIterator it(op, j); it; ++it) acc += it.value() * x(j, it.row());
  return acc;
}

double min_eigenvalue(const CMatrix& x) {
  const CMatrix h = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace pauli {

namespace {
SpMatrix from_dense(const Eigen::Matrix2cd& m) {
  SpMatrix s = m.sparseView();
  s.makeCompressed();
  return s;
}
}  // namespace

SpMatrix identity() { return from_dense(Eigen::Matrix2cd::Identity()); }

SpMatrix x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return from_dense(m);
}

SpMatrix y() {
  Eigen::Matrix2cd m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return from_dense(m);
}

SpMatrix z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return from_dense(m);
}

}  // namespace pauli

SpMatrix annihilation(Index d) {
  require(d >= 1, ErrorKind::domain, "Fock cutoff must be positive");
  SpMatrix a(d, d);
  for (Index n = 1; n < d; ++n) a.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
  a.makeCompressed();
  return a;
}

SpMatrix embed(const SpMatrix& op, std::size_t k, const std::vector<Index>& dims) {
  require(k < dims.size(), ErrorKind::structural, "embed factor index out of range");
  require(op.rows() == dims[k], ErrorKind::structural, "embed operator size does not match factor");
  Index left = 1, right = 1;
  for (std::size_t f = 0; f < k; ++f) left *= dims[f];
  for (std::size_t f = k + 1; f < dims.size(); ++f) right *= dims[f];
  SpMatrix il(left, left), ir(right, right);
  il.setIdentity();
  ir.setIdentity();
  return kron(kron(il, op), ir);
}

LiouvillianSpec::LiouvillianSpec(SpMatrix hamiltonian, std::vector<Jump> jumps)
    : h_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
  require(h_.rows() == h_.cols(), ErrorKind::structural, "Hamiltonian must be square");
  SpMatrix k(h_.rows(), h_.cols());
  for (const auto& j : jumps_) {
    require(j.op.rows() == h_.rows() && j.op.cols() == h_.cols(), ErrorKind::structural,
            "jump operator dimension mismatch");
    SpMatrix jd = j.op.adjoint();
    k += j.rate * (jd * j.op);
    jumps_adj_.push_back(std::move(jd));
  }
  heff_ = h_ - cplx(0, 0.5) * k;
  heff_.makeCompressed();
  heff_adj_ = heff_.adjoint();
  heff_adj_.makeCompressed();
}

CMatrix LiouvillianSpec::apply(const CMatrix& x) const {
  require(x.rows() == dim() && x.cols() == dim(), ErrorKind::structural, "apply_liouvillian dimension mismatch");
  const cplx mi(0, -1);
  CMatrix out = mi * (heff_ * x);
  out.noalias() -= mi * times_adjoint(x, heff_);
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    const CMatrix jx = jumps_[k].op * x;
    out.noalias() += jumps_[k].rate * times_adjoint(jx, jumps_[k].op);
  }
  return out;
}

CMatrix LiouvillianSpec::apply_adjoint(const CMatrix& a) const {
  require(a.rows() == dim() && a.cols() == dim(), ErrorKind::structural, "apply_adjoint dimension mismatch");
  const cplx pi(0, 1);
  CMatrix out = pi * (heff_adj_ * a);
  out.noalias() -= pi * times_adjoint(a, heff_adj_);
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    const CMatrix ja = jumps_adj_[k] * a;
    out.noalias() += jumps_[k].rate * times_adjoint(ja, jumps_adj_[k]);
  }
  return out;
}

namespace {

template <typename F>
CMatrix rk4_linear(F&& f, CMatrix x, double dt, int steps) {
  for (int s = 0; s < steps; ++s) {
    CMatrix k1 = f(x);
    CMatrix k2 = f(x + 0.5 * dt * k1);
    CMatrix k3 = f(x + 0.5 * dt * k2);
    CMatrix k4 = f(x + dt * k3);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace

CMatrix propagate(const LiouvillianSpec& l, CMatrix x, double dt, int steps) {
  return rk4_linear([&](const CMatrix& y) { return l.apply(y); }, std::move(x), dt, steps);
}

CMatrix propagate_adjoint(const LiouvillianSpec& l, CMatrix a, double dt, int steps) {
  return rk4_linear([&](const CMatrix& y) { return l.apply_adjoint(y); }, std::move(a), dt, steps);
}

}  // namespace dicke
