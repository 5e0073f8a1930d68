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

// Operators on finite tensor-product spaces.
//
// Factor ordering is global: the left factor of a Kronecker product is the
// slow index. A site is spin (slowest) followed by its pseudomodes in order;
// a pair is the left site followed by the right site.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "dicke/errors.hpp"

namespace dicke {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SpMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr Index kDefaultDimensionBudget = 4096;

inline void check_dimension_budget(Index dim, Index budget = kDefaultDimensionBudget) {
  require(dim <= budget, ErrorKind::dimension_budget,
          "dimension " + std::to_string(dim) + " exceeds budget " + std::to_string(budget));
}

// Dense operator together with the dimensions of its tensor factors.
template <typename Scalar>
class TensorOperator {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  TensorOperator() = default;

  explicit TensorOperator(Matrix m) : m_(std::move(m)), dims_{m_.rows()} {
    require(m_.rows() == m_.cols(), ErrorKind::structural, "operator must be square");
  }

  TensorOperator(Matrix m, std::vector<Index> dims) : m_(std::move(m)), dims_(std::move(dims)) {
    require(m_.rows() == m_.cols(), ErrorKind::structural, "operator must be square");
    const Index prod = std::accumulate(dims_.begin(), dims_.end(), Index{1}, std::multiplies<>());
    require(prod == m_.rows(), ErrorKind::structural, "factor dimensions do not match operator size");
  }

  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }
  const std::vector<Index>& dims() const { return dims_; }
  Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
  std::vector<Index> dims_;
};

using Operator = TensorOperator<cplx>;
using DensityMatrix = TensorOperator<cplx>;

template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                                                a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

SpMatrix kron(const SpMatrix& a, const SpMatrix& b);

template <typename Scalar>
TensorOperator<Scalar> tensor_product(const TensorOperator<Scalar>& a, const TensorOperator<Scalar>& b,
                                      Index budget = kDefaultDimensionBudget) {
  check_dimension_budget(a.dim() * b.dim(), budget);
  std::vector<Index> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return TensorOperator<Scalar>(kron(a.matrix(), b.matrix()), std::move(dims));
}

// Trace over every factor whose position is not listed in `keep`.
template <typename Scalar>
TensorOperator<Scalar> partial_trace(const TensorOperator<Scalar>& x, std::vector<int> keep) {
  const auto& dims = x.dims();
  const int nf = static_cast<int>(dims.size());
  require(!keep.empty(), ErrorKind::structural, "partial_trace needs at least one kept factor");
  std::sort(keep.begin(), keep.end());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    require(keep[k] >= 0 && keep[k] < nf, ErrorKind::structural, "partial_trace factor label out of range");
    require(k == 0 || keep[k] != keep[k - 1], ErrorKind::structural, "partial_trace factor label repeated");
  }
  std::vector<bool> kept(nf, false);
  for (int k : keep) kept[k] = true;

  std::vector<Index> out_dims, traced_dims;
  for (int f = 0; f < nf; ++f) (kept[f] ? out_dims : traced_dims).push_back(dims[f]);
  const Index dout = std::accumulate(out_dims.begin(), out_dims.end(), Index{1}, std::multiplies<>());
  const Index dtr = std::accumulate(traced_dims.begin(), traced_dims.end(), Index{1}, std::multiplies<>());

  // Full index from (kept index, traced index).
  std::vector<Index> stride(nf, 1);
  for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];
  auto compose = [&](Index ik, Index it) {
    Index full = 0;
    for (int f = nf - 1; f >= 0; --f) {
      if (kept[f]) {
        full += (ik % dims[f]) * stride[f];
        ik /= dims[f];
      } else {
        full += (it % dims[f]) * stride[f];
        it /= dims[f];
      }
    }
    return full;
  };

  typename TensorOperator<Scalar>::Matrix out = TensorOperator<Scalar>::Matrix::Zero(dout, dout);
  for (Index t = 0; t < dtr; ++t)
    for (Index j = 0; j < dout; ++j) {
      const Index fj = compose(j, t);
      for (Index i = 0; i < dout; ++i) out(i, j) += x.matrix()(compose(i, t), fj);
    }
  return TensorOperator<Scalar>(std::move(out), std::move(out_dims));
}

// Two-factor partial traces on raw matrices of size (dl*dr)^2.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> trace_right(
    const Eigen::MatrixBase<Derived>& x, Index dl, Index dr) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(dl, dl);
  for (Index j = 0; j < dl; ++j)
    for (Index i = 0; i < dl; ++i) out(i, j) = x.block(i * dr, j * dr, dr, dr).trace();
  return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> trace_left(
    const Eigen::MatrixBase<Derived>& x, Index dl, Index dr) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dr, dr);
  for (Index a = 0; a < dl; ++a) out += x.block(a * dr, a * dr, dr, dr);
  return out;
}

// S X S with S the exchange of two factors of dimension d.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> swap_factors(
    const Eigen::MatrixBase<Derived>& x, Index d) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(d * d, d * d);
  for (Index c = 0; c < d; ++c)
    for (Index dd = 0; dd < d; ++dd)
      for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b) out(a * d + b, c * d + dd) = x(b * d + a, dd * d + c);
  return out;
}

template <typename DerivedA, typename DerivedB>
auto commutator(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return (a * b - b * a).eval();
}

template <typename DerivedA, typename DerivedB>
auto anticommutator(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return (a * b + b * a).eval();
}

// Tr(op * x) without forming the product.
cplx trace_product(const SpMatrix& op, const CMatrix& x);

// x a^dag evaluated as (a x^dag)^dag, which keeps the sparse factor on the left.
CMatrix times_adjoint(const CMatrix& x, const SpMatrix& a);

// [h, x] and {h, x} for Hermitian sparse h.
CMatrix commutator(const SpMatrix& h, const CMatrix& x);
CMatrix anticommutator(const SpMatrix& h, const CMatrix& x);

template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& x) {
  return (x - x.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const CMatrix& x);

namespace pauli {
SpMatrix identity();
SpMatrix x();
SpMatrix y();
SpMatrix z();
}  // namespace pauli

// Truncated bosonic annihilation operator on d Fock levels.
SpMatrix annihilation(Index d);

// `op` acting on factor k of a product space with the given factor dims.
SpMatrix embed(const SpMatrix& op, std::size_t k, const std::vector<Index>& dims);

struct Jump {
  SpMatrix op;
  double rate = 0.0;
};

// -i[H, X] + sum_k rate_k (J_k X J_k^dag - {J_k^dag J_k, X}/2). Rates may be
// negative for quasi-Lindblad generators.
class LiouvillianSpec {
 public:
  LiouvillianSpec() = default;
  LiouvillianSpec(SpMatrix hamiltonian, std::vector<Jump> jumps);

  Index dim() const { return h_.rows(); }
  const SpMatrix& hamiltonian() const { return h_; }
  const std::vector<Jump>& jumps() const { return jumps_; }

  // X -> L(X) and A -> L^dag(A), the Heisenberg-picture dual.
  CMatrix apply(const CMatrix& x) const;
  CMatrix apply_adjoint(const CMatrix& a) const;

 private:
  SpMatrix h_;
  std::vector<Jump> jumps_;
  SpMatrix heff_;      // H - (i/2) sum rate J^dag J
  SpMatrix heff_adj_;  // its adjoint
  std::vector<SpMatrix> jumps_adj_;
};

inline CMatrix apply_liouvillian(const LiouvillianSpec& l, const CMatrix& x) { return l.apply(x); }
inline CMatrix apply_adjoint_liouvillian(const LiouvillianSpec& l, const CMatrix& a) {
  return l.apply_adjoint(a);
}

// Fixed-step RK4 propagation under a time-independent generator.
CMatrix propagate(const LiouvillianSpec& l, CMatrix x, double dt, int steps);
CMatrix propagate_adjoint(const LiouvillianSpec& l, CMatrix a, double dt, int steps);

}  // namespace dicke
