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


#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "dicke/bmf.hpp"

using namespace dicke;

namespace {

DickeParams params(double g, double n, double gamma = 0.0) {
  DickeParams p;
  p.g = g;
  p.n_sites = n;
  if (gamma > 0.0) {
    p.bath.backend = BathBackend::markovian;
    p.bath.gamma_phi = gamma;
  }
  return p;
}

BmfOptions quiet(MemoryScheme scheme = MemoryScheme::exponential) {
  BmfOptions o;
  o.scheme = scheme;
  o.track_min_eigenvalue = false;
  return o;
}

CMatrix random_density(Index d, std::mt19937& rng) {
  std::normal_distribution<double> n;
  CMatrix m(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) m(i, j) = cplx(n(rng), n(rng));
  CMatrix rho = m * m.adjoint();
  return rho / rho.trace();
}

CMatrix spin_state(double theta) {
  CVector psi(2);
  psi << std::cos(0.5 * theta), std::sin(0.5 * theta);
  return psi * psi.adjoint();
}

double max_diff(const TimeSeries& a, const TimeSeries& b, const std::string& col) {
  double worst = 0.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
    worst = std::max(worst, std::abs(a.at(k, col) - b.at(k, col)));
  return worst;
}

}  // namespace

TEST_CASE("first moment steady state and fixed point") {
  const DickeParams p = params(0.3, 10);
  const double sx = -0.4;
  const double q = -2.0 * p.g * p.omega * sx / (p.omega * p.omega + p.kappa * p.kappa);
  PhotonMoments m;
  m.q = q;
  m.p = p.kappa / p.omega * q;
  const auto [dq, dp] = photon_first_moment_rhs(m, sx, p);
  CHECK(std::abs(dq) < 1e-15);
  CHECK(std::abs(dp) < 1e-15);
  const auto [zq, zp] = photon_first_moment_rhs(PhotonMoments{}, 0.0, p);
  CHECK(zq == 0.0);
  CHECK(zp == 0.0);
}

TEST_CASE("decoupled quadratures spiral at kappa and Omega") {
  const TimeSeries s = bmf_run(params(0.0, 10), {M_PI, 0.5}, 5.0, 0.01, quiet());
  for (std::size_t k = 0; k < s.size(); k += 50) {
    const double t = s.at(k, "t");
    CHECK(s.at(k, "q") == doctest::Approx(std::exp(-t) * std::cos(t)).epsilon(1e-9));
    CHECK(s.at(k, "p") == doctest::Approx(-std::exp(-t) * std::sin(t)).epsilon(1e-9));
  }
}

TEST_CASE("vacuum fluctuations are stationary without coupling") {
  const DickeParams p = params(0.0, 20);
  PhotonMoments m;
  m.dx2 = 1.0 / p.n_sites;
  for (double d : photon_second_moment_rhs(m, {}, p)) CHECK(std::abs(d) < 1e-16);
}

TEST_CASE("empty memory leaves the local second moment terms") {
  const DickeParams p = params(0.4, 20);
  PhotonMoments m;
  m.dn = 0.01;
  m.dx2 = 0.2;
  m.dxp = 0.03;
  const auto d = photon_second_moment_rhs(m, {}, p);
  CHECK(d[0] == doctest::Approx(-2.0 * m.dn));
  CHECK(d[1] == doctest::Approx(-2.0 * m.dxp - 2.0 * m.dx2 + 2.0 / 20));
  CHECK(d[2] == doctest::Approx(2.0 * m.dx2 - 2.0 * m.dxp - 2.0 / 20 - 4.0 * m.dn));
}

TEST_CASE("trapezoid weights integrate a constant kernel to second order") {
  const double t = 3.0;
  const double exact = (1.0 - std::exp(-t) * (std::cos(t) - std::sin(t))) / 2.0;
  auto error = [&](int steps) {
    const double dt = t / steps;
    const auto w = trapezoid_weights(steps, dt, 1.0);
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double s = t - i * dt;
      sum += w[i] * std::exp(-s) * std::cos(s);
    }
    return std::abs(sum - exact);
  };
  const double ratio = error(100) / error(200);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
  const auto w = trapezoid_weights(4, 0.1, 0.5);
  double total = 0.0;
  for (double x : w) total += x;
  CHECK(total == doctest::Approx(0.35));
}

TEST_CASE("equal-time spin kernels") {
  const BmfSystem sys(params(0.3, 10));
  const CMatrix rho1 = spin_state(0.825 * M_PI);
  const Seeds s = sys.seeds(kron(rho1, rho1));
  KernelHistory h;
  h.entries.push_back(sys.seed_entry(0.0, {}, s));
  const KernelSequences k = spin_corr_kernels(h, sys);
  const double sx = std::sin(0.825 * M_PI);
  CHECK(k.same[0].real() == doctest::Approx(1.0 - sx * sx).epsilon(1e-14));
  CHECK(std::abs(k.same[0].imag()) < 1e-15);
  CHECK(std::abs(k.cross[0]) < 1e-15);
}

TEST_CASE("free spin kernel matches exact two-level propagation") {
  const DickeParams p = params(0.0, 10);
  BmfSystem sys(p);
  const double theta = 0.6 * M_PI, dt = 0.01;
  BmfState s = bmf_initial_state(sys, {theta, 0.0}, MemoryScheme::window);
  s = bmf_evolve(sys, s, 2.0, dt, nullptr, quiet(MemoryScheme::window));
  const KernelSequences k = spin_corr_kernels(s.history, sys);
  REQUIRE(k.t_seed.size() > 100);
  const CMatrix sx = CMatrix(pauli::x());
  auto u = [&](double t) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = std::exp(cplx(0.0, -p.omega_z * t));
    m(1, 1) = std::exp(cplx(0.0, p.omega_z * t));
    return m;
  };
  const double t_now = s.t;
  double worst = 0.0;
  for (std::size_t m = 0; m < k.t_seed.size(); m += 20) {
    const double tp = k.t_seed[m];
    const CMatrix rho = u(tp) * spin_state(theta) * u(tp).adjoint();
    const cplx mean = (sx * rho).trace();
    const CMatrix seed = sx * rho - mean * rho;
    const CMatrix later = u(t_now - tp) * seed * u(t_now - tp).adjoint();
    worst = std::max(worst, std::abs((sx * later).trace() - k.same[m]));
    CHECK(std::abs(k.cross[m]) < 1e-14);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("uncoupled pair generator keeps products factorized") {
  const BmfSystem sys(params(0.0, 10, 0.1));
  std::mt19937 rng(3);
  const CMatrix a = random_density(2, rng), b = random_density(2, rng);
  const CMatrix out = pair_rhs(sys, kron(a, b), 0.0, CMatrix::Zero(4, 4));
  const auto& l = sys.site().base;
  CHECK((out - (kron(CMatrix(l.apply(a)), b) + kron(a, CMatrix(l.apply(b))))).norm() < 1e-14);
}

TEST_CASE("pair rhs is Hermitian and traceless for random memory") {
  const BmfSystem sys(params(0.3, 20, 0.1));
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix rho = random_density(4, rng);
    CMatrix memory = CMatrix::Zero(4, 4);
    for (int m = 0; m < 6; ++m) {
      const Seeds s = sys.seeds(random_density(4, rng));
      memory += u(rng) * s.comm + cplx(0.0, u(rng)) * s.b;
    }
    const CMatrix out = pair_rhs(sys, rho, u(rng), memory);
    CHECK(hermiticity_defect(out) < 1e-12);
    CHECK(std::abs(out.trace()) < 1e-12);
  }
}

TEST_CASE("zero coupling reproduces mean-field dynamics") {
  DickeParams p = params(0.0, 20, 0.1);
  const InitialState init{0.825 * M_PI, cplx(0.2, -0.1)};
  const TimeSeries b = bmf_run(p, init, 20.0, 0.02, quiet());
  p.n_sites = kInf;
  RunOptions ro;
  ro.track_min_eigenvalue = false;
  const TimeSeries m = mf_run(p, init, 20.0, 0.02, ro);
  REQUIRE(b.size() == m.size());
  for (const char* c : {"re_a", "im_a", "sx", "sy", "sz"}) CHECK(max_diff(b, m, c) < 1e-10);
  CHECK(std::abs(b.back("dn")) < 1e-14);
  CHECK(b.back("dx2") == doctest::Approx(1.0 / 20).epsilon(1e-12));
  CHECK(std::abs(b.back("dxp")) < 1e-14);
}

TEST_CASE("coupled run keeps swap symmetry, trace and Hermiticity") {
  const TimeSeries s = bmf_run(params(0.3, 20, 0.1), {0.825 * M_PI, cplx(1e-3, 1e-3)}, 30.0, 0.05, quiet());
  CHECK_FALSE(s.diverged);
  double swap = 0.0, herm = 0.0, tr = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    swap = std::max(swap, s.at(k, "swap_defect"));
    herm = std::max(herm, s.at(k, "herm_defect"));
    tr = std::max(tr, s.at(k, "trace_defect"));
  }
  CHECK(swap < 1e-10);
  CHECK(herm < 1e-10);
  CHECK(tr < 1e-10);
}

TEST_CASE("parity-symmetric start stays in its sector but moves sigma z") {
  const TimeSeries s = bmf_run(params(0.3, 20, 0.1), {M_PI, 0.0}, 40.0, 0.05, quiet());
  double odd = 0.0, dz = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (const char* c : {"q", "p", "sx", "sy", "c_xz", "c_yz"}) odd = std::max(odd, std::abs(s.at(k, c)));
    if (k > 0) dz = std::max(dz, std::abs(s.at(k, "sz") - s.at(k - 1, "sz")));
  }
  CHECK(odd < 1e-10);
  CHECK(dz > 1e-8);
}

TEST_CASE("window and exponential memory schemes agree") {
  const DickeParams p = params(0.3, 20, 0.1);
  const InitialState init{0.825 * M_PI, cplx(1e-3, 1e-3)};
  const TimeSeries e = bmf_run(p, init, 20.0, 0.02, quiet());
  const TimeSeries w = bmf_run(p, init, 20.0, 0.02, quiet(MemoryScheme::window));
  for (const char* c : {"q", "sz", "dn", "c_zz"}) CHECK(max_diff(e, w, c) < 1e-4);
}

TEST_CASE("doubling the memory window changes nothing") {
  const DickeParams p = params(0.3, 20, 0.1);
  const InitialState init{0.825 * M_PI, cplx(1e-3, 1e-3)};
  BmfOptions a = quiet(MemoryScheme::window), b = a;
  b.t_mem = -2.0 * std::log(a.eps_mem) / p.kappa;
  const TimeSeries x = bmf_run(p, init, 45.0, 0.05, a), y = bmf_run(p, init, 45.0, 0.05, b);
  for (const char* c : {"q", "p", "sz", "dn", "dx2", "dxp", "c_xx", "c_zz"}) CHECK(max_diff(x, y, c) < 1e-6);
}

TEST_CASE("finite N below two is rejected") {
  CHECK_THROWS_AS(BmfSystem(params(0.2, 1)), Error);
  CHECK_THROWS_AS(BmfSystem(params(0.2, kInf)), Error);
}
