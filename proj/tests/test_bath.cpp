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

#include <cmath>

#include "dicke/bath.hpp"
#include "dicke/meanfield.hpp"

using namespace dicke;

namespace {

const SpectralDensity kOhmic = SpectralDensity::ohmic(0.3, 1.0);

cplx ohmic_zero_t(double alpha, double wc, double t) {
  const cplx d(1.0, wc * t);
  return 0.5 * alpha * wc * wc / (d * d);
}

// Max |<sx + i sy>| deviation at g = 0 between two Fock cutoffs.
double cutoff_change(int d1, int d2) {
  DickeParams p;
  p.g = 0.0;
  p.n_sites = kInf;
  p.bath.backend = BathBackend::pseudomode;
  p.bath.spectral = kOhmic;
  p.bath.fit.n_terms = p.bath.fit.max_terms = 1;
  p.bath.fit.residual_threshold = 1.0;
  p.bath.fit.restarts = 4;
  p.bath.fit.fock_cutoff = d1;
  resolve_bath(p);
  DickeParams q = p;
  q.bath.embedding.fock_cutoff = d2;
  InitialState init;
  init.theta = M_PI / 2;
  RunOptions ro;
  ro.track_min_eigenvalue = false;
  const TimeSeries a = mf_run(p, init, 20.0, 0.02, ro), b = mf_run(q, init, 20.0, 0.02, ro);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a.at(k, "sx") - b.at(k, "sx")));
  return worst;
}

}  // namespace

TEST_CASE("ohmic spectral density values") {
  CHECK(eval_spectral_density(kOhmic, 0.0) == 0.0);
  CHECK(eval_spectral_density(kOhmic, 1.0) == doctest::Approx(0.15 * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("tanh form saturates at gamma over pi") {
  const SpectralDensity j = SpectralDensity::tanh_lindblad(0.05, 1.0);
  CHECK(eval_spectral_density(j, 1e3) == doctest::Approx(0.05 / M_PI).epsilon(1e-12));
}

TEST_CASE("zero temperature ohmic correlation matches its closed form") {
  const auto grid = uniform_grid(5.0, 11);
  const BathCorrelation c = bath_correlation(kOhmic, kInf, grid);
  CHECK(c.values.front().real() == doctest::Approx(0.15).epsilon(1e-9));
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(std::abs(c.values[k] - ohmic_zero_t(0.3, 1.0, grid[k])) < 1e-9);
}

TEST_CASE("correlation is Hermitian in time") {
  const BathCorrelation c = bath_correlation(kOhmic, 2.0, {-1.5, -0.5, 0.5, 1.5});
  CHECK(std::abs(c.values[0] - std::conj(c.values[3])) < 1e-14);
  CHECK(std::abs(c.values[1] - std::conj(c.values[2])) < 1e-14);
}

TEST_CASE("large beta approaches zero temperature") {
  const auto grid = uniform_grid(5.0, 11);
  const BathCorrelation cold = bath_correlation(kOhmic, kInf, grid), warm = bath_correlation(kOhmic, 1e3, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(std::abs(cold.values[k] - warm.values[k]) < 1e-4 * std::abs(cold.values[k]));
}

TEST_CASE("eta coefficients in the Markov limit") {
  const double gamma = 0.05, dt = 0.1, wc = 1e5;
  const SpectralDensity j = SpectralDensity::tanh_lindblad(gamma, 1e-3 / wc, wc);
  const EtaCoefficients eta = eta_coefficients(j, 1e-3 / wc, dt, 2);
  CHECK(std::abs(eta.eta[1].real() / eta.eta[0].real()) < 1e-3);
  CHECK(eta.eta[0].real() == doctest::Approx(gamma * dt / 2).epsilon(1e-2));
}

TEST_CASE("ohmic eta coefficients are non-Markovian") {
  const EtaCoefficients eta = eta_coefficients(kOhmic, kInf, 0.1, 2);
  CHECK(std::abs(eta.eta[1].real()) > 1e-4 * std::abs(eta.eta[0].real()));
}

TEST_CASE("eta sums reproduce the exact dephasing exponent") {
  const double dt = 0.05;
  const EtaCoefficients eta = eta_coefficients(kOhmic, kInf, dt, 100);
  for (int n : {10, 40, 100}) {
    const double exact = -std::log(dephasing_decay_oracle(kOhmic, kInf, n * dt));
    CHECK(dephasing_exponent_from_eta(eta, n) == doctest::Approx(exact).epsilon(0.02));
  }
}

TEST_CASE("reorganization energy") {
  CHECK(reorganization_energy(SpectralDensity::ohmic(0.0, 1.0), 10.0).value == 0.0);
  const auto conv = reorganization_energy(kOhmic, 50.0);
  CHECK(conv.value == doctest::Approx(0.15).epsilon(1e-6));
  CHECK_FALSE(conv.divergent);
  const SpectralDensity flat = SpectralDensity::tanh_lindblad(0.05, 1.0);
  double last = 0.0;
  for (double wmax : {10.0, 100.0, 1000.0}) {
    const auto r = reorganization_energy(flat, wmax);
    CHECK(r.value > last);
    CHECK(r.divergent);
    last = r.value;
  }
}

TEST_CASE("hot tanh bath approaches the Lindblad pattern monotonically") {
  const double wc = 1e3, dt = 0.1;
  double last = kInf;
  for (double bw : {1.0, 0.1, 0.01, 0.001}) {
    const EtaCoefficients eta = eta_coefficients(SpectralDensity::tanh_lindblad(0.05, bw / wc, wc), bw / wc, dt, 2);
    const double ratio = std::abs(eta.eta[1].real() / eta.eta[0].real());
    CHECK(ratio <= last * (1.0 + 1e-9));
    last = ratio;
  }
}

TEST_CASE("coherence decay oracle") {
  CHECK(dephasing_decay_oracle(kOhmic, kInf, 1.0) == doctest::Approx(std::pow(2.0, -0.3)).epsilon(1e-9));
  CHECK(dephasing_decay_oracle(kOhmic, kInf, 0.0) == 1.0);
  CHECK(dephasing_decay_oracle(SpectralDensity::ohmic(0.0, 1.0), kInf, 7.0) == 1.0);
  for (double t : {0.5, 3.0, 12.0})
    CHECK(dephasing_decay_oracle(kOhmic, kInf, t) == doctest::Approx(std::pow(1.0 + t * t, -0.3)).epsilon(1e-8));
}

TEST_CASE("single exponential is recovered exactly") {
  const cplx c(0.4, -0.1), nu(0.7, 1.3);
  BathCorrelation corr;
  corr.times = uniform_grid(10.0, 201);
  for (double t : corr.times) corr.values.push_back(c * std::exp(-nu * t));
  const ExponentialFit fit = fit_exponentials(corr, 1);
  REQUIRE(fit.terms.size() == 1);
  CHECK(std::abs(fit.terms[0].c - c) < 1e-8);
  CHECK(std::abs(fit.terms[0].nu - nu) < 1e-8);
}

TEST_CASE("zero terms is rejected") {
  BathCorrelation corr;
  corr.times = uniform_grid(10.0, 21);
  corr.values.assign(21, cplx(1.0));
  CHECK_THROWS_AS(fit_exponentials(corr, 0), Error);
}

TEST_CASE("three term ohmic fit reaches 1e-3 of C(0)" * doctest::may_fail()) {
  const BathCorrelation corr = bath_correlation(kOhmic, kInf, uniform_grid(20.0, 401));
  const ExponentialFit fit = fit_exponentials(corr, 3);
  CHECK(fit.relative_residual() < 1e-3);
}

TEST_CASE("embedding reproduces the fitted correlation") {
  const BathCorrelation corr = bath_correlation(kOhmic, kInf, uniform_grid(20.0, 401));
  FitOptions opt;
  opt.real_total_weight = true;
  const ExponentialFit fit = fit_exponentials(corr, 2, opt);
  const PseudomodeEmbedding emb = build_pseudomode_embedding(fit, 3, 1.0);
  CHECK(emb.size() == 2);
  for (double t : {0.0, 1.0, 4.0, 15.0}) CHECK(std::abs(emb.correlation(t) - fit(t)) < 1e-10);
}

TEST_CASE("zero bath embeds to no modes") {
  const PseudomodeEmbedding emb = embed_bath(SpectralDensity::ohmic(0.0, 1.0), kInf, {}, 1.0);
  CHECK(emb.empty());
  DickeParams p;
  p.bath.backend = BathBackend::pseudomode;
  p.bath.spectral = SpectralDensity::ohmic(0.0, 1.0);
  resolve_bath(p);
  CHECK(build_site_model(p).dim == 2);
}

TEST_CASE("embedding converges in the Fock cutoff") {
  CHECK(cutoff_change(5, 10) < 1e-4);
}
