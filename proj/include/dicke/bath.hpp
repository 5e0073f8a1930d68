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

// Local dephasing baths: spectral densities, correlation functions,
// influence-functional coefficients and pseudomode embeddings.
//
// The spin couples to its bath through sigma^z (Pauli normalization). With
// C(t) = int J(w)[coth(beta w / 2) cos(w t) - i sin(w t)] dw the exact
// coherence envelope at zero drive is exp(-4 int J (1 - cos w t) coth / w^2).

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dicke/hilbert.hpp"

namespace dicke {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SpectralForm { ohmic, tanh_lindblad };

struct SpectralDensity {
  SpectralForm form = SpectralForm::ohmic;
  double alpha = 0.0;       // ohmic coupling
  double s = 1.0;           // ohmic exponent
  double omega_c = 1.0;     // cutoff; infinite means u(x) = 1 (tanh form only)
  double gamma_phi = 0.0;   // tanh form rate
  double beta_t = kInf;     // tanh form inverse temperature

  static SpectralDensity ohmic(double alpha, double omega_c, double s = 1.0);
  static SpectralDensity tanh_lindblad(double gamma_phi, double beta_t, double omega_c = kInf);

  bool is_zero() const;
  void validate() const;
};

double eval_spectral_density(const SpectralDensity& j, double omega);

struct BathCorrelation {
  std::vector<double> times;
  std::vector<cplx> values;
  double beta_t = kInf;
};

BathCorrelation bath_correlation(const SpectralDensity& j, double beta_t, const std::vector<double>& t_grid);

// Uniform grid t_k = k * dt, k = 0..n-1.
std::vector<double> uniform_grid(double t_max, int n);

struct EtaCoefficients {
  double dt = 0.0;
  std::vector<cplx> eta;
};

EtaCoefficients eta_coefficients(const SpectralDensity& j, double beta_t, double dt, int k_max);

// 4 [n Re eta_0 + 2 sum_{k=1}^{n-1} (n - k) Re eta_k], the discretized
// dephasing exponent at t = n dt.
double dephasing_exponent_from_eta(const EtaCoefficients& eta, int n);

struct ReorganizationEnergy {
  double value = 0.0;
  bool divergent = false;
  std::vector<double> increments;  // growth per doubling of omega_max
};

// int_0^{omega_max} J(w) / w dw with the cutoff carried by J, plus a
// divergence probe over successive doublings of omega_max.
ReorganizationEnergy reorganization_energy(const SpectralDensity& j, double omega_max);

double dephasing_decay_oracle(const SpectralDensity& j, double beta_t, double t);

struct ExpTerm {
  cplx c;
  cplx nu;
};

struct ExponentialFit {
  std::vector<ExpTerm> terms;
  double max_residual = 0.0;  // max |fit - C| on the window
  double c0 = 0.0;            // |C(0)|
  double t_max = 0.0;

  cplx operator()(double t) const;
  double relative_residual() const { return c0 > 0.0 ? max_residual / c0 : max_residual; }
};

struct FitOptions {
  // Weight of the dephasing-exponent rows; the exponent target must then be
  // supplied on the correlation grid.
  double dephasing_weight = 0.0;
  std::vector<double> dephasing_target;
  // Constrain sum_j c_j to the real value C(0).
  bool real_total_weight = false;
  int restarts = 16;
  std::uint64_t seed = 0x5eedULL;
};

ExponentialFit fit_exponentials(const BathCorrelation& c, int n_terms, const FitOptions& opt = {});

struct PseudoMode {
  cplx coupling;
  double frequency = 0.0;
  double damping = 0.0;
};

// Mode network with b_k -> -(i H + Gamma / 2) b_k dynamics and bath operator
// sum_k (g_k b_k + conj(g_k) b_k^dag). Gamma may be indefinite.
struct PseudomodeEmbedding {
  std::vector<PseudoMode> modes;
  CMatrix hamiltonian;
  CMatrix damping;
  CVector coupling;
  int fock_cutoff = 2;
  ExponentialFit fit;

  bool empty() const { return modes.empty(); }
  int size() const { return static_cast<int>(modes.size()); }
  // Emitted correlation g^T exp(-(i H + Gamma / 2) t) conj(g).
  cplx correlation(double t) const;
};

PseudomodeEmbedding build_pseudomode_embedding(const ExponentialFit& fit, int fock_cutoff,
                                               double residual_threshold);

struct BathFitSettings {
  int n_terms = 3;
  int max_terms = 6;
  int fock_cutoff = 3;
  double residual_threshold = 0.03;  // relative to |C(0)|
  double dephasing_weight = 1.0;
  double window = 0.0;  // 0 selects max(20 / omega_c, 5 / kappa)
  int samples = 401;
  int restarts = 16;
  std::uint64_t seed = 0x5eedULL;
};

// Correlation, fit with escalation, and embedding in one call. The zero
// bath gives an empty embedding.
PseudomodeEmbedding embed_bath(const SpectralDensity& j, double beta_t, const BathFitSettings& settings,
                               double kappa);

}  // namespace dicke
