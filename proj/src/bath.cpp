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

#include "dicke/bath.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "dicke/least_squares.hpp"
#include "dicke/quadrature.hpp"

namespace dicke {

namespace {

constexpr QuadOptions kBathQuad{1e-10, 1e-12, 40000};

double coth_half(double beta, double omega) {
  if (std::isinf(beta)) return 1.0;
  return 1.0 / std::tanh(0.5 * beta * omega);
}

double cutoff_u(const SpectralDensity& j, double omega) {
  return std::isinf(j.omega_c) ? 1.0 : std::exp(-omega / j.omega_c);
}

// J(w) coth(beta w / 2), exact at the tanh-form cancellation.
double j_coth(const SpectralDensity& j, double beta, double omega) {
  if (j.form == SpectralForm::tanh_lindblad && beta == j.beta_t)
    return j.gamma_phi / M_PI * cutoff_u(j, omega);
  return eval_spectral_density(j, omega) * coth_half(beta, omega);
}

double integration_scale(const SpectralDensity& j) {
  require(std::isfinite(j.omega_c), ErrorKind::domain,
          "bath integrals need a finite cutoff frequency omega_c");
  return 10.0 * j.omega_c;
}

// sin(x) - x without cancellation at small x.
double sin_minus_x(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
  }
  return std::sin(x) - x;
}

}  // namespace

SpectralDensity SpectralDensity::ohmic(double alpha, double omega_c, double s) {
  SpectralDensity j;
  j.form = SpectralForm::ohmic;
  j.alpha = alpha;
  j.omega_c = omega_c;
  j.s = s;
  j.validate();
  return j;
}

SpectralDensity SpectralDensity::tanh_lindblad(double gamma_phi, double beta_t, double omega_c) {
  SpectralDensity j;
  j.form = SpectralForm::tanh_lindblad;
  j.gamma_phi = gamma_phi;
  j.beta_t = beta_t;
  j.omega_c = omega_c;
  j.validate();
  return j;
}

bool SpectralDensity::is_zero() const {
  return form == SpectralForm::ohmic ? alpha == 0.0 : gamma_phi == 0.0;
}

void SpectralDensity::validate() const {
  require(omega_c > 0.0, ErrorKind::validation, "omega_c must be positive");
  if (form == SpectralForm::ohmic) {
    require(alpha >= 0.0, ErrorKind::validation, "alpha must be non-negative");
    require(s > 0.0, ErrorKind::validation, "ohmic exponent must be positive");
    require(std::isfinite(omega_c), ErrorKind::validation, "ohmic form needs a finite cutoff");
  } else {
    require(gamma_phi >= 0.0, ErrorKind::validation, "gamma_phi must be non-negative");
    require(beta_t > 0.0, ErrorKind::validation, "beta_t must be positive");
  }
}

double eval_spectral_density(const SpectralDensity& j, double omega) {
  require(omega >= 0.0, ErrorKind::domain, "spectral density needs omega >= 0");
  if (j.form == SpectralForm::ohmic) {
    if (omega == 0.0) return 0.0;
    return 0.5 * j.alpha * j.omega_c * std::pow(omega / j.omega_c, j.s) * std::exp(-omega / j.omega_c);
  }
  const double th = std::isinf(j.beta_t) ? 1.0 : std::tanh(0.5 * j.beta_t * omega);
  return j.gamma_phi / M_PI * th * cutoff_u(j, omega);
}

std::vector<double> uniform_grid(double t_max, int n) {
  require(n >= 2 && t_max > 0.0, ErrorKind::validation, "uniform grid needs n >= 2 and t_max > 0");
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = t_max * k / (n - 1);
  return t;
}

BathCorrelation bath_correlation(const SpectralDensity& j, double beta_t, const std::vector<double>& t_grid) {
  require(beta_t > 0.0, ErrorKind::domain, "beta_t must be positive");
  j.validate();
  BathCorrelation out;
  out.times = t_grid;
  out.beta_t = beta_t;
  out.values.reserve(t_grid.size());
  if (j.is_zero()) {
    out.values.assign(t_grid.size(), cplx(0.0));
    return out;
  }
  const double scale = integration_scale(j);
  for (double t : t_grid) {
    const double at = std::abs(t);
    auto f = [&](double w) {
      return cplx(j_coth(j, beta_t, w) * std::cos(w * at), -eval_spectral_density(j, w) * std::sin(w * at));
    };
    const cplx v = checked(integrate_to_infinity(f, 0.0, scale, kBathQuad), "bath_correlation").value;
    out.values.push_back(t < 0.0 ? std::conj(v) : v);
  }
  return out;
}

EtaCoefficients eta_coefficients(const SpectralDensity& j, double beta_t, double dt, int k_max) {
  require(dt > 0.0 && k_max >= 1, ErrorKind::domain, "eta_coefficients needs dt > 0 and K >= 1");
  j.validate();
  EtaCoefficients out;
  out.dt = dt;
  if (j.is_zero()) {
    out.eta.assign(k_max + 1, cplx(0.0));
    return out;
  }
  const double scale = integration_scale(j);
  for (int k = 0; k <= k_max; ++k) {
    auto fre = [&](double w) {
      const double s = std::sin(0.5 * w * dt) / w;
      return 2.0 * j_coth(j, beta_t, w) * s * s * std::cos(k * w * dt);
    };
    const double re = checked(integrate_to_infinity(fre, 0.0, scale, kBathQuad), "eta (real part)").value;
    double im = 0.0;
    if (k == 0) {
      auto fim = [&](double w) { return eval_spectral_density(j, w) / (w * w) * sin_minus_x(w * dt); };
      im = checked(integrate_to_infinity(fim, 0.0, scale, kBathQuad), "eta (imaginary part)").value;
    } else {
      auto fim = [&](double w) {
        const double s = std::sin(0.5 * w * dt) / w;
        return -2.0 * eval_spectral_density(j, w) * s * s * std::sin(k * w * dt);
      };
      im = checked(integrate_to_infinity(fim, 0.0, scale, kBathQuad), "eta (imaginary part)").value;
    }
    out.eta.emplace_back(re, im);
  }
  return out;
}

double dephasing_exponent_from_eta(const EtaCoefficients& eta, int n) {
  require(n >= 0 && n <= static_cast<int>(eta.eta.size()), ErrorKind::domain,
          "dephasing exponent needs n <= K + 1");
  if (n == 0) return 0.0;
  double acc = n * eta.eta[0].real();
  for (int k = 1; k < n; ++k) acc += 2.0 * (n - k) * eta.eta[k].real();
  return 4.0 * acc;
}

ReorganizationEnergy reorganization_energy(const SpectralDensity& j, double omega_max) {
  require(omega_max > 0.0, ErrorKind::domain, "omega_max must be positive");
  j.validate();
  ReorganizationEnergy out;
  if (j.is_zero()) return out;
  auto f = [&](double w) { return eval_spectral_density(j, w) / w; };
  out.value = checked(integrate(f, 0.0, omega_max, kBathQuad), "reorganization energy").value;
  // Probe growth over doublings; a convergent integral has shrinking increments.
  double lo = omega_max;
  for (int k = 0; k < 6; ++k) {
    out.increments.push_back(checked(integrate(f, lo, 2.0 * lo, kBathQuad), "reorganization energy").value);
    lo *= 2.0;
  }
  const double first = out.increments.front(), last = out.increments.back();
  out.divergent = last > 1e-12 * std::max(1.0, std::abs(out.value)) && last > 0.5 * first;
  return out;
}

double dephasing_decay_oracle(const SpectralDensity& j, double beta_t, double t) {
  require(beta_t > 0.0, ErrorKind::domain, "beta_t must be positive");
  j.validate();
  if (j.is_zero() || t == 0.0) return 1.0;
  auto f = [&](double w) {
    const double s = std::sin(0.5 * w * t) / w;
    return 8.0 * j_coth(j, beta_t, w) * s * s;
  };
  const double gamma = checked(integrate_to_infinity(f, 0.0, integration_scale(j), kBathQuad),
                               "dephasing_decay_oracle").value;
  return std::exp(-gamma);
}

cplx ExponentialFit::operator()(double t) const {
  cplx acc = 0.0;
  for (const auto& term : terms) acc += term.c * std::exp(-term.nu * t);
  return acc;
}

namespace {

struct FitProblem {
  const BathCorrelation& data;
  const FitOptions& opt;
  int n;
  double c0;
  cplx total;  // target for sum c_j under the real-total constraint

  int size() const { return opt.real_total_weight ? 4 * n - 2 : 4 * n; }

  std::vector<ExpTerm> unpack(const Eigen::VectorXd& x) const {
    std::vector<ExpTerm> terms(n);
    int p = 0;
    cplx sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (opt.real_total_weight && j == n - 1) {
        terms[j].c = total - sum;
      } else {
        terms[j].c = c0 * cplx(x(p), x(p + 1));
        p += 2;
        sum += terms[j].c;
      }
      terms[j].nu = cplx(std::exp(x(p)), x(p + 1));
      p += 2;
    }
    return terms;
  }

  Eigen::VectorXd pack(const std::vector<ExpTerm>& terms) const {
    Eigen::VectorXd x(size());
    int p = 0;
    for (int j = 0; j < n; ++j) {
      if (!(opt.real_total_weight && j == n - 1)) {
        x(p++) = terms[j].c.real() / c0;
        x(p++) = terms[j].c.imag() / c0;
      }
      x(p++) = std::log(std::max(terms[j].nu.real(), 1e-6));
      x(p++) = terms[j].nu.imag();
    }
    return x;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    const auto terms = unpack(x);
    const std::size_t m = data.times.size();
    const bool deph = opt.dephasing_weight > 0.0;
    Eigen::VectorXd r(2 * m + (deph ? m : 0));
    for (std::size_t k = 0; k < m; ++k) {
      const double t = data.times[k];
      cplx fit = 0.0;
      double gamma = 0.0;
      for (const auto& term : terms) {
        const cplx e = std::exp(-term.nu * t);
        fit += term.c * e;
        if (deph) gamma += 4.0 * (term.c * (e - 1.0 + term.nu * t) / (term.nu * term.nu)).real();
      }
      const cplx d = (fit - data.values[k]) / c0;
      r(2 * k) = d.real();
      r(2 * k + 1) = d.imag();
      if (deph) r(2 * m + k) = opt.dephasing_weight * (gamma - opt.dephasing_target[k]);
    }
    return r;
  }
};

// Matrix-pencil estimate of the exponents, amplitudes by linear least squares.
std::vector<ExpTerm> matrix_pencil(const BathCorrelation& c, int n) {
  const Index m = static_cast<Index>(c.times.size());
  const double dt = c.times[1] - c.times[0];
  const Index l = m / 2;
  CMatrix y(m - l, l + 1);
  for (Index i = 0; i < m - l; ++i)
    for (Index k = 0; k <= l; ++k) y(i, k) = c.values[i + k];
  Eigen::BDCSVD<CMatrix> svd(y, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  require(n <= s.size() && s(n - 1) > 1e-13 * s(0), ErrorKind::fit,
          "rank-deficient data for " + std::to_string(n) + " terms; use fewer terms");
  // Rows of y are combinations of (z^k)_k, which span conj(V).
  const CMatrix v = svd.matrixV().leftCols(n).conjugate();
  const CMatrix v1 = v.topRows(l), v2 = v.bottomRows(l);
  const CMatrix pencil = v1.completeOrthogonalDecomposition().solve(v2);
  Eigen::ComplexEigenSolver<CMatrix> es(pencil);
  std::vector<ExpTerm> terms(n);
  CMatrix basis(m, n);
  for (int j = 0; j < n; ++j) {
    cplx nu = -std::log(es.eigenvalues()(j)) / dt;
    if (nu.real() <= 0.0) nu = cplx(1e-3 / dt, nu.imag());
    terms[j].nu = nu;
    for (Index k = 0; k < m; ++k) basis(k, j) = std::exp(-nu * c.times[k]);
  }
  CVector rhs(m);
  for (Index k = 0; k < m; ++k) rhs(k) = c.values[k];
  const CVector amp = basis.completeOrthogonalDecomposition().solve(rhs);
  for (int j = 0; j < n; ++j) terms[j].c = amp(j);
  return terms;
}

}  // namespace

ExponentialFit fit_exponentials(const BathCorrelation& c, int n_terms, const FitOptions& opt) {
  require(n_terms >= 1, ErrorKind::validation, "fit_exponentials needs n_terms >= 1");
  const std::size_t m = c.times.size();
  require(m >= static_cast<std::size_t>(4 * n_terms) && m == c.values.size(), ErrorKind::validation,
          "correlation grid too short for the requested number of terms");
  require(c.times.front() == 0.0, ErrorKind::validation, "fit grid must start at t = 0");
  for (std::size_t k = 2; k < m; ++k)
    require(std::abs((c.times[k] - c.times[k - 1]) - (c.times[1] - c.times[0])) < 1e-9 * c.times.back(),
            ErrorKind::validation, "fit grid must be uniform");
  if (opt.dephasing_weight > 0.0)
    require(opt.dephasing_target.size() == m, ErrorKind::validation, "dephasing target must match the grid");

  const double c0 = std::abs(c.values.front());
  require(c0 > 0.0, ErrorKind::fit, "correlation vanishes at t = 0; nothing to fit");
  FitProblem prob{c, opt, n_terms, c0, cplx(c.values.front().real(), 0.0)};

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(prob.pack(matrix_pencil(c, n_terms)));
  std::mt19937_64 rng(opt.seed);
  const double rate_scale = 20.0 / c.times.back();
  std::uniform_real_distribution<double> amp(-0.7, 0.7), rate(0.05, 3.0), freq(0.0, 3.0);
  for (int r = 0; r < opt.restarts; ++r) {
    std::vector<ExpTerm> terms(n_terms);
    for (auto& t : terms) {
      t.c = c0 * cplx(amp(rng), amp(rng));
      t.nu = rate_scale * cplx(rate(rng), freq(rng));
    }
    starts.push_back(prob.pack(terms));
  }

  LmOptions lm;
  lm.max_iterations = 300;
  auto f = [&](const Eigen::VectorXd& x) { return prob.residual(x); };
  LmResult best;
  best.cost = kInf;
  for (const auto& x0 : starts) {
    LmResult r = levenberg_marquardt(f, x0, lm);
    if (std::isfinite(r.cost) && r.cost < best.cost) best = std::move(r);
  }
  require(std::isfinite(best.cost), ErrorKind::fit, "exponential fit failed to converge");

  ExponentialFit out;
  out.terms = prob.unpack(best.x);
  std::sort(out.terms.begin(), out.terms.end(),
            [](const ExpTerm& a, const ExpTerm& b) { return std::abs(a.c) > std::abs(b.c); });
  out.c0 = c0;
  out.t_max = c.times.back();
  for (std::size_t k = 0; k < m; ++k)
    out.max_residual = std::max(out.max_residual, std::abs(out(c.times[k]) - c.values[k]));
  return out;
}

cplx PseudomodeEmbedding::correlation(double t) const {
  if (empty()) return 0.0;
  const CMatrix a = cplx(0, 1) * hamiltonian + 0.5 * damping;
  const CMatrix prop = (-a * t).exp();
  return (coupling.transpose() * prop * coupling.conjugate())(0, 0);
}

PseudomodeEmbedding build_pseudomode_embedding(const ExponentialFit& fit, int fock_cutoff,
                                               double residual_threshold) {
  require(fock_cutoff >= 2, ErrorKind::validation, "Fock cutoff must be at least 2");
  PseudomodeEmbedding emb;
  emb.fock_cutoff = fock_cutoff;
  emb.fit = fit;
  if (fit.terms.empty()) return emb;
  require(fit.relative_residual() <= residual_threshold, ErrorKind::fit,
          "fit residual " + std::to_string(fit.relative_residual()) + " above threshold " +
              std::to_string(residual_threshold));

  const int n = static_cast<int>(fit.terms.size());
  cplx total = 0.0;
  for (const auto& t : fit.terms) {
    require(t.nu.real() > 0.0, ErrorKind::fit, "fit term does not decay");
    total += t.c;
  }
  require(std::abs(total.imag()) <= 1e-8 * std::abs(total) && total.real() > 0.0, ErrorKind::fit,
          "embedding needs a real positive total weight sum_j c_j");
  const double s = total.real();

  // A = V diag(nu) V^{-1} with first row of V all ones and V v = e_1, v = c / s,
  // so that s [exp(-A t)]_{11} = sum_j c_j exp(-nu_j t).
  CVector v(n), nu(n);
  for (int j = 0; j < n; ++j) {
    v(j) = fit.terms[j].c / s;
    nu(j) = fit.terms[j].nu;
  }
  CMatrix vmat(n, n);
  vmat.row(0).setOnes();
  if (n > 1) {
    // Orthonormal complement of conj(v): rows u^T with u^T v = 0.
    Eigen::HouseholderQR<CMatrix> qr(v.conjugate());
    const CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    for (int k = 1; k < n; ++k) vmat.row(k) = q.col(k).transpose();
  }
  const CMatrix a = vmat * nu.asDiagonal() * vmat.inverse();
  emb.hamiltonian = (a - a.adjoint()) / cplx(0, 2);
  emb.damping = a + a.adjoint();
  emb.hamiltonian = 0.5 * (emb.hamiltonian + emb.hamiltonian.adjoint()).eval();
  emb.damping = 0.5 * (emb.damping + emb.damping.adjoint()).eval();
  emb.coupling = CVector::Zero(n);
  emb.coupling(0) = std::sqrt(s);
  for (int k = 0; k < n; ++k)
    emb.modes.push_back({emb.coupling(k), emb.hamiltonian(k, k).real(), emb.damping(k, k).real()});
  return emb;
}

PseudomodeEmbedding embed_bath(const SpectralDensity& j, double beta_t, const BathFitSettings& settings,
                               double kappa) {
  j.validate();
  PseudomodeEmbedding empty;
  empty.fock_cutoff = settings.fock_cutoff;
  if (j.is_zero()) return empty;
  require(settings.n_terms >= 1 && settings.max_terms >= settings.n_terms, ErrorKind::validation,
          "bath fit needs 1 <= n_terms <= max_terms");
  double window = settings.window;
  if (window <= 0.0) window = std::max(20.0 / j.omega_c, kappa > 0.0 ? 5.0 / kappa : 0.0);
  const auto grid = uniform_grid(window, settings.samples);
  const BathCorrelation corr = bath_correlation(j, beta_t, grid);

  FitOptions opt;
  opt.real_total_weight = true;
  opt.restarts = settings.restarts;
  opt.seed = settings.seed;
  if (settings.dephasing_weight > 0.0) {
    opt.dephasing_weight = settings.dephasing_weight;
    for (double t : grid) opt.dephasing_target.push_back(-std::log(dephasing_decay_oracle(j, beta_t, t)));
  }
  ExponentialFit fit;
  for (int n = settings.n_terms; n <= settings.max_terms; ++n) {
    fit = fit_exponentials(corr, n, opt);
    if (fit.relative_residual() <= settings.residual_threshold) break;
  }
  return build_pseudomode_embedding(fit, settings.fock_cutoff, settings.residual_threshold);
}

}  // namespace dicke
