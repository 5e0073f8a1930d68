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

// Levenberg-Marquardt with a central-difference Jacobian.

#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace dicke {

struct LmOptions {
  int max_iterations = 400;
  double ftol = 1e-15;
  double xtol = 1e-13;
  double lambda0 = 1e-3;
  double fd_step = 1e-7;
};

struct LmResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
  double cost = 0.0;  // half the squared residual norm
  int iterations = 0;
  bool converged = false;

  // Parameter covariance scaled by the residual variance.
  Eigen::MatrixXd covariance() const {
    const Eigen::Index m = residual.size(), n = x.size();
    const double s2 = m > n ? 2.0 * cost / static_cast<double>(m - n) : 0.0;
    const Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
    return s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
  }
};

template <typename F>
Eigen::MatrixXd numeric_jacobian(F& f, const Eigen::VectorXd& x, Eigen::Index m, double step) {
  Eigen::MatrixXd jac(m, x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = step * std::max(1.0, std::abs(x(k)));
    xp(k) = x(k) + h;
    const Eigen::VectorXd fp = f(xp);
    xp(k) = x(k) - h;
    const Eigen::VectorXd fm = f(xp);
    xp(k) = x(k);
    jac.col(k) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

template <typename F>
LmResult levenberg_marquardt(F&& f, Eigen::VectorXd x0, const LmOptions& opt = {}) {
  LmResult res;
  res.x = std::move(x0);
  res.residual = f(res.x);
  res.cost = 0.5 * res.residual.squaredNorm();
  double lambda = opt.lambda0;
  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    res.jacobian = numeric_jacobian(f, res.x, res.residual.size(), opt.fd_step);
    const Eigen::MatrixXd jtj = res.jacobian.transpose() * res.jacobian;
    const Eigen::VectorXd grad = res.jacobian.transpose() * res.residual;
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      const Eigen::VectorXd trial = res.x + step;
      const Eigen::VectorXd r = f(trial);
      const double cost = 0.5 * r.squaredNorm();
      if (std::isfinite(cost) && cost < res.cost) {
        const double drop = res.cost - cost;
        const bool small_step = step.norm() <= opt.xtol * (res.x.norm() + opt.xtol);
        res.x = trial;
        res.residual = r;
        const bool small_drop = drop <= opt.ftol * std::max(res.cost, 1e-300);
        res.cost = cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        if (small_step || small_drop) {
          res.converged = true;
          res.jacobian = numeric_jacobian(f, res.x, res.residual.size(), opt.fd_step);
          return res;
        }
      } else {
        lambda *= 4.0;
      }
    }
    if (!improved) {
      res.converged = true;  // no descent direction left at machine precision
      return res;
    }
  }
  res.jacobian = numeric_jacobian(f, res.x, res.residual.size(), opt.fd_step);
  return res;
}

}  // namespace dicke
