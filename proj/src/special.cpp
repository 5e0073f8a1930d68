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

#include "dicke/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dicke/errors.hpp"

namespace dicke {

double upper_incomplete_gamma(double s, double z) {
  require(s > 0.0 && z > 0.0, ErrorKind::domain, "upper_incomplete_gamma needs s > 0, z > 0");
  const double eps = 1e-16;
  const double log_prefactor = s * std::log(z) - z;
  if (z > s + 1.0) {
    const double tiny = 1e-300;
    double b = z + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
      const double an = -i * (i - s);
      b += 2.0;
      d = an * d + b;
      if (std::abs(d) < tiny) d = tiny;
      c = b + an / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::abs(del - 1.0) < eps) return std::exp(log_prefactor) * h;
    }
    fail(ErrorKind::quadrature, "incomplete gamma continued fraction did not converge");
  }
  double term = 1.0 / s, sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= z / (s + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * eps) {
      const double lower = std::exp(log_prefactor) * sum;
      return std::tgamma(s) - lower;
    }
  }
  fail(ErrorKind::quadrature, "incomplete gamma series did not converge");
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  require(n >= 2 && y_.size() == n, ErrorKind::validation, "spline needs at least two matching points");
  for (std::size_t i = 1; i < n; ++i)
    require(x_[i] > x_[i - 1], ErrorKind::validation, "spline abscissae must increase");
  m_.assign(n, 0.0);
  if (n == 2) return;
  // Tridiagonal solve for second derivatives with natural end conditions.
  std::vector<double> c(n, 0.0), r(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
    c[i] = h1 / diag;
    r[i] = (6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0) - h0 * r[i - 1]) / diag;
  }
  for (std::size_t i = n - 2; i >= 1; --i) m_[i] = r[i] - c[i] * m_[i + 1];
}

double CubicSpline::operator()(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

}  // namespace dicke
