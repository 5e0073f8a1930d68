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

// Adaptive Gauss-Kronrod (7/15) quadrature for real or complex integrands.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include "dicke/errors.hpp"

namespace dicke {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_intervals = 20000;
};

template <typename T>
struct QuadResult {
  T value{};
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(std::complex<double> x) { return std::abs(x); }

template <typename T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T, typename F>
Panel<T> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const T fc = f(c);
  T k = fc * kWgk[7];
  T g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const T f1 = f(c - dx), f2 = f(c + dx);
    k += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) g += (f1 + f2) * kWg[j / 2];
  }
  return {a, b, k * h, magnitude((k - g) * h)};
}

}  // namespace detail

// Globally adaptive bisection on [a, b].
template <typename F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  using T = std::decay_t<decltype(f(a))>;
  QuadResult<T> res;
  if (a == b) return res;
  std::priority_queue<detail::Panel<T>> heap;
  heap.push(detail::gk15<T>(f, a, b));
  res.evaluations = 15;
  T total = heap.top().value;
  double err = heap.top().error;
  int intervals = 1;
  while (err > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total))) {
    if (intervals >= opt.max_intervals) {
      res.converged = false;
      break;
    }
    detail::Panel<T> p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      res.converged = false;
      heap.push(p);
      break;
    }
    auto l = detail::gk15<T>(f, p.a, m);
    auto r = detail::gk15<T>(f, m, p.b);
    res.evaluations += 30;
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
    ++intervals;
  }
  // Resum to shed accumulated cancellation in the running totals.
  total = T{};
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  res.value = total;
  res.error = err;
  return res;
}

// [a, inf) as [a, a + scale] followed by doubling panels until a panel
// contributes less than the absolute tolerance twice in a row.
template <typename F>
auto integrate_to_infinity(F&& f, double a, double scale, const QuadOptions& opt = {}) {
  auto res = integrate(f, a, a + scale, opt);
  double lo = a + scale, width = scale;
  int quiet = 0;
  for (int k = 0; k < 200 && quiet < 2; ++k) {
    auto p = integrate(f, lo, lo + width, opt);
    res.value += p.value;
    res.error += p.error;
    res.evaluations += p.evaluations;
    res.converged = res.converged && p.converged;
    quiet = detail::magnitude(p.value) < opt.abs_tol ? quiet + 1 : 0;
    lo += width;
    width *= 2.0;
  }
  if (quiet < 2) res.converged = false;
  return res;
}

// Throws a quadrature error with the residual if `r` did not converge.
template <typename T>
const QuadResult<T>& checked(const QuadResult<T>& r, const char* what) {
  if (!r.converged)
    fail(ErrorKind::quadrature, std::string(what) + " did not converge (residual " + std::to_string(r.error) + ")");
  return r;
}

}  // namespace dicke
