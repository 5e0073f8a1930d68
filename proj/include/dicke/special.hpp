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

#pragma once

#include <vector>

namespace dicke {

// Upper incomplete gamma Gamma(s, z) for s > 0, z > 0: Legendre continued
// fraction (modified Lentz) for z > s + 1, power series otherwise.
double upper_incomplete_gamma(double s, double z);

// Natural cubic spline through (x_k, y_k) with strictly increasing x.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace dicke
