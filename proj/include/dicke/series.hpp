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

#include <algorithm>
#include <string>
#include <vector>

#include "dicke/errors.hpp"

namespace dicke {

// Column-named table of per-step records on a uniform time grid. Column 0
// is always "t".
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<std::string> columns) : columns_(std::move(columns)) {
    require(!columns_.empty() && columns_.front() == "t", ErrorKind::structural,
            "time series must start with a t column");
  }

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<double>& row(std::size_t k) const { return rows_[k]; }

  void append(std::vector<double> row) {
    require(row.size() == columns_.size(), ErrorKind::structural, "row width does not match columns");
    rows_.push_back(std::move(row));
  }

  std::size_t index(const std::string& name) const {
    auto it = std::find(columns_.begin(), columns_.end(), name);
    require(it != columns_.end(), ErrorKind::validation, "no column named " + name);
    return static_cast<std::size_t>(it - columns_.begin());
  }

  bool has(const std::string& name) const {
    return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
  }

  std::vector<double> column(const std::string& name) const {
    const std::size_t c = index(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[c]);
    return out;
  }

  double at(std::size_t k, const std::string& name) const { return rows_[k][index(name)]; }
  double back(const std::string& name) const { return rows_.back()[index(name)]; }

  // Set when a run stopped early on non-finite values.
  bool diverged = false;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace dicke
