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

// Run configuration, CSV/JSON artifacts, checkpoints and SVG plots.
//
// Configurations are flat `dotted.key = value` text (comments start with #)
// or the equivalent nested JSON object. Every key has a default; unknown
// keys are rejected.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicke/analysis.hpp"
#include "dicke/bmf.hpp"
#include "dicke/naive.hpp"

namespace dicke {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

class Config {
 public:
  Config();  // all defaults

  static Config parse_text(const std::string& text);
  static Config parse_json(const nlohmann::json& j);
  // Chooses the encoding from the first non-blank character.
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  // key=value
  void apply_override(const std::string& assignment);

  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;

  // Sorted key = value lines; parse_text(to_text()) reproduces the config.
  std::string to_text() const;
  nlohmann::json to_json() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // Typed views.
  DickeParams params() const;
  InitialState initial_state() const;
  BmfOptions bmf_options() const;
  RiseOptions rise_options() const;
  RelaxOptions relax_options() const;
  double dt() const { return number("integrator.dt"); }
  double t_max() const { return number("integrator.t_max"); }

  // Checks every physical precondition that applies to `command`.
  void validate(const std::string& command) const;

 private:
  std::map<std::string, std::string> values_;
};

// CSV with `# schema-version N` on line 1 and headers on line 2.
std::string to_csv(const TimeSeries& s);
TimeSeries parse_csv(const std::string& text);
void write_csv(const std::string& path, const TimeSeries& s);
TimeSeries read_csv(const std::string& path);

// Writes through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

nlohmann::json to_json(const FitReport& r);
nlohmann::json to_json(const ChiResult& r);
nlohmann::json to_json(const PseudomodeEmbedding& e);
PseudomodeEmbedding embedding_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const BmfState& s);
BmfState checkpoint_from_json(const nlohmann::json& j);

struct Manifest {
  std::string command;
  const Config* config = nullptr;
  double wall_time = 0.0;
  std::vector<std::string> artifacts;
  bool partial = false;
  std::string status = "ok";
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json to_json(const Manifest& m);

struct PlotLine {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool log_x = false, log_y = false;
  bool markers = false;
  double width = 640.0, height = 420.0;
};

std::string render_svg(const std::vector<PlotLine>& lines, const PlotSpec& spec);

}  // namespace dicke
