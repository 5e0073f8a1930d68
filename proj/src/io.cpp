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

#include "dicke/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace dicke {

namespace {

using nlohmann::json;

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"model.omega", "1"},
      {"model.kappa", "1"},
      {"model.omega_z", "0.025"},
      {"model.g", "0"},
      {"model.n_sites", "10"},
      {"model.dimension_budget", "4096"},
      {"bath.backend", "none"},
      {"bath.gamma_phi", "0"},
      {"bath.form", "ohmic"},
      {"bath.alpha", "0.3"},
      {"bath.s", "1"},
      {"bath.omega_c", "1"},
      {"bath.beta_t", "inf"},
      {"bath.fit.n_terms", "3"},
      {"bath.fit.max_terms", "6"},
      {"bath.fit.fock_cutoff", "3"},
      {"bath.fit.residual_threshold", "0.03"},
      {"bath.fit.dephasing_weight", "1"},
      {"bath.fit.window", "0"},
      {"bath.fit.samples", "401"},
      {"bath.fit.restarts", "16"},
      {"bath.fit.seed", "auto"},
      {"init.theta", "3.141592653589793"},
      {"init.a0_re", "0"},
      {"init.a0_im", "0"},
      {"integrator.dt", "0.01"},
      {"integrator.t_max", "100"},
      {"integrator.t_mem", "0"},
      {"integrator.eps_mem", "1e-8"},
      {"integrator.record_every", "1"},
      {"integrator.scheme", "exponential"},
      {"sweep.g", ""},
      {"sweep.n", ""},
      {"sweep.theta", ""},
      {"analysis.g_c_hint", "0"},
      {"analysis.critical_field", "re_a"},
      {"analysis.window_factor", "1.2"},
      {"analysis.rise.column", "n_total"},
      {"analysis.rise.level", "0.5"},
      {"analysis.rise.plateau", "peak"},
      {"analysis.rise.window", "time"},
      {"analysis.rise.gamma_lo", "10"},
      {"analysis.rise.gamma_hi", "50"},
      {"analysis.rise.mf_a0", "1e-3"},
      {"analysis.rise.mf_lo", "40"},
      {"analysis.rise.mf_hi", "100"},
      {"analysis.relax.column", "sz"},
      {"analysis.relax.t_lo", "0"},
      {"analysis.relax.t_hi", "0"},
      {"analysis.t_star", "0"},
      {"analysis.inputs", ""},
      {"output.dir", ""},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double x = std::stod(t, &used);
    if (used == t.size()) return x;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::validation, "config key " + key + " expects a number, got '" + v + "'");
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void flatten(const json& j, const std::string& prefix, Config& c) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const json& v = it.value();
    if (v.is_object()) {
      flatten(v, key, c);
    } else if (v.is_array()) {
      std::string s;
      for (const auto& e : v) {
        if (!s.empty()) s += ",";
        s += e.is_string() ? e.get<std::string>() : (e.is_number() ? format_double(e.get<double>()) : e.dump());
      }
      c.set(key, s);
    } else if (v.is_string()) {
      c.set(key, v.get<std::string>());
    } else if (v.is_number()) {
      c.set(key, format_double(v.get<double>()));
    } else if (v.is_boolean()) {
      c.set(key, v.get<bool>() ? "true" : "false");
    } else {
      fail(ErrorKind::validation, "config key " + key + " has an unsupported value");
    }
  }
}

json matrix_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from(const json& j) {
  const Index rows = j.at("rows").get<Index>(), cols = j.at("cols").get<Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  require(static_cast<Index>(re.size()) == rows * cols && static_cast<Index>(im.size()) == rows * cols,
          ErrorKind::io, "matrix record has the wrong number of entries");
  CMatrix m(rows, cols);
  Index k = 0;
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r, ++k) m(r, c) = cplx(re[k].get<double>(), im[k].get<double>());
  return m;
}

json vector_json(const CVector& v) { return matrix_json(CMatrix(v)); }

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }
cplx cplx_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json number_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

json moments_json(const PhotonMoments& m) {
  return {{"q", m.q}, {"p", m.p}, {"dn", m.dn}, {"dx2", m.dx2}, {"dxp", m.dxp}};
}

PhotonMoments moments_from(const json& j) {
  return {j.at("q").get<double>(), j.at("p").get<double>(), j.at("dn").get<double>(), j.at("dx2").get<double>(),
          j.at("dxp").get<double>()};
}

}  // namespace

Config::Config() : values_(defaults()) {}

void Config::set(const std::string& key, const std::string& value) {
  require(defaults().count(key) > 0, ErrorKind::validation, "unknown config key " + key);
  values_[key] = trim(value);
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos, ErrorKind::validation, "override must be key=value: " + assignment);
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

Config Config::parse_text(const std::string& text) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    require(line.find('=') != std::string::npos, ErrorKind::validation,
            "config line " + std::to_string(lineno) + " is not key = value");
    c.apply_override(line);
  }
  return c;
}

Config Config::parse_json(const json& j) {
  require(j.is_object(), ErrorKind::validation, "JSON config must be an object");
  Config c;
  flatten(j, "", c);
  return c;
}

Config Config::load(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      fail(ErrorKind::validation, std::string("invalid JSON config: ") + e.what());
    }
    return parse_json(j);
  }
  return parse_text(text);
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  require(it != values_.end(), ErrorKind::validation, "unknown config key " + key);
  return it->second;
}

double Config::number(const std::string& key) const { return parse_number(key, get(key)); }

long Config::integer(const std::string& key) const {
  const double x = number(key);
  require(std::isfinite(x) && x == std::floor(x), ErrorKind::validation, "config key " + key + " expects an integer");
  return static_cast<long>(x);
}

std::vector<double> Config::list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream is(get(key));
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number(key, item));
  }
  return out;
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

json Config::to_json() const {
  json j = json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Config::hash_hex() const {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << hash();
  return os.str();
}

DickeParams Config::params() const {
  DickeParams p;
  p.omega = number("model.omega");
  p.kappa = number("model.kappa");
  p.omega_z = number("model.omega_z");
  p.g = number("model.g");
  p.n_sites = number("model.n_sites");
  p.dimension_budget = integer("model.dimension_budget");
  auto& b = p.bath;
  const std::string backend = get("bath.backend");
  if (backend == "none") {
    b.backend = BathBackend::none;
  } else if (backend == "markovian") {
    b.backend = BathBackend::markovian;
  } else if (backend == "pseudomode") {
    b.backend = BathBackend::pseudomode;
  } else {
    fail(ErrorKind::validation, "bath.backend must be none, markovian or pseudomode");
  }
  b.gamma_phi = number("bath.gamma_phi");
  b.beta_t = number("bath.beta_t");
  const std::string form = get("bath.form");
  if (form == "ohmic") {
    b.spectral = SpectralDensity::ohmic(number("bath.alpha"), number("bath.omega_c"), number("bath.s"));
  } else if (form == "tanh_lindblad") {
    b.spectral = SpectralDensity::tanh_lindblad(number("bath.gamma_phi"), b.beta_t, number("bath.omega_c"));
  } else {
    fail(ErrorKind::validation, "bath.form must be ohmic or tanh_lindblad");
  }
  auto& f = b.fit;
  f.n_terms = static_cast<int>(integer("bath.fit.n_terms"));
  f.max_terms = static_cast<int>(integer("bath.fit.max_terms"));
  f.fock_cutoff = static_cast<int>(integer("bath.fit.fock_cutoff"));
  f.residual_threshold = number("bath.fit.residual_threshold");
  f.dephasing_weight = number("bath.fit.dephasing_weight");
  f.window = number("bath.fit.window");
  f.samples = static_cast<int>(integer("bath.fit.samples"));
  f.restarts = static_cast<int>(integer("bath.fit.restarts"));
  f.seed = get("bath.fit.seed") == "auto" ? hash() : static_cast<std::uint64_t>(integer("bath.fit.seed"));
  return p;
}

InitialState Config::initial_state() const {
  InitialState s;
  s.theta = number("init.theta");
  s.a0 = cplx(number("init.a0_re"), number("init.a0_im"));
  return s;
}

BmfOptions Config::bmf_options() const {
  BmfOptions o;
  o.record_every = static_cast<int>(integer("integrator.record_every"));
  o.t_mem = number("integrator.t_mem");
  o.eps_mem = number("integrator.eps_mem");
  const std::string scheme = get("integrator.scheme");
  if (scheme == "exponential") {
    o.scheme = MemoryScheme::exponential;
  } else if (scheme == "window") {
    o.scheme = MemoryScheme::window;
  } else {
    fail(ErrorKind::validation, "integrator.scheme must be exponential or window");
  }
  return o;
}

RiseOptions Config::rise_options() const {
  RiseOptions o;
  o.column = get("analysis.rise.column");
  o.level_fraction = number("analysis.rise.level");
  const std::string plateau = get("analysis.rise.plateau");
  if (plateau == "peak") {
    o.plateau = PlateauRule::peak;
  } else if (plateau == "tail") {
    o.plateau = PlateauRule::tail;
  } else {
    fail(ErrorKind::validation, "analysis.rise.plateau must be peak or tail");
  }
  const std::string window = get("analysis.rise.window");
  if (window == "time") {
    o.window = GrowthWindow::time;
  } else if (window == "level") {
    o.window = GrowthWindow::level;
  } else {
    fail(ErrorKind::validation, "analysis.rise.window must be time or level");
  }
  o.gamma_lo = number("analysis.rise.gamma_lo");
  o.gamma_hi = number("analysis.rise.gamma_hi");
  o.omega = number("model.omega");
  require(o.gamma_lo < o.gamma_hi, ErrorKind::validation, "analysis.rise.gamma_lo must be below gamma_hi");
  return o;
}

RelaxOptions Config::relax_options() const {
  RelaxOptions o;
  o.column = get("analysis.relax.column");
  o.t_lo = number("analysis.relax.t_lo");
  o.t_hi = number("analysis.relax.t_hi");
  return o;
}

void Config::validate(const std::string& command) const {
  const DickeParams p = params();
  p.validate();
  const InitialState init = initial_state();
  require(init.theta >= 0.0 && init.theta < 2.0 * M_PI, ErrorKind::validation, "init.theta must lie in [0, 2 pi)");
  require(dt() > 0.0, ErrorKind::validation, "integrator.dt must be positive");
  require(t_max() > 0.0, ErrorKind::validation, "integrator.t_max must be positive");
  require(integer("integrator.record_every") >= 1, ErrorKind::validation, "integrator.record_every must be >= 1");
  const BmfOptions o = bmf_options();
  require(o.eps_mem > 0.0 && o.eps_mem < 1.0, ErrorKind::validation, "integrator.eps_mem must lie in (0, 1)");
  std::vector<double> ns = list("sweep.n"), thetas = list("sweep.theta");
  if (ns.empty()) ns = {p.n_sites};
  for (double theta : thetas)
    require(theta >= 0.0 && theta < 2.0 * M_PI, ErrorKind::validation, "sweep.theta entries must lie in [0, 2 pi)");
  const bool runs_bmf = command == "bmf" || command == "convergence" ||
                        ((command == "fit-rise" || command == "fit-relax" || command == "fit-connected") &&
                         get("analysis.inputs").empty());
  if (runs_bmf) {
    for (double n : ns)
      require(std::isfinite(n) && n >= 2.0, ErrorKind::validation, "bmf needs finite N >= 2 for every run");
    require(o.scheme == MemoryScheme::exponential || p.kappa > 0.0 || o.t_mem > 0.0, ErrorKind::validation,
            "window memory needs kappa > 0 or integrator.t_mem");
    if (o.scheme == MemoryScheme::window && o.t_mem > 0.0 && p.kappa > 0.0)
      require(o.t_mem >= -std::log(o.eps_mem) / p.kappa, ErrorKind::validation,
              "integrator.t_mem must be at least -ln(eps_mem) / kappa");
  }
  if (command == "naive") {
    require(p.bath.backend == BathBackend::none, ErrorKind::validation, "naive needs bath.backend = none");
    for (double n : ns) require(std::isfinite(n) && n >= 1.0, ErrorKind::validation, "naive needs finite N");
    require(p.kappa > 0.0, ErrorKind::validation, "naive needs kappa > 0");
  }
  if (command == "chi") require(p.omega_z > 0.0, ErrorKind::validation, "chi needs omega_z > 0");
  if (command == "sweep") require(!list("sweep.g").empty(), ErrorKind::validation, "sweep needs sweep.g");
  if (command == "fit-exponent")
    require(!list("sweep.g").empty(), ErrorKind::validation, "fit-exponent needs sweep.g");
  if (command == "bath-validate")
    require(p.bath.backend == BathBackend::pseudomode, ErrorKind::validation,
            "bath-validate needs bath.backend = pseudomode");
  if (command == "fit-rise") {
    const RiseOptions r = rise_options();
    require(r.level_fraction > 0.0 && r.level_fraction < 1.0, ErrorKind::validation,
            "analysis.rise.level must lie in (0, 1)");
    require(number("analysis.rise.mf_lo") < number("analysis.rise.mf_hi"), ErrorKind::validation,
            "analysis.rise.mf_lo must be below mf_hi");
  }
  if (command == "fit-relax") relax_options();
  if (command == "fit-connected")
    require(number("analysis.t_star") >= 0.0, ErrorKind::validation, "analysis.t_star must be >= 0");
  list("sweep.g");
}

std::string to_csv(const TimeSeries& s) {
  std::ostringstream os;
  os << "# schema-version " << kCsvSchemaVersion << "\n";
  for (std::size_t c = 0; c < s.columns().size(); ++c) os << (c ? "," : "") << s.columns()[c];
  os << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& r = s.row(k);
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << "\n";
  }
  return os.str();
}

TimeSeries parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorKind::io, "empty CSV");
  require(line.rfind("# schema-version", 0) == 0, ErrorKind::io, "CSV lacks a schema-version line");
  const int version = std::stoi(line.substr(16));
  require(version == kCsvSchemaVersion, ErrorKind::io, "unsupported CSV schema version " + std::to_string(version));
  require(static_cast<bool>(std::getline(is, line)), ErrorKind::io, "CSV lacks a header line");
  std::vector<std::string> cols;
  {
    std::istringstream hs(line);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(trim(c));
  }
  TimeSeries s(cols);
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::istringstream rs(line);
    std::string c;
    while (std::getline(rs, c, ',')) {
      const std::string t = trim(c);
      if (t == "nan" || t == "-nan") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        row.push_back(parse_number("csv", t));
      }
    }
    require(row.size() == cols.size(), ErrorKind::io, "CSV row width does not match the header");
    s.append(std::move(row));
  }
  return s;
}

void write_csv(const std::string& path, const TimeSeries& s) { write_file_atomic(path, to_csv(s)); }

TimeSeries read_csv(const std::string& path) { return parse_csv(read_file(path)); }

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    require(static_cast<bool>(os), ErrorKind::io, "cannot open " + tmp + " for writing");
    os << contents;
    require(static_cast<bool>(os), ErrorKind::io, "write to " + tmp + " failed");
  }
  fs::rename(tmp, target, ec);
  require(!ec, ErrorKind::io, "cannot rename " + tmp + " to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::io, "cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

json to_json(const FitReport& r) {
  json params = json::object();
  for (std::size_t k = 0; k < r.names.size(); ++k)
    params[r.names[k]] = {{"value", number_json(r.values[k])}, {"error", number_json(r.errors[k])}};
  json data = json::object();
  for (const auto& [k, v] : r.data) {
    json arr = json::array();
    for (double x : v) arr.push_back(number_json(x));
    data[k] = arr;
  }
  return {{"model", r.model},
          {"parameters", params},
          {"window", {number_json(r.window_lo), number_json(r.window_hi)}},
          {"residual_norm", number_json(r.residual_norm)},
          {"r_squared", number_json(r.r_squared)},
          {"ok", r.ok},
          {"notes", r.notes},
          {"data", data}};
}

json to_json(const ChiResult& r) {
  const auto& j = r.spectral;
  return {{"chi", r.chi},
          {"quadrature_error", r.error},
          {"beta_t", number_json(r.beta_t)},
          {"omega_z", r.omega_z},
          {"closed_form", number_json(r.closed_form)},
          {"closed_form_residual", number_json(std::abs(r.chi - r.closed_form) / std::abs(r.closed_form))},
          {"bath",
           {{"form", j.form == SpectralForm::ohmic ? "ohmic" : "tanh_lindblad"},
            {"alpha", j.alpha},
            {"s", j.s},
            {"omega_c", number_json(j.omega_c)},
            {"gamma_phi", j.gamma_phi}}}};
}

json to_json(const PseudomodeEmbedding& e) {
  json terms = json::array();
  for (const auto& t : e.fit.terms) terms.push_back({{"c", cplx_json(t.c)}, {"nu", cplx_json(t.nu)}});
  json modes = json::array();
  for (const auto& m : e.modes)
    modes.push_back({{"coupling", cplx_json(m.coupling)}, {"frequency", m.frequency}, {"damping", m.damping}});
  return {{"fock_cutoff", e.fock_cutoff},
          {"fit",
           {{"terms", terms}, {"max_residual", e.fit.max_residual}, {"c0", e.fit.c0}, {"t_max", e.fit.t_max}}},
          {"modes", modes},
          {"hamiltonian", matrix_json(e.hamiltonian)},
          {"damping", matrix_json(e.damping)},
          {"coupling", vector_json(e.coupling)}};
}

PseudomodeEmbedding embedding_from_json(const json& j) {
  try {
    PseudomodeEmbedding e;
    e.fock_cutoff = j.at("fock_cutoff").get<int>();
    const auto& f = j.at("fit");
    for (const auto& t : f.at("terms")) e.fit.terms.push_back({cplx_from(t.at("c")), cplx_from(t.at("nu"))});
    e.fit.max_residual = f.at("max_residual").get<double>();
    e.fit.c0 = f.at("c0").get<double>();
    e.fit.t_max = f.at("t_max").get<double>();
    for (const auto& m : j.at("modes"))
      e.modes.push_back({cplx_from(m.at("coupling")), m.at("frequency").get<double>(), m.at("damping").get<double>()});
    e.hamiltonian = matrix_from(j.at("hamiltonian"));
    e.damping = matrix_from(j.at("damping"));
    e.coupling = matrix_from(j.at("coupling")).col(0);
    return e;
  } catch (const json::exception& ex) {
    fail(ErrorKind::io, std::string("malformed embedding record: ") + ex.what());
  }
}

json checkpoint_to_json(const BmfState& s) {
  json j = {{"format", "dicke-bmf-checkpoint"},
            {"version", kCheckpointVersion},
            {"scheme", s.scheme == MemoryScheme::exponential ? "exponential" : "window"},
            {"t", s.t},
            {"moments", moments_json(s.m)},
            {"rho", matrix_json(s.rho)}};
  if (s.scheme == MemoryScheme::exponential) {
    j["w"] = matrix_json(s.w);
    json y = json::array();
    for (const auto& m : s.y) y.push_back(matrix_json(m));
    j["y"] = y;
  } else {
    json window = json::array();
    for (const auto& e : s.history.entries)
      window.push_back({{"t_seed", e.t_seed},
                        {"dx2", e.dx2},
                        {"dxp", e.dxp},
                        {"a", matrix_json(e.a)},
                        {"b", matrix_json(e.b)},
                        {"d_same", matrix_json(e.d_same)},
                        {"d_cross", matrix_json(e.d_cross)}});
    j["window"] = window;
  }
  return j;
}

BmfState checkpoint_from_json(const json& j) {
  try {
    require(j.at("format").get<std::string>() == "dicke-bmf-checkpoint", ErrorKind::io, "not a checkpoint record");
    require(j.at("version").get<int>() == kCheckpointVersion, ErrorKind::io, "unsupported checkpoint version");
    BmfState s;
    s.scheme = j.at("scheme").get<std::string>() == "window" ? MemoryScheme::window : MemoryScheme::exponential;
    s.t = j.at("t").get<double>();
    s.m = moments_from(j.at("moments"));
    s.rho = matrix_from(j.at("rho"));
    if (s.scheme == MemoryScheme::exponential) {
      s.w = matrix_from(j.at("w"));
      for (int k = 0; k < 4; ++k) s.y[k] = matrix_from(j.at("y").at(k));
    } else {
      for (const auto& e : j.at("window")) {
        KernelEntry k;
        k.t_seed = e.at("t_seed").get<double>();
        k.dx2 = e.at("dx2").get<double>();
        k.dxp = e.at("dxp").get<double>();
        k.a = matrix_from(e.at("a"));
        k.b = matrix_from(e.at("b"));
        k.d_same = matrix_from(e.at("d_same"));
        k.d_cross = matrix_from(e.at("d_cross"));
        s.history.entries.push_back(std::move(k));
      }
    }
    return s;
  } catch (const json::exception& ex) {
    fail(ErrorKind::io, std::string("malformed checkpoint: ") + ex.what());
  }
}

json to_json(const Manifest& m) {
  json j = {{"command", m.command},
            {"version", kVersion},
            {"csv_schema_version", kCsvSchemaVersion},
            {"wall_time_s", m.wall_time},
            {"artifacts", m.artifacts},
            {"partial", m.partial},
            {"status", m.status},
            {"extra", m.extra}};
  if (m.config) {
    j["config"] = m.config->to_json();
    j["config_hash"] = m.config->hash_hex();
  }
  return j;
}

std::string render_svg(const std::vector<PlotLine>& lines, const PlotSpec& spec) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0.0) && (!spec.log_y || y > 0.0);
  };
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& l : lines)
    for (std::size_t k = 0; k < l.x.size() && k < l.y.size(); ++k)
      if (usable(l.x[k], l.y[k])) {
        x0 = std::min(x0, tx(l.x[k]));
        x1 = std::max(x1, tx(l.x[k]));
        y0 = std::min(y0, ty(l.y[k]));
        y1 = std::max(y1, ty(l.y[k]));
      }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0;
  if (!(y0 <= y1)) y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + (y0 == 0.0 ? 1.0 : 0.1 * std::abs(y0)), y0 -= (y1 - y0);
  const double left = 70.0, right = 20.0, top = 36.0, bottom = 50.0;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + (1.0 - (ty(v) - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    const double sx = left + pw * k / 4.0, sy = top + ph * (1.0 - k / 4.0);
    const double vx = spec.log_x ? std::pow(10.0, fx) : fx, vy = spec.log_y ? std::pow(10.0, fy) : fy;
    os << "<line x1=\"" << sx << "\" y1=\"" << top + ph << "\" x2=\"" << sx << "\" y2=\"" << top + ph + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << sx << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << std::setprecision(4)
       << vx << "</text>\n";
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << sy << "\" x2=\"" << left << "\" y2=\"" << sy
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">" << vy << "</text>\n"
       << std::setprecision(6);
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << spec.height - 10 << "\" text-anchor=\"middle\">" << spec.xlabel
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << top + ph / 2 << ")\">" << spec.ylabel << "</text>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << spec.title
     << "</text>\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& l = lines[i];
    const char* colour = palette[i % 7];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < l.x.size() && k < l.y.size(); ++k)
      if (usable(l.x[k], l.y[k])) os << px(l.x[k]) << "," << py(l.y[k]) << " ";
    os << "\"/>\n";
    if (spec.markers)
      for (std::size_t k = 0; k < l.x.size() && k < l.y.size(); ++k)
        if (usable(l.x[k], l.y[k]))
          os << "<circle cx=\"" << px(l.x[k]) << "\" cy=\"" << py(l.y[k]) << "\" r=\"3\" fill=\"" << colour
             << "\"/>\n";
    os << "<text x=\"" << left + pw - 8 << "\" y=\"" << top + 16 + 15 * i << "\" text-anchor=\"end\" fill=\""
       << colour << "\">" << l.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace dicke
