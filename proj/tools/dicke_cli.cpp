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

// Command-line driver. Every subcommand reads one flat config, validates it
// before any compute, and writes its artifacts plus manifest.json into the
// output directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dicke/analysis.hpp"
#include "dicke/bmf.hpp"
#include "dicke/io.hpp"
#include "dicke/meanfield.hpp"
#include "dicke/naive.hpp"
#include "dicke/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dicke;

namespace {

constexpr const char* kOutRootEnv = "DICKE_OUT_ROOT";

enum ExitCode { kOk = 0, kValidation = 1, kDivergence = 2, kIo = 3 };

struct RunPoint {
  double g = 0.0, n = 0.0, theta = 0.0;
};

struct RunRecord {
  RunPoint point;
  std::string csv;
  TimeSeries series;
  bool diverged = false;
};

class Context {
 public:
  Context(std::string command, Config cfg, fs::path out, unsigned workers)
      : command_(std::move(command)), cfg_(std::move(cfg)), out_(std::move(out)), workers_(workers) {
    manifest_.command = command_;
    manifest_.config = &cfg_;
  }

  const std::string& command() const { return command_; }
  const Config& cfg() const { return cfg_; }
  const fs::path& out() const { return out_; }
  unsigned workers() const { return workers_; }
  Manifest& manifest() { return manifest_; }

  void save_text(const std::string& name, const std::string& contents) {
    write_file_atomic((out_ / name).string(), contents);
    std::lock_guard<std::mutex> lock(mutex_);
    manifest_.artifacts.push_back(name);
  }
  void save_json(const std::string& name, const json& j) { save_text(name, j.dump(2) + "\n"); }
  void save_csv(const std::string& name, const TimeSeries& s) { save_text(name, to_csv(s)); }
  void save_plot(const std::string& name, const std::vector<PlotLine>& lines, const PlotSpec& spec) {
    save_text(name, render_svg(lines, spec));
  }

  void finish(double wall_time) {
    manifest_.wall_time = wall_time;
    write_file_atomic((out_ / "manifest.json").string(), to_json(manifest_).dump(2) + "\n");
  }

 private:
  std::string command_;
  Config cfg_;
  fs::path out_;
  unsigned workers_;
  Manifest manifest_;
  std::mutex mutex_;
};

std::string compact(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<double> or_default(std::vector<double> v, double fallback) {
  if (v.empty()) v.push_back(fallback);
  return v;
}

std::vector<RunPoint> run_points(const Config& cfg) {
  const DickeParams p = cfg.params();
  std::vector<RunPoint> pts;
  for (double g : or_default(cfg.list("sweep.g"), p.g))
    for (double n : or_default(cfg.list("sweep.n"), p.n_sites))
      for (double theta : or_default(cfg.list("sweep.theta"), cfg.initial_state().theta)) pts.push_back({g, n, theta});
  return pts;
}

std::string run_name(const std::string& kind, const RunPoint& pt) {
  return kind + "_g" + compact(pt.g) + "_n" + compact(pt.n) + "_theta" + compact(pt.theta);
}

// Base parameters with the bath resolved once for every run of the set.
DickeParams resolved_params(const Config& cfg) {
  DickeParams p = cfg.params();
  resolve_bath(p);
  return p;
}

TimeSeries simulate(const std::string& kind, const Config& cfg, const DickeParams& base, const RunPoint& pt) {
  DickeParams p = base;
  p.g = pt.g;
  p.n_sites = pt.n;
  InitialState init = cfg.initial_state();
  init.theta = pt.theta;
  BmfOptions opt = cfg.bmf_options();
  opt.throw_on_divergence = false;
  if (kind == "mf") return mf_run(p, init, cfg.t_max(), cfg.dt(), opt);
  if (kind == "naive") return naive_run(p, init, cfg.t_max(), cfg.dt(), opt);
  return bmf_run(p, init, cfg.t_max(), cfg.dt(), opt);
}

std::vector<RunRecord> run_set(Context& ctx, const std::string& kind) {
  const Config& cfg = ctx.cfg();
  const DickeParams base = resolved_params(cfg);
  const std::vector<RunPoint> pts = run_points(cfg);
  std::vector<RunRecord> runs(pts.size());
  parallel_for(pts.size(), ctx.workers(), [&](std::size_t k) {
    RunRecord& r = runs[k];
    r.point = pts[k];
    r.series = simulate(kind, cfg, base, pts[k]);
    r.diverged = r.series.diverged;
    r.csv = run_name(kind, pts[k]) + ".csv";
    ctx.save_csv(r.csv, r.series);
  });
  return runs;
}

json run_summary(const std::vector<RunRecord>& runs) {
  json list = json::array();
  for (const auto& r : runs) {
    json e = {{"g", r.point.g}, {"n", r.point.n}, {"theta", r.point.theta}, {"csv", r.csv}, {"diverged", r.diverged}};
    if (!r.series.empty()) {
      json last = json::object();
      for (const auto& c : r.series.columns()) last[c] = r.series.back(c);
      e["final"] = last;
    }
    list.push_back(e);
  }
  return list;
}

// Late-time sz spread across theta for every (g, N) group.
json theta_spread(const std::vector<RunRecord>& runs) {
  std::map<std::pair<double, double>, std::vector<double>> groups;
  for (const auto& r : runs)
    if (!r.series.empty()) groups[{r.point.g, r.point.n}].push_back(r.series.back("sz"));
  json out = json::array();
  for (const auto& [key, sz] : groups) {
    const auto [lo, hi] = std::minmax_element(sz.begin(), sz.end());
    out.push_back({{"g", key.first}, {"n", key.second}, {"sz", sz}, {"spread", *hi - *lo}});
  }
  return out;
}

void plot_runs(Context& ctx, const std::vector<RunRecord>& runs, const std::string& column, const std::string& name,
               bool log_y = false) {
  std::vector<PlotLine> lines;
  for (const auto& r : runs) {
    if (r.series.empty() || !r.series.has(column)) continue;
    lines.push_back({run_name("", r.point).substr(1), r.series.column("t"), r.series.column(column)});
  }
  if (lines.empty()) return;
  PlotSpec spec;
  spec.title = ctx.command() + ": " + column;
  spec.xlabel = "t";
  spec.ylabel = column;
  spec.log_y = log_y;
  ctx.save_plot(name, lines, spec);
}

void flag_divergence(Context& ctx, const std::vector<RunRecord>& runs) {
  for (const auto& r : runs)
    if (r.diverged) {
      ctx.manifest().partial = true;
      ctx.manifest().status = "diverged";
    }
}

// Runs from analysis.inputs (a directory written by `bmf`) or computed here.
std::vector<RunRecord> bmf_inputs(Context& ctx) {
  const std::string dir = ctx.cfg().get("analysis.inputs");
  if (dir.empty()) {
    auto runs = run_set(ctx, "bmf");
    ctx.save_json("runs.json", run_summary(runs));
    flag_divergence(ctx, runs);
    return runs;
  }
  const json summary = json::parse(read_file((fs::path(dir) / "runs.json").string()));
  std::vector<RunRecord> runs;
  for (const auto& e : summary) {
    RunRecord r;
    r.point = {e.at("g").get<double>(), e.at("n").get<double>(), e.at("theta").get<double>()};
    r.csv = (fs::path(dir) / e.at("csv").get<std::string>()).string();
    r.series = read_csv(r.csv);
    r.diverged = e.value("diverged", false);
    runs.push_back(std::move(r));
  }
  require(!runs.empty(), ErrorKind::io, "no runs listed in " + dir + "/runs.json");
  return runs;
}

void cmd_simulate(Context& ctx, const std::string& kind) {
  auto runs = run_set(ctx, kind);
  ctx.save_json("runs.json", run_summary(runs));
  ctx.manifest().extra["theta_spread"] = theta_spread(runs);
  plot_runs(ctx, runs, "sz", kind + "_sz.svg");
  plot_runs(ctx, runs, kind == "mf" ? "n" : "n_total", kind + "_photons.svg", true);
  flag_divergence(ctx, runs);
}

void cmd_naive(Context& ctx) {
  cmd_simulate(ctx, "naive");
  const DickeParams base = ctx.cfg().params();
  TimeSeries table({"t", "n", "dn", "n_unscaled", "dx2", "dxp", "sz", "residual", "converged"});
  std::vector<double> ns, scaled;
  std::set<double> seen;
  for (const auto& pt : run_points(ctx.cfg())) {
    if (!seen.insert(pt.n).second) continue;
    DickeParams p = base;
    p.n_sites = pt.n;
    p.g = pt.g;
    const NaiveSteadyState ss = naive_steady_state(p);
    // Column t carries the row index so the table keeps the CSV schema.
    table.append({static_cast<double>(table.size()), pt.n, ss.dn, ss.unscaled_photons(pt.n), ss.dx2, ss.dxp, ss.sz,
                  ss.residual, ss.converged ? 1.0 : 0.0});
    ns.push_back(pt.n);
    scaled.push_back(ss.dn);
  }
  ctx.save_csv("naive_steady.csv", table);
  if (ns.size() >= 2) {
    const FitReport fit = power_law_fit(ns, scaled);
    ctx.save_json("naive_steady_fit.json", to_json(fit));
    PlotSpec spec{"naive steady photons", "N", "dn", true, true, true};
    ctx.save_plot("naive_steady.svg", {{"scaled dn", ns, scaled}}, spec);
  }
}

void cmd_chi(Context& ctx) {
  const DickeParams p = ctx.cfg().params();
  const ChiResult chi = chi_susceptibility(p.bath.spectral, p.bath.beta_t, p.omega_z);
  json j = to_json(chi);
  j["g_c"] = critical_coupling(chi.chi, p.omega, p.kappa);
  if (std::isfinite(chi.closed_form)) j["closed_form_residual"] = std::abs(chi.chi - chi.closed_form) / std::abs(chi.closed_form);
  ctx.save_json("chi.json", j);
}

json sweep_json(const std::vector<SweepPoint>& sweep) {
  json out = json::array();
  for (const auto& s : sweep)
    out.push_back({{"g", s.g}, {"abs_a", s.abs_a}, {"re_a", s.re_a}, {"im_a", s.im_a}, {"sx", s.sx}, {"sz", s.sz},
                   {"ratio", s.ratio}, {"converged", s.converged}});
  return out;
}

std::vector<SweepPoint> run_sweep(Context& ctx) {
  const Config& cfg = ctx.cfg();
  const DickeParams p = resolved_params(cfg);
  InitialState init = cfg.initial_state();
  const double seed = cfg.number("analysis.rise.mf_a0");
  if (init.a0 == 0.0) init.a0 = cplx(seed, seed);
  const auto sweep = mf_steady_sweep(p, cfg.list("sweep.g"), init, cfg.t_max(), cfg.dt(), ctx.workers());
  ctx.save_json("sweep.json", sweep_json(sweep));
  std::vector<double> g, a;
  for (const auto& s : sweep) {
    g.push_back(s.g);
    a.push_back(s.abs_a);
  }
  PlotSpec spec{"steady |a|", "g", "|a| / sqrt N"};
  spec.markers = true;
  ctx.save_plot("sweep.svg", {{"|a|", g, a}}, spec);
  return sweep;
}

double g_c_hint(const Config& cfg) {
  const double hint = cfg.number("analysis.g_c_hint");
  if (hint > 0.0) return hint;
  const DickeParams p = cfg.params();
  return critical_coupling(static_susceptibility(p), p.omega, p.kappa);
}

void cmd_sweep(Context& ctx) {
  const auto sweep = run_sweep(ctx);
  const auto [below, above] = sweep_onset(sweep, 1e-3);
  ctx.manifest().extra["onset"] = {{"g_below", below}, {"g_above", above}, {"g_c_linear_response", g_c_hint(ctx.cfg())}};
}

void cmd_fit_exponent(Context& ctx) {
  const auto sweep = run_sweep(ctx);
  CriticalFitOptions opt;
  opt.field = ctx.cfg().get("analysis.critical_field");
  opt.window_factor = ctx.cfg().number("analysis.window_factor");
  const FitReport fit = critical_exponent_fit(sweep, g_c_hint(ctx.cfg()), opt);
  ctx.save_json("exponent_fit.json", to_json(fit));
}

void cmd_fit_rise(Context& ctx) {
  const Config& cfg = ctx.cfg();
  const auto runs = bmf_inputs(ctx);
  const RiseOptions opt = cfg.rise_options();
  std::map<std::pair<double, double>, std::vector<std::pair<double, TimeSeries>>> groups;
  for (const auto& r : runs) groups[{r.point.g, r.point.theta}].push_back({r.point.n, r.series});
  json reports = json::array();
  std::vector<PlotLine> lines;
  for (auto& [key, set] : groups) {
    if (set.size() < 2) continue;
    const FitReport fit = rise_time_fit(set, opt);
    json j = to_json(fit);
    // Seeded mean-field growth at the same coupling.
    DickeParams p = resolved_params(cfg);
    p.g = key.first;
    InitialState init;
    init.theta = key.second;
    init.a0 = cplx(cfg.number("analysis.rise.mf_a0"), cfg.number("analysis.rise.mf_a0"));
    RunOptions ro;
    ro.track_min_eigenvalue = false;
    const TimeSeries mf = mf_run(p, init, cfg.number("analysis.rise.mf_hi"), cfg.dt(), ro);
    RiseOptions mopt = opt;
    mopt.column = "n";
    mopt.window = GrowthWindow::time;
    mopt.gamma_lo = cfg.number("analysis.rise.mf_lo") * opt.omega;
    mopt.gamma_hi = cfg.number("analysis.rise.mf_hi") * opt.omega;
    const double gamma_mf = growth_rate_fit(mf, mopt).value("gamma");
    j["g"] = key.first;
    j["theta"] = key.second;
    j["gamma_mf"] = gamma_mf;
    j["gamma_relative_spread"] = fit.value("gamma_spread") / fit.value("gamma_mean");
    j["gamma_mf_relative_difference"] = std::abs(fit.value("gamma_mean") - gamma_mf) / gamma_mf;
    reports.push_back(j);
    std::vector<double> log_n;
    for (double n : fit.data.at("N")) log_n.push_back(std::log(n));
    lines.push_back({"g " + compact(key.first), log_n, fit.data.at("t_r")});
  }
  require(!reports.empty(), ErrorKind::validation, "fit-rise needs two or more N at a common g and theta");
  ctx.save_json("rise_fit.json", reports);
  PlotSpec spec{"rise time", "ln N", "t_r"};
  spec.markers = true;
  ctx.save_plot("rise_fit.svg", lines, spec);
}

void cmd_fit_relax(Context& ctx) {
  const auto runs = bmf_inputs(ctx);
  const RelaxOptions opt = ctx.cfg().relax_options();
  json per_run = json::array();
  std::map<std::pair<double, double>, std::vector<std::pair<double, double>>> by_g, by_n;  // -> (x, tau)
  for (const auto& r : runs) {
    const FitReport fit = relaxation_time_fit(r.series, opt);
    json j = to_json(fit);
    j["g"] = r.point.g;
    j["n"] = r.point.n;
    j["theta"] = r.point.theta;
    per_run.push_back(j);
    by_g[{r.point.g, r.point.theta}].push_back({r.point.n, fit.value("tau")});
    by_n[{r.point.n, r.point.theta}].push_back({r.point.g, fit.value("tau")});
  }
  json scaling = json::array();
  std::vector<PlotLine> lines;
  auto fit_group = [&](const char* axis, double fixed, double theta, const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return;
    std::vector<double> x, y;
    for (const auto& [a, b] : pts) {
      x.push_back(a);
      y.push_back(b);
    }
    json j = to_json(power_law_fit(x, y));
    j["axis"] = axis;
    j["fixed"] = fixed;
    j["theta"] = theta;
    scaling.push_back(j);
    lines.push_back({std::string("tau vs ") + axis + " at " + compact(fixed), x, y});
  };
  for (const auto& [key, pts] : by_g) fit_group("N", key.first, key.second, pts);
  for (const auto& [key, pts] : by_n) fit_group("g", key.first, key.second, pts);
  ctx.save_json("relax_fit.json", {{"runs", per_run}, {"scaling", scaling}});
  if (!lines.empty()) {
    PlotSpec spec{"relaxation time", "N or g", "tau", true, true, true};
    ctx.save_plot("relax_fit.svg", lines, spec);
  }
}

void cmd_fit_connected(Context& ctx) {
  const auto runs = bmf_inputs(ctx);
  double t_star = ctx.cfg().number("analysis.t_star");
  if (t_star == 0.0) t_star = ctx.cfg().t_max();
  std::map<std::pair<double, double>, std::vector<std::pair<double, TimeSeries>>> groups;
  for (const auto& r : runs) groups[{r.point.g, r.point.theta}].push_back({r.point.n, r.series});
  json out = json::array();
  std::vector<PlotLine> lines;
  for (const auto& [key, set] : groups) {
    if (set.size() < 2) continue;
    const auto fits = connected_scaling_fit(set, t_star);
    json reports = json::array();
    int nonzero = 0;
    for (const auto& f : fits) {
      reports.push_back(to_json(f));
      if (!f.ok) continue;
      ++nonzero;
      std::vector<double> mag;
      for (double v : f.data.at("value")) mag.push_back(std::abs(v));
      lines.push_back({f.notes.front(), f.data.at("N"), mag});
    }
    out.push_back({{"g", key.first}, {"theta", key.second}, {"t_star", t_star}, {"nonzero", nonzero}, {"fits", reports}});
  }
  require(!out.empty(), ErrorKind::validation, "fit-connected needs two or more N at a common g and theta");
  ctx.save_json("connected_fit.json", out);
  if (!lines.empty()) {
    PlotSpec spec{"connected correlators", "N", "|c|", true, true, true};
    ctx.save_plot("connected_fit.svg", lines, spec);
  }
}

void cmd_convergence(Context& ctx) {
  const Config& cfg = ctx.cfg();
  const DickeParams p = resolved_params(cfg);
  const InitialState init = cfg.initial_state();
  BmfOptions opt = cfg.bmf_options();
  opt.track_min_eigenvalue = false;
  const std::vector<std::string> observables = {"sz", "sx", "n_total", "dn", "dx2", "dxp"};
  auto finals = [&](double dt, const BmfOptions& o) {
    BmfOptions oo = o;
    oo.record_every = 1;
    const TimeSeries s = bmf_run(p, init, cfg.t_max(), dt, oo);
    std::vector<double> v;
    for (const auto& c : observables) v.push_back(s.back(c));
    return v;
  };
  const double dt = cfg.dt();
  const auto a = finals(dt, opt), b = finals(dt / 2, opt), c = finals(dt / 4, opt);
  json step = json::object();
  for (std::size_t k = 0; k < observables.size(); ++k) {
    const double e1 = std::abs(a[k] - b[k]), e2 = std::abs(b[k] - c[k]);
    step[observables[k]] = {{"diff_dt", e1}, {"diff_dt_half", e2}, {"order", e2 > 0.0 ? std::log2(e1 / e2) : 0.0}};
  }
  BmfOptions win = opt;
  win.scheme = MemoryScheme::window;
  const double t_mem = opt.t_mem > 0.0 ? opt.t_mem : -std::log(opt.eps_mem) / p.kappa;
  win.t_mem = t_mem;
  const auto w1 = finals(dt, win);
  win.t_mem = 2.0 * t_mem;
  const auto w2 = finals(dt, win);
  json memory = json::object();
  for (std::size_t k = 0; k < observables.size(); ++k)
    memory[observables[k]] = {{"window", w1[k]}, {"window_doubled", w2[k]}, {"exponential", a[k]},
                              {"diff_doubled", std::abs(w1[k] - w2[k])}, {"diff_exponential", std::abs(w1[k] - a[k])}};
  ctx.save_json("convergence.json", {{"dt", dt}, {"t_mem", t_mem}, {"step", step}, {"memory", memory}});
}

void cmd_bath_validate(Context& ctx) {
  const Config& cfg = ctx.cfg();
  DickeParams p = resolved_params(cfg);
  p.g = 0.0;
  ctx.save_json("embedding.json", to_json(p.bath.embedding));
  InitialState init;
  init.theta = M_PI / 2;
  RunOptions ro;
  ro.record_every = static_cast<int>(cfg.integer("integrator.record_every"));
  const TimeSeries s = mf_run(p, init, cfg.t_max(), cfg.dt(), ro);
  TimeSeries cmp({"t", "envelope", "oracle", "relative_error"});
  double worst = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double t = s.at(k, "t");
    const double env = std::hypot(s.at(k, "sx"), s.at(k, "sy"));
    const double oracle = dephasing_decay_oracle(p.bath.spectral, p.bath.beta_t, t);
    const double err = std::abs(env - oracle) / oracle;
    worst = std::max(worst, err);
    cmp.append({t, env, oracle, err});
  }
  ctx.save_csv("bath_validate.csv", cmp);
  ctx.save_json("bath_validate.json", {{"max_relative_error", worst},
                                       {"terms", p.bath.embedding.size()},
                                       {"fock_cutoff", p.bath.embedding.fock_cutoff},
                                       {"fit_relative_residual", p.bath.embedding.fit.relative_residual()}});
  PlotSpec spec{"coherence envelope", "t", "|<s^x + i s^y>|"};
  ctx.save_plot("bath_validate.svg", {{"pseudomode", cmp.column("t"), cmp.column("envelope")},
                                      {"oracle", cmp.column("t"), cmp.column("oracle")}},
                spec);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::divergence: return kDivergence;
    case ErrorKind::io: return kIo;
    default: return kValidation;
  }
}

fs::path default_out(const std::string& command, const Config& cfg) {
  if (!cfg.get("output.dir").empty()) return cfg.get("output.dir");
  const char* root = std::getenv(kOutRootEnv);
  const fs::path base = root && *root ? fs::path(root) : fs::path("dicke-out");
  return base / (command + "-" + cfg.hash_hex().substr(0, 8));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open Dicke model: mean-field, beyond-mean-field and naive-projector dynamics"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  unsigned parallel = 1;
  std::vector<std::string> overrides;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"mf", "mean-field dynamics"},
      {"bmf", "beyond-mean-field dynamics"},
      {"naive", "naive-projector dynamics and steady state"},
      {"chi", "static spin susceptibility and critical coupling"},
      {"sweep", "mean-field steady-state sweep over g"},
      {"fit-rise", "rise time versus ln N and growth rate"},
      {"fit-relax", "relaxation time and its scaling with N and g"},
      {"fit-exponent", "critical exponent from a mean-field sweep"},
      {"fit-connected", "connected correlator decay with N"},
      {"convergence", "time-step and memory-window convergence"},
      {"bath-validate", "pseudomode embedding against the exact coherence decay"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "config file (key = value lines or JSON)");
    sub->add_option("--out", out_dir, std::string("output directory; default $") + kOutRootEnv + "/<command>-<hash>");
    sub->add_option("--parallel", parallel, "worker threads for independent runs")->check(CLI::PositiveNumber);
    sub->add_option("--override", overrides, "key=value, repeatable");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Config cfg;
  try {
    if (!config_path.empty()) cfg = Config::load(config_path);
    for (const auto& o : overrides) cfg.apply_override(o);
    if (!out_dir.empty()) cfg.set("output.dir", out_dir);
    cfg.validate(command);
  } catch (const Error& e) {
    std::cerr << "dicke " << command << ": " << e.what() << "\n";
    return exit_code(e.kind());
  }

  const fs::path out = default_out(command, cfg);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "dicke " << command << ": cannot create " << out << ": " << ec.message() << "\n";
    return kIo;
  }

  Context ctx(command, cfg, out, parallel);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  int code = kOk;
  try {
    if (command == "mf" || command == "bmf") cmd_simulate(ctx, command);
    else if (command == "naive") cmd_naive(ctx);
    else if (command == "chi") cmd_chi(ctx);
    else if (command == "sweep") cmd_sweep(ctx);
    else if (command == "fit-rise") cmd_fit_rise(ctx);
    else if (command == "fit-relax") cmd_fit_relax(ctx);
    else if (command == "fit-exponent") cmd_fit_exponent(ctx);
    else if (command == "fit-connected") cmd_fit_connected(ctx);
    else if (command == "convergence") cmd_convergence(ctx);
    else if (command == "bath-validate") cmd_bath_validate(ctx);
    if (ctx.manifest().status == "diverged") code = kDivergence;
  } catch (const Error& e) {
    std::cerr << "dicke " << command << ": " << e.what() << "\n";
    ctx.manifest().partial = true;
    ctx.manifest().status = std::string("error: ") + e.what();
    code = exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "dicke " << command << ": " << e.what() << "\n";
    ctx.manifest().partial = true;
    ctx.manifest().status = std::string("error: ") + e.what();
    code = kIo;
  }
  try {
    ctx.finish(elapsed());
  } catch (const std::exception& e) {
    std::cerr << "dicke " << command << ": cannot write manifest: " << e.what() << "\n";
    return kIo;
  }
  std::cout << out.string() << "\n";
  return code;
}
