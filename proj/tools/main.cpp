// Copyright 2026 The ibvs_lander Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "ibvs/analysis.hpp"
#include "ibvs/errors.hpp"
#include "ibvs/rng.hpp"
#include "ibvs/scenario.hpp"
#include "ibvs/simulator.hpp"
#include "ibvs/svg_plot.hpp"
#include "ibvs/trajectory_log.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

struct CheckParams {
  double edge_margin = 0.05;
  double max_dot_do = -0.05;
  ibvs::LandingTolerances landing;
};

// All enabled trajectory checks as one assertion list. Exceptions from the
// individual checkers become failed assertions so a report is always
// produced.
std::vector<ibvs::Assertion> run_all_checks(const ibvs::TrajectoryLog& log,
                                            const ibvs::Scenario& sc,
                                            const CheckParams& cp) {
  std::vector<ibvs::Assertion> out;
  {
    ibvs::Assertion a;
    a.name = "mission completed without abort";
    a.value = log.events.abort.has_value() ? 1.0 : 0.0;
    a.threshold = 0.5;
    a.require_less = true;
    a.pass = !log.events.abort.has_value();
    out.push_back(a);
  }
  if (sc.scene.window.has_value()) {
    try {
      ibvs::CrossingMargins margins;
      margins.edge_margin = cp.edge_margin;
      margins.max_dot_do = cp.max_dot_do;
      const ibvs::CrossingReport rep =
          ibvs::check_crossing(log, sc.control.window.epsilon, margins);
      out.insert(out.end(), rep.assertions.begin(), rep.assertions.end());
    } catch (const ibvs::Error& e) {
      ibvs::Assertion a;
      a.name = fmt::format("crossing check aborted: {}", e.what());
      a.value = 1.0;
      a.threshold = 0.5;
      a.require_less = true;
      a.pass = false;
      out.push_back(a);
    }
  }
  try {
    const ibvs::LandingReport rep =
        ibvs::check_landing(log, sc.scene.pad, cp.landing);
    out.insert(out.end(), rep.assertions.begin(), rep.assertions.end());
  } catch (const ibvs::Error& e) {
    ibvs::Assertion a;
    a.name = fmt::format("landing check aborted: {}", e.what());
    a.value = 1.0;
    a.threshold = 0.5;
    a.require_less = true;
    a.pass = false;
    out.push_back(a);
  }
  return out;
}

void write_plots(const ibvs::TrajectoryLog& log, const fs::path& dir,
                 const std::string& stem) {
  const auto& rec = log.records;
  std::vector<double> t(rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) t[i] = rec[i].t;

  const auto col = [&](auto getter) {
    std::vector<double> v(rec.size());
    for (std::size_t i = 0; i < rec.size(); ++i) v[i] = getter(rec[i]);
    return v;
  };
  using R = ibvs::LogRecord;
  const auto plot = [&](const std::string& suffix, const std::string& title,
                        const std::string& ylab,
                        std::vector<ibvs::PlotSeries> series) {
    ibvs::write_svg_plot((dir / (stem + "_" + suffix + ".svg")).string(),
                         title, "t [s]", ylab, series);
  };

  plot("position", "Position", "m",
       {{"xi_x", t, col([](const R& r) { return r.xi.x(); })},
        {"xi_y", t, col([](const R& r) { return r.xi.y(); })},
        {"xi_z", t, col([](const R& r) { return r.xi.z(); })}});
  plot("velocity", "Velocity", "m/s",
       {{"v_x", t, col([](const R& r) { return r.v.x(); })},
        {"v_y", t, col([](const R& r) { return r.v.y(); })},
        {"v_z", t, col([](const R& r) { return r.v.z(); })}});
  plot("features", "Image features", "-",
       {{"|q_w|", t, col([](const R& r) { return r.q_w.norm(); })},
        {"beta_t", t, col([](const R& r) { return -r.q_t.z(); })},
        {"alpha_w", t, col([](const R& r) { return r.alpha_w; })},
        {"mode", t, col([](const R& r) { return double(r.mode); })}});
  plot("flow", "Translational flow", "1/s",
       {{"phi_t_x", t, col([](const R& r) { return r.phi_t.x(); })},
        {"phi_t_y", t, col([](const R& r) { return r.phi_t.y(); })},
        {"phi_t_z", t, col([](const R& r) { return r.phi_t.z(); })}});
  plot("distances", "Distances", "m",
       {{"d_t", t, col([](const R& r) { return r.d_t; })},
        {"d_o", t, col([](const R& r) { return r.d_o; })},
        {"d_e", t, col([](const R& r) { return r.d_e; })}});
  plot("lyapunov", "Storage functions", "-",
       {{"L1", t, col([](const R& r) { return r.L1; })},
        {"L2", t, col([](const R& r) { return r.L2; })},
        {"L3", t, col([](const R& r) { return r.L3; })}});
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, bool plots, bool no_checks,
            bool mode2_literal, const CheckParams& cp) {
  ibvs::Scenario sc = ibvs::load_scenario(scenario_path);
  if (seed.has_value()) sc.noise.seed = *seed;
  if (mode2_literal) sc.control.mission.mode2_literal = true;

  fs::create_directories(out_dir);
  const ibvs::TrajectoryLog log = ibvs::run_scenario(sc);
  const fs::path dir(out_dir);
  ibvs::write_log_csv(log, (dir / (sc.name + ".csv")).string());

  const std::vector<ibvs::Assertion> checks = run_all_checks(log, sc, cp);
  ibvs::write_report(checks, (dir / (sc.name + ".report")).string());
  if (plots) write_plots(log, dir, sc.name);

  fmt::print("{}", ibvs::render_assertions(checks));
  const bool ok = ibvs::all_pass(checks);
  fmt::print("run `{}`: {} records, {}\n", sc.name, log.records.size(),
             ok ? "all checks passed" : "CHECKS FAILED");
  if (no_checks) return kExitOk;
  return ok ? kExitOk : kExitCheckFailed;
}

struct SweepRow {
  std::size_t index = 0;
  ibvs::Vec3 position = ibvs::Vec3::Zero();
  double t_w = -1.0, t_lim = -1.0, dot_do = 0.0, terminal_lateral = 0.0;
  bool pass = false;
  std::string note;
};

int cmd_sweep(const std::string& sweep_path, const std::string& out_override,
              int jobs, const CheckParams& cp) {
  std::ifstream in(sweep_path);
  if (!in) throw ibvs::ParseError(
      fmt::format("cannot open sweep file `{}`", sweep_path));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ibvs::ParseError(fmt::format("sweep file is not valid JSON: {}",
                                       e.what()));
  }
  if (!j.contains("base")) {
    throw ibvs::ParseError("missing required key `base`");
  }
  if (!j.contains("positions") || !j["positions"].is_array() ||
      j["positions"].empty()) {
    throw ibvs::ParseError(
        "missing required key `positions` (non-empty array)");
  }

  fs::path base_path(j["base"].get<std::string>());
  if (base_path.is_relative()) {
    base_path = fs::path(sweep_path).parent_path() / base_path;
  }
  const ibvs::Scenario base = ibvs::load_scenario(base_path.string());

  const std::string seed_policy = j.value("seed_policy", "increment");
  std::string out_dir = out_override.empty()
                            ? j.value("out", std::string("sweep_out"))
                            : out_override;
  fs::create_directories(out_dir);

  std::vector<ibvs::Scenario> scenarios;
  for (std::size_t i = 0; i < j["positions"].size(); ++i) {
    const auto& p = j["positions"][i];
    if (!p.is_array() || p.size() != 3) {
      throw ibvs::ParseError(fmt::format(
          "key `positions[{}]` must be an array of 3 numbers", i));
    }
    ibvs::Scenario sc = base;
    sc.name = fmt::format("{}_run{:02d}", base.name, i);
    sc.initial.position =
        ibvs::Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    if (seed_policy == "increment") {
      sc.noise.seed = base.noise.seed + i;
    } else if (seed_policy != "fixed") {
      throw ibvs::ParseError(
          "key `seed_policy` must be `fixed` or `increment`");
    }
    // Reject bad starts up front, naming the violated precondition.
    ibvs::validate_scenario(sc);
    scenarios.push_back(std::move(sc));
  }

  const std::size_t n = scenarios.size();
  std::vector<SweepRow> rows(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      SweepRow& row = rows[i];
      row.index = i;
      row.position = scenarios[i].initial.position;
      try {
        const ibvs::TrajectoryLog log = ibvs::run_scenario(scenarios[i]);
        ibvs::write_log_csv(
            log, (fs::path(out_dir) / (scenarios[i].name + ".csv")).string());
        const auto checks = run_all_checks(log, scenarios[i], cp);
        ibvs::write_report(
            checks,
            (fs::path(out_dir) / (scenarios[i].name + ".report")).string());
        row.pass = ibvs::all_pass(checks);
        if (scenarios[i].scene.window.has_value()) {
          try {
            ibvs::CrossingMargins margins;
            margins.edge_margin = cp.edge_margin;
            margins.max_dot_do = cp.max_dot_do;
            const auto cr = ibvs::check_crossing(
                log, scenarios[i].control.window.epsilon, margins);
            row.t_w = cr.t_w;
            row.t_lim = cr.t_lim;
            row.dot_do = cr.dot_do;
          } catch (const ibvs::Error&) {
          }
        }
        try {
          const auto lr = ibvs::check_landing(log, scenarios[i].scene.pad,
                                              cp.landing);
          row.terminal_lateral = lr.terminal_lateral;
        } catch (const ibvs::Error&) {
        }
      } catch (const std::exception& e) {
        row.pass = false;
        row.note = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::max(1, jobs);
  pool.reserve(n_threads);
  for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::size_t passed = 0;
  fmt::print("{:>4} {:>24} {:>8} {:>8} {:>10} {:>10} {:>6}\n", "run",
             "initial position", "t_w", "t_lim", "dot_d_o", "lat_err",
             "pass");
  std::string summary_csv =
      "run,xi0_x,xi0_y,xi0_z,t_w,t_lim,dot_do,terminal_lateral,pass\n";
  for (const SweepRow& r : rows) {
    passed += r.pass ? 1 : 0;
    fmt::print("{:>4} ({:>6.2f},{:>6.2f},{:>6.2f}) {:>8.3f} {:>8.3f} "
               "{:>10.4f} {:>10.4f} {:>6} {}\n",
               r.index, r.position.x(), r.position.y(), r.position.z(), r.t_w,
               r.t_lim, r.dot_do, r.terminal_lateral,
               r.pass ? "yes" : "NO", r.note);
    summary_csv += fmt::format("{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},"
                               "{:.9g},{}\n",
                               r.index, r.position.x(), r.position.y(),
                               r.position.z(), r.t_w, r.t_lim, r.dot_do,
                               r.terminal_lateral, r.pass ? 1 : 0);
  }
  std::ofstream summary(fs::path(out_dir) / "summary.csv");
  summary << summary_csv;
  fmt::print("sweep: {}/{} runs passed\n", passed, n);
  return passed == n ? kExitOk : kExitCheckFailed;
}

int cmd_validate_gains(const std::string& scenario_path, double r_w_override,
                       double window_delta, double landing_delta) {
  const ibvs::Scenario sc = ibvs::load_scenario(scenario_path);
  double r_w = r_w_override;
  if (r_w <= 0.0) {
    if (!sc.scene.window.has_value()) {
      throw ibvs::ParseError(
          "scenario has no window; pass --r-w to validate against a size");
    }
    r_w = std::min(sc.scene.window->width, sc.scene.window->height);
  }
  const ibvs::GainReport report = ibvs::validate_gains(
      sc.control.landing, sc.control.window, r_w, window_delta, landing_delta);
  for (const ibvs::GainCondition& c : report.conditions) {
    fmt::print("{} {} = {:.4g} {} {:.4g}\n", c.pass ? "PASS" : "FAIL", c.name,
               c.value, c.strict ? ">" : ">=", c.threshold);
  }
  return report.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_flow_oracle(int samples, double cap_deg, int trials,
                    std::uint64_t seed, double tolerance) {
  const double cap = cap_deg * std::numbers::pi / 180.0;
  const ibvs::FlowOracle oracle(cap);
  ibvs::Rng rng(seed);
  int within = 0;
  int improved = 0;
  for (int k = 0; k < trials; ++k) {
    ibvs::Vec3 v(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                 rng.uniform(-1.0, 1.0));
    const double d = rng.uniform(0.5, 3.0);
    const ibvs::UnitVec3 eta(ibvs::Vec3::UnitZ());
    const ibvs::Vec3 truth = v / d;
    const ibvs::Vec3 est = oracle.estimate(v, d, eta, samples, seed + 1000 + k);
    const ibvs::Vec3 est4 =
        oracle.estimate(v, d, eta, 4 * samples, seed + 2000 + k);
    const double err = (est - truth).norm() / truth.norm();
    const double err4 = (est4 - truth).norm() / truth.norm();
    if (err <= tolerance) ++within;
    if (err4 < err) ++improved;
    fmt::print(
        "trial {:2d}: n={} rel_err={:.4f} n={} rel_err={:.4f} {}\n", k,
        samples, err, 4 * samples, err4,
        err <= tolerance ? "PASS" : "FAIL");
  }
  fmt::print("flow oracle: {}/{} trials within {:.1f}% relative error; "
             "4x samples improved {}/{}\n",
             within, trials, 100.0 * tolerance, improved, trials);
  return within == trials ? kExitOk : kExitCheckFailed;
}

int cmd_check(const std::string& log_path, const std::string& scenario_path,
              const CheckParams& cp) {
  const ibvs::Scenario sc = ibvs::load_scenario(scenario_path);
  const ibvs::TrajectoryLog log = ibvs::read_log_csv(log_path);
  const std::vector<ibvs::Assertion> checks = run_all_checks(log, sc, cp);
  fmt::print("{}", ibvs::render_assertions(checks));
  return ibvs::all_pass(checks) ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Quadrotor window-crossing and visual-landing simulator and checker"};
  app.require_subcommand(1);

  CheckParams cp;

  std::string scenario_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool plots = false, no_checks = false, mode2_literal = false;
  CLI::App* run = app.add_subcommand("run", "run one scenario");
  run->add_option("scenario", scenario_path, "scenario JSON path")
      ->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override the scenario noise seed");
  run->add_flag("--plots", plots, "write SVG plots");
  run->add_flag("--no-checks", no_checks,
                "always exit 0; still write the report");
  run->add_flag("--mode2-literal", mode2_literal,
                "open-loop crossing without gravity compensation");
  run->add_option("--edge-margin", cp.edge_margin,
                  "required min d_e during the crossing");
  run->add_option("--max-dot-do", cp.max_dot_do,
                  "required upper bound on d(d_o)/dt at t_lim");
  run->add_option("--dl2-max", cp.landing.dl2_step,
                  "max allowed per-step L2 increase in mode 3");

  std::string sweep_path, sweep_out;
  int jobs = 1;
  CLI::App* sweep = app.add_subcommand("sweep", "run a batch of starts");
  sweep->add_option("spec", sweep_path, "sweep spec JSON path")->required();
  sweep->add_option("--out", sweep_out, "output directory override");
  sweep->add_option("--jobs", jobs, "number of concurrent runs");

  std::string vg_path;
  double r_w_override = 0.0, window_delta = 0.0, landing_delta = 0.0;
  CLI::App* vg = app.add_subcommand("validate-gains",
                                    "check the stability inequalities");
  vg->add_option("scenario", vg_path, "scenario JSON path")->required();
  vg->add_option("--r-w", r_w_override, "window size override");
  vg->add_option("--window-delta", window_delta,
                 "max |eta' Delta| (accel) for the window condition");
  vg->add_option("--landing-delta", landing_delta,
                 "max |eta' Delta| (accel) for the landing condition");

  int samples = 100000, trials = 10;
  double cap_deg = 30.0, tolerance = 0.02;
  std::uint64_t flow_seed = 7;
  CLI::App* flow = app.add_subcommand("flow-oracle",
                                      "Monte-Carlo flow estimator check");
  flow->add_option("--samples", samples, "rays per estimate");
  flow->add_option("--cap-deg", cap_deg, "cap half-angle in degrees");
  flow->add_option("--trials", trials, "number of random (v, d) pairs");
  flow->add_option("--seed", flow_seed, "RNG seed");
  flow->add_option("--tolerance", tolerance, "relative error bound");

  std::string check_log, check_scenario;
  CLI::App* check = app.add_subcommand("check", "re-check a written log");
  check->add_option("log", check_log, "trajectory CSV path")->required();
  check->add_option("--scenario", check_scenario,
                    "scenario JSON the log was produced from")
      ->required();
  check->add_option("--edge-margin", cp.edge_margin,
                    "required min d_e during the crossing");
  check->add_option("--max-dot-do", cp.max_dot_do,
                    "required upper bound on d(d_o)/dt at t_lim");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(scenario_path, out_dir, seed, plots, no_checks,
                     mode2_literal, cp);
    }
    if (sweep->parsed()) return cmd_sweep(sweep_path, sweep_out, jobs, cp);
    if (vg->parsed()) {
      return cmd_validate_gains(vg_path, r_w_override, window_delta,
                                landing_delta);
    }
    if (flow->parsed()) {
      return cmd_flow_oracle(samples, cap_deg, trials, flow_seed, tolerance);
    }
    if (check->parsed()) return cmd_check(check_log, check_scenario, cp);
  } catch (const ibvs::ParseError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitInputError;
  } catch (const ibvs::ScenarioInvalid& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitInputError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitCheckFailed;
  }
  return kExitInputError;
}
