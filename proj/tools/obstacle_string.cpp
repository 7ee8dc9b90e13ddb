// Command-line front end: run, sweep, refine, check-law, report.
//
// Exit status: 0 when every check passed, 1 when a check failed, 2 on error.

#include "obstacle/config_io.hpp"
#include "obstacle/diagnostics.hpp"
#include "obstacle/errors.hpp"
#include "obstacle/harness.hpp"
#include "obstacle/snapshot.hpp"
#include "obstacle/solver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace obstacle;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::vector<double> eps;
  std::vector<std::size_t> grid;
  std::string mode;
};

void add_common(CLI::App* app, Common& c, bool config_required = true) {
  auto* opt = app->add_option("--config", c.config, "configuration file");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory (default $OBSTACLE_STRING_OUT or ./out)");
  app->add_option("--eps", c.eps, "override epsilon (sweep: the epsilon list)");
  app->add_option("--grid", c.grid, "override cells (refine: the grid list)");
  app->add_option("--mode", c.mode, "override obstacle mode")->check(CLI::IsMember({"one", "two"}));
}

std::string out_dir(const Common& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("OBSTACLE_STRING_OUT"); env && *env) return env;
  return "out";
}

SimConfig load(const Common& c) {
  SimConfig cfg = load_config(c.config);
  if (c.eps.size() == 1) cfg.epsilon = c.eps.front();
  if (c.grid.size() == 1) cfg.cells = c.grid.front();
  if (!c.mode.empty()) cfg.mode = parse_mode(c.mode);
  cfg.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
}

bool print_check(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%-40s %s  %s\n", name.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  return pass;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

int print_report(const DiagnosticsReport& rep) {
  for (const auto& r : rep.rows) {
    if (std::isnan(r.tolerance)) std::printf("%-40s %-12s %s\n", r.diagnostic.c_str(), num(r.value).c_str(), "info");
    else
      std::printf("%-40s %-12s %s (tol %s)\n", r.diagnostic.c_str(), num(r.value).c_str(), r.pass ? "PASS" : "FAIL",
                  num(r.tolerance).c_str());
  }
  return rep.all_pass() ? 0 : 1;
}

int cmd_run(const Common& c) {
  const SimConfig cfg = load(c);
  const fs::path dir = out_dir(c);
  fs::create_directories(dir);
  const Trajectory traj = run(cfg);
  export_trajectory(traj, (dir / "trajectory").string());
  const auto rep = diagnose(traj);
  const std::string effective = emit_config(cfg);
  write_report((dir / "report.csv").string(), rep, effective);
  std::printf("steps %zu, records %zu, E(0) = %s, max wave speed %s%s\n", traj.steps, traj.records.size(),
              num(traj.energy.front().total()).c_str(), num(traj.max_wave_speed).c_str(),
              cfg.decoupled() ? " (decoupled viscosity/penalty)" : "");
  return print_report(rep);
}

template <class T>
bool strictly_decreasing(const std::vector<T>& x) {
  for (std::size_t k = 1; k < x.size(); ++k)
    if (!(x[k] < x[k - 1])) return false;
  return true;
}

int cmd_sweep(const Common& c) {
  Common base_opts = c;
  base_opts.eps.clear();
  SimConfig cfg = load(base_opts);
  std::vector<double> list = c.eps.empty() ? cfg.diagnostics.sweep_eps : c.eps;
  if (!c.eps.empty()) cfg.diagnostics.sweep_eps = c.eps;
  const fs::path dir = out_dir(c);
  fs::create_directories(dir);
  const auto rep = eps_sweep(cfg, list);
  write_text(dir / "sweep.csv", sweep_csv(rep, emit_config(cfg)));

  std::vector<double> u_l2, u_sup, gaps, defect;
  for (const auto& p : rep.pairs) {
    u_l2.push_back(p.u_l2);
    u_sup.push_back(p.u_sup);
    gaps.push_back(p.velocity_gap);
  }
  bool ok = true;
  for (const auto& m : rep.members) {
    defect.push_back(m.defect);
    std::printf("eps %-8s steps %-7zu viol_l2 %-10s penalty_l1 %-10s defect %-10s ss_ratio %-10s holder %-10s "
                "var_floor %s\n",
                num(m.epsilon).c_str(), m.steps, num(m.violation_l2).c_str(), num(m.penalty_l1).c_str(),
                num(m.defect).c_str(), num(m.serre_shearer.ratio).c_str(), num(m.holder_max).c_str(),
                num(m.variational_floor).c_str());
    ok &= print_check("member eps=" + num(m.epsilon) + " report", m.report.all_pass(), "");
  }
  ok &= print_check("pairwise u L2(K_T) decreasing", strictly_decreasing(u_l2), "");
  ok &= print_check("pairwise u sup decreasing", strictly_decreasing(u_sup), "");
  ok &= print_check("velocity norm gaps decreasing", strictly_decreasing(gaps), "");
  ok &= print_check("defect proxy decreasing", strictly_decreasing(defect), "");
  std::printf("violation rate %s (R^2 %s)\n", num(rep.violation_rate.slope).c_str(), num(rep.violation_rate.r2).c_str());
  return ok ? 0 : 1;
}

int cmd_refine(const Common& c) {
  Common base_opts = c;
  base_opts.grid.clear();
  SimConfig cfg = load(base_opts);
  std::vector<std::size_t> list = c.grid.empty() ? cfg.diagnostics.refine_cells : c.grid;
  if (!c.grid.empty()) cfg.diagnostics.refine_cells = c.grid;
  const fs::path dir = out_dir(c);
  fs::create_directories(dir);
  const auto rep = refinement_study(cfg, list);
  write_text(dir / "refine.csv", refinement_csv(rep, emit_config(cfg)));
  bool ok = true;
  for (std::size_t k = 0; k < rep.u_self.size(); ++k)
    std::printf("n %zu vs %zu: u %s  v %s\n", rep.cells[k], rep.cells[k + 1], num(rep.u_self[k]).c_str(),
                num(rep.v_self[k]).c_str());
  if (rep.has_exact) {
    for (std::size_t k = 0; k < rep.exact_linf.size(); ++k)
      std::printf("n %zu: exact L-inf error %s\n", rep.cells[k], num(rep.exact_linf[k]).c_str());
    double worst = 1e300;
    for (double o : rep.exact_orders) worst = std::min(worst, o);
    ok &= print_check("exact-error order >= 1.8", worst >= 1.8, "min order " + num(worst));
  } else {
    double worst = 1e300;
    bool zero = true;
    for (double d : rep.u_self) zero &= d == 0.0;
    for (double o : rep.u_self_orders) worst = std::min(worst, o);
    ok &= print_check("self-convergence order >= 1.5", zero || worst >= 1.5, "min order " + num(worst));
  }
  return ok ? 0 : 1;
}

int cmd_check_law(const Common& c, double lo, double hi, std::size_t samples, double q) {
  const SimConfig cfg = load(c);
  const auto law = cfg.law.build();
  const auto rep = verify_hypotheses(law, lo, hi, samples, q);
  const std::string text = "law " + law.describe() + "\n" + rep.to_text();
  std::cout << text;
  const fs::path dir = out_dir(c);
  fs::create_directories(dir);
  write_text(dir / "law.txt", text);
  for (const auto* h : {&rep.h1, &rep.h2, &rep.h3, &rep.h4})
    if (h->status == HypothesisStatus::Violated) return 1;
  return 0;
}

int cmd_report(const Common& c, const std::string& input) {
  const Trajectory traj = import_trajectory(input);
  SimConfig cfg = traj.config;
  if (!c.config.empty()) {
    // Only the diagnostics settings may differ from the run that produced the trajectory.
    cfg.diagnostics = load_config(c.config).diagnostics;
  }
  Trajectory t = traj;
  t.config = cfg;
  const fs::path dir = out_dir(c);
  fs::create_directories(dir);
  const auto rep = diagnose(t);
  write_report((dir / "report.csv").string(), rep, emit_config(cfg));
  return print_report(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalised obstacle string: simulation and verification"};
  app.require_subcommand(1);

  Common run_o, sweep_o, refine_o, law_o, report_o;
  auto* run_cmd = app.add_subcommand("run", "run one configuration, export the trajectory and a report");
  add_common(run_cmd, run_o);
  auto* sweep_cmd = app.add_subcommand("sweep", "epsilon sweep with pairwise convergence metrics");
  add_common(sweep_cmd, sweep_o);
  auto* refine_cmd = app.add_subcommand("refine", "grid refinement study");
  add_common(refine_cmd, refine_o);
  auto* law_cmd = app.add_subcommand("check-law", "audit the stress law hypotheses");
  add_common(law_cmd, law_o);
  double lo = -3.0, hi = 3.0, q = 1.0;
  std::size_t samples = 2001;
  law_cmd->add_option("--lo", lo, "lower end of the strain window");
  law_cmd->add_option("--hi", hi, "upper end of the strain window");
  law_cmd->add_option("--samples", samples, "number of samples");
  law_cmd->add_option("--q", q, "growth exponent q > 1/2");
  auto* report_cmd = app.add_subcommand("report", "diagnose a stored trajectory");
  add_common(report_cmd, report_o, false);
  std::string input;
  report_cmd->add_option("--input", input, "trajectory directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return cmd_run(run_o);
    if (*sweep_cmd) return cmd_sweep(sweep_o);
    if (*refine_cmd) return cmd_refine(refine_o);
    if (*law_cmd) return cmd_check_law(law_o, lo, hi, samples, q);
    if (*report_cmd) return cmd_report(report_o, input);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error%s%s: %s\n", e.key().empty() ? "" : " in ", e.key().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
