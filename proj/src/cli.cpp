#include "psweep/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "psweep/diagnostics.hpp"
#include "psweep/errors.hpp"
#include "psweep/io.hpp"
#include "psweep/mollify.hpp"
#include "psweep/scalar_sweep.hpp"
#include "psweep/scenario.hpp"

namespace psweep {

namespace {

using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitAssumption = 2;
constexpr int kExitSolver = 3;
constexpr int kExitAcceptance = 4;

struct CommonOptions {
  std::string scenario_path;
  double dt_override = 0.0;
  long long seed_override = -1;
  std::string out_override;
  std::string snapshots_override;
  double safety_override = 0.0;
  std::string regime_override;
  bool project_initial = false;
  bool diagnostics = false;
};

void add_scenario_options(CLI::App* cmd, CommonOptions& opt,
                          bool scenario_required) {
  auto* s = cmd->add_option("--scenario,scenario", opt.scenario_path,
                            "scenario file path");
  if (scenario_required) s->required();
  cmd->add_option("--dt", opt.dt_override, "override the time step");
  cmd->add_option("--seed", opt.seed_override, "override the random seed");
  cmd->add_option("--out", opt.out_override, "override the output directory");
  cmd->add_option("--snapshots", opt.snapshots_override,
                  "snapshot policy: none or vtk");
  cmd->add_option("--safety", opt.safety_override,
                  "override the window safety factor");
  cmd->add_option("--regime", opt.regime_override,
                  "override the regime: regularized or sweeping");
  cmd->add_flag("--project-initial", opt.project_initial,
                "project an infeasible sigma0 onto K(0) instead of failing");
  cmd->add_flag("--diagnostics", opt.diagnostics,
                "also write residual and energy reports for the trajectory");
}

Scenario load_scenario(const CommonOptions& opt) {
  Scenario s = parse_scenario(opt.scenario_path);
  if (opt.dt_override > 0.0) s.dt = opt.dt_override;
  if (opt.seed_override >= 0) s.seed = (unsigned long long)opt.seed_override;
  if (!opt.out_override.empty()) s.out_dir = opt.out_override;
  if (!opt.snapshots_override.empty()) s.snapshots = opt.snapshots_override;
  if (opt.safety_override > 0.0) s.safety = opt.safety_override;
  if (!opt.regime_override.empty()) {
    if (opt.regime_override == "regularized") s.regime = Regime::Regularized;
    else if (opt.regime_override == "sweeping") {
      s.regime = Regime::Sweeping;
      s.kappa = 0.0;
    } else
      throw ParseError("unknown regime override '" + opt.regime_override + "'");
  }
  return s;
}

int cmd_run(const CommonOptions& opt) {
  const Scenario s = load_scenario(opt);
  const CoupledProblem pb = s.make_problem(opt.project_initial);
  const Trajectory traj = march(pb);

  std::filesystem::create_directories(s.out_dir);
  write_trajectory_csv(traj, s.out_dir + "/trajectory.csv", s.cadence);
  if (s.snapshots == "vtk") {
    for (size_t k = 0; k < traj.times.size(); k += size_t(std::max(1, s.cadence))) {
      char name[64];
      std::snprintf(name, sizeof name, "/snapshot_%06zu.vtk", k);
      write_snapshot_vtk(traj.v[k], traj.sigma[k], traj.times[k],
                         s.out_dir + name);
    }
  }

  double worst_violation = 0.0;
  int max_picard = 0;
  for (const auto& r : traj.records) {
    worst_violation = std::max(worst_violation, r.max_violation);
    max_picard = std::max(max_picard, r.picard_iters);
  }
  const bool feasible = worst_violation <= 1e-10;
  bool residuals_ok = true;

  json summary;
  if (opt.diagnostics) {
    const ResidualReport strong = vi_residual(traj, pb, 50, s.seed + 101);
    const ResidualReport weak = weak_vi_residual(traj, pb, 20, s.seed + 102);
    const EnergyReport energy = energy_report(traj, pb);
    write_text_file(s.out_dir + "/residuals.csv",
                    residuals_csv(traj, strong, weak));
    write_text_file(s.out_dir + "/energy.csv", energy_csv(traj, energy));
    residuals_ok = strong.min_slack >= -1e-8 && weak.min_slack >= -1e-6;
    summary["checks"]["vi_min_slack"] = strong.min_slack;
    summary["checks"]["wvi_min_slack"] = weak.min_slack;
    summary["checks"]["residuals_within_tolerance"] = residuals_ok;
    summary["energy"]["M_sigma"] = energy.M_sigma;
    summary["energy"]["M_dsigma"] = energy.M_dsigma;
    summary["energy"]["M_v"] = energy.M_v;
  }
  summary["scenario"] = opt.scenario_path;
  summary["seed"] = s.seed;
  summary["regime"] =
      s.regime == Regime::Regularized ? "regularized" : "sweeping";
  summary["steps"] = traj.records.size() - 1;
  summary["windows"] = traj.windows;
  summary["final_t"] = traj.times.back();
  summary["max_violation"] = worst_violation;
  summary["max_picard_iters"] = max_picard;
  summary["final_norm_sigma_H"] = traj.records.back().norm_sigma_H;
  summary["final_norm_v_H"] = traj.records.back().norm_v_H;
  summary["checks"]["feasible_at_recorded_times"] = feasible;
  write_text_file(s.out_dir + "/summary.json", summary.dump(2) + "\n");

  std::cout << "run: " << traj.records.size() - 1 << " steps in "
            << traj.windows << " windows, max violation " << worst_violation
            << ", outputs in " << s.out_dir << "\n";
  return feasible && residuals_ok ? kExitPass : kExitAcceptance;
}

int cmd_verify(unsigned long long seed, const std::string& out_dir) {
  const std::vector<Grid> grids = {
      Grid(4, 4, 4, 0.25, 0.25, 0.25, {Face::XMin}),
      Grid(8, 8, 8, 0.125, 0.125, 0.125, {Face::XMin, Face::YMin}),
      Grid(5, 7, 3, 0.2, 0.15, 0.3, {Face::ZMin}),
      Grid(16, 4, 1, 0.0625, 0.25, 1.0, {Face::XMin, Face::XMax})};
  const SuiteReport rep = invariant_suite(grids, seed);
  for (const auto& chk : rep.checks)
    std::cout << (chk.pass ? "pass" : "FAIL") << "  " << chk.name << " ["
              << chk.instance << "] worst " << chk.worst << " tol "
              << chk.tolerance << "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    json j;
    j["suite"] = "invariants";
    j["pass"] = rep.pass;
    for (const auto& chk : rep.checks)
      j["checks"].push_back({{"name", chk.name},
                             {"pass", chk.pass},
                             {"worst", chk.worst},
                             {"tolerance", chk.tolerance},
                             {"instance", chk.instance}});
    write_text_file(out_dir + "/invariants.json", j.dump(2) + "\n");
  }
  std::cout << (rep.pass ? "verify: all invariants hold\n"
                         : "verify: FAILURES present\n");
  return rep.pass ? kExitPass : kExitAcceptance;
}

int cmd_condition_h(const CommonOptions& opt) {
  const Scenario s = load_scenario(opt);
  const CoupledProblem pb = s.make_problem(opt.project_initial);
  const ConditionHRegime regime = s.regime == Regime::Regularized
                                      ? ConditionHRegime::Regularized
                                      : ConditionHRegime::Indicator;
  const ConditionHStudy study = run_condition_h_study(
      pb.constraint, s.T, regime, pb.kappa, 5, 20, s.seed + 17);
  std::cout << "condition-h: " << study.report.checked << " checks, worst (H1) slack "
            << study.report.worst_h1_slack << ", worst (H2) slack "
            << study.report.worst_h2_slack << "\n";
  return study.report.pass ? kExitPass : kExitAcceptance;
}

int cmd_convergence(const CommonOptions& opt) {
  const Scenario s = load_scenario(opt);
  const CoupledProblem pb = s.make_problem(opt.project_initial);
  bool pass = true;

  const RefinementReport ref = refinement_study(pb);
  std::cout << "refinement: D(dt)=" << ref.D1 << " D(dt/2)=" << ref.D2
            << "  C1=" << ref.C1 << " C2=" << ref.C2
            << "  order=" << ref.order << "\n";
  if (!(ref.C2 <= 3.0 * ref.C1 + 1e-12)) {
    std::cout << "refinement: first-order constant is not stable\n";
    pass = false;
  }

  if (s.threshold_tag == Regularity::Continuous) {
    MollificationPlan plan;
    plan.base = s.make_threshold();
    plan.indices = {4, 8, 16, 32};
    plan.w0 = 0.25 * s.T;
    plan.horizon = s.T;
    const CauchyReport rep = cauchy_study(pb, plan);
    for (const auto& row : rep.rows)
      std::cout << "cauchy: n=" << row.n << " sup|g_n-g|=" << row.sup_g_gap
                << " d(n)=" << row.d_n << " runtime=" << row.runtime_seconds
                << "s\n";
    std::filesystem::create_directories(s.out_dir);
    write_text_file(s.out_dir + "/cauchy.csv", cauchy_report_csv(rep));
    pass = pass && rep.gaps_nonincreasing && rep.final_feasible_for_base;
  }
  return pass ? kExitPass : kExitAcceptance;
}

int cmd_oracle(const std::string& dt_list, const std::string& out_dir) {
  std::vector<double> dts;
  std::istringstream in(dt_list);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      dts.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ParseError("oracle: bad step '" + tok + "' in --dt list");
    }
  }
  if (dts.empty()) dts = {1e-2, 5e-3, 2.5e-3};

  bool pass = true;
  for (const auto& [name, problem] :
       {std::pair<std::string, ScalarSweepProblem>{"drive-to-boundary",
                                                   oracle_drive_to_boundary()},
        {"shrinking-radius", oracle_shrinking_radius()}}) {
    const SweepAccuracyReport rep = sweep_accuracy_study(problem, dts);
    std::cout << "oracle " << name << ":";
    for (const auto& row : rep.rows) {
      std::cout << "  dt=" << row.dt << " sup_err=" << row.sup_error;
      pass = pass && row.sup_error <= 2.0 * row.dt;
    }
    std::cout << "  order>=" << rep.min_order << "\n";
    if (rep.rows.size() > 1 && rep.min_order < 0.9) pass = false;
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      write_text_file(out_dir + "/oracle_" + name + ".csv",
                      scalar_trajectory_csv(stop_operator_exact(problem)));
    }
  }
  std::cout << (pass ? "oracle: accuracy and order targets met\n"
                     : "oracle: FAILED accuracy or order target\n");
  return pass ? kExitPass : kExitAcceptance;
}

int cmd_contraction(const CommonOptions& opt) {
  const Scenario s = load_scenario(opt);
  const CoupledProblem pb = s.make_problem(opt.project_initial);
  const ContractionReport rep = measure_contraction(pb, 5, s.seed + 29);
  std::cout << "contraction: window " << rep.T0 << " (" << rep.steps
            << " steps), predicted bound " << rep.predicted << "\n";
  bool pass = true;
  for (size_t i = 0; i < rep.probes.size(); ++i) {
    if (rep.probes[i].skipped) {
      std::cout << "  probe " << i << ": skipped (identical trajectories)\n";
      continue;
    }
    std::cout << "  probe " << i << ": measured " << rep.probes[i].measured
              << "\n";
    pass = pass && rep.probes[i].measured < 1.0;
  }
  return pass ? kExitPass : kExitAcceptance;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"coupled velocity-stress solver for perfect plasticity with a "
               "moving yield threshold"};
  app.require_subcommand(1);

  CommonOptions opt;
  unsigned long long verify_seed = 20240901ULL;
  std::string verify_out;
  std::string oracle_dts = "1e-2,5e-3,2.5e-3";
  std::string oracle_out;

  auto* run = app.add_subcommand("run", "integrate a scenario and write the trajectory");
  add_scenario_options(run, opt, true);
  auto* verify = app.add_subcommand("verify", "run the structural invariant suite");
  verify->add_option("--seed", verify_seed, "random seed");
  verify->add_option("--out", verify_out, "directory for the JSON report");
  auto* cond = app.add_subcommand("condition-h", "check the (H1)/(H2) transport bounds");
  add_scenario_options(cond, opt, true);
  auto* conv = app.add_subcommand("convergence", "step refinement and mollified-threshold study");
  add_scenario_options(conv, opt, true);
  auto* oracle = app.add_subcommand("oracle", "0D sweeping accuracy against the exact stop operator");
  oracle->add_option("--dt", oracle_dts, "comma-separated step list");
  oracle->add_option("--out", oracle_out, "directory for exact-trajectory CSVs");
  auto* contraction = app.add_subcommand("contraction", "measure the Lipschitz ratio of the coupled map");
  add_scenario_options(contraction, opt, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return cmd_run(opt);
    if (verify->parsed()) return cmd_verify(verify_seed, verify_out);
    if (cond->parsed()) return cmd_condition_h(opt);
    if (conv->parsed()) return cmd_convergence(opt);
    if (oracle->parsed()) return cmd_oracle(oracle_dts, oracle_out);
    if (contraction->parsed()) return cmd_contraction(opt);
  } catch (const AssumptionViolation& e) {
    std::cerr << "assumption violation: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const ThresholdViolation& e) {
    std::cerr << "threshold violation: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const MissingDerivative& e) {
    std::cerr << "missing derivative: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitPass;
}

}  // namespace psweep
