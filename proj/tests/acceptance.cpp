// Acceptance suite: one pass/fail line per criterion, exit code = number
// of failed criteria.  Every tolerance is fixed here, in code.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "projection_oracle.hpp"
#include "psweep/diagnostics.hpp"
#include "psweep/errors.hpp"
#include "psweep/io.hpp"
#include "psweep/mollify.hpp"
#include "psweep/rng.hpp"
#include "psweep/scalar_sweep.hpp"
#include "psweep/scenario.hpp"
#include "psweep/subsolvers.hpp"

using namespace psweep;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("%s  [%02d] %-28s %s\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fixture(const std::string& name) {
  return std::string(PSWEEP_SCENARIO_DIR) + "/" + name;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

std::vector<Grid> spec_grids() {
  return {Grid(4, 4, 4, 0.25, 0.25, 0.25, {Face::XMin}),
          Grid(8, 8, 8, 0.125, 0.125, 0.125, {Face::XMin, Face::YMin}),
          Grid(5, 7, 3, 0.2, 0.15, 0.3, {Face::ZMin}),
          Grid(16, 4, 1, 0.0625, 0.25, 1.0, {Face::XMin, Face::XMax})};
}

// 1. discrete Gauss-Green within 1e-12 relative, 100 pairs per grid,
//    under 10 seconds
void criterion_gauss_green() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (const Grid& g : spec_grids()) {
    for (int it = 0; it < 100; ++it) {
      const VectorField z = random_vector_field(g, rng, 1.0);
      const TensorField tau = random_tensor_field(g, rng, 1.0);
      const double a = dot_l2(strain(z), tau);
      const double b = dot_l2(divergence(tau), z);
      worst = std::max(
          worst, std::abs(a + b) / std::max(std::abs(a) + std::abs(b), 1e-30));
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  report(1, "gauss-green", worst <= 1e-12 && secs < 10.0,
         fmt("worst relative %.3e (tol 1e-12), %.2f s (< 10 s)", worst, secs));
}

// 2. Korn bound for 1000 random masked fields, 1e-12 relative
void criterion_korn() {
  Rng rng(1002);
  const auto grids = spec_grids();
  double worst = -1.0;
  for (int it = 0; it < 1000; ++it) {
    const Grid& g = grids[size_t(it) % grids.size()];
    const VectorField z = random_vector_field(g, rng, 1.0);
    const double lhs = norm_l2(strain(z));
    const double rhs = norm_grad(z);
    if (rhs > 0.0) worst = std::max(worst, (lhs - rhs) / rhs);
  }
  report(2, "korn-bound", worst <= 1e-12,
         fmt("worst relative excess %.3e (tol 1e-12)", worst));
}

// 3. projection laws and the brute-force oracle
void criterion_projection() {
  Rng rng(1003);
  bool idempotent = true;
  double worst_nonexp = 0.0, worst_member = 0.0, worst_oracle = 0.0;
  for (int it = 0; it < 1000; ++it) {
    SymTensor3 a, b;
    for (int c = 0; c < 6; ++c) {
      a[c] = rng.uniform(-4, 4);
      b[c] = rng.uniform(-4, 4);
    }
    const double g = rng.uniform(0.05, 3.0);
    const SymTensor3 pa = project_deviatoric_ball(a, g);
    const SymTensor3 pb = project_deviatoric_ball(b, g);
    idempotent = idempotent && project_deviatoric_ball(pa, g) == pa;
    worst_member = std::max(worst_member, deviatoric_ball_violation(pa, g));
    const double den = frobenius_norm(a - b);
    if (den > 0)
      worst_nonexp =
          std::max(worst_nonexp, (frobenius_norm(pa - pb) - den) / den);
  }
  for (int it = 0; it < 50; ++it) {
    SymTensor3 a;
    for (int c = 0; c < 6; ++c) a[c] = rng.uniform(-3, 3);
    const double g = rng.uniform(0.1, 2.0);
    worst_oracle = std::max(
        worst_oracle, frobenius_norm(project_deviatoric_ball(a, g) -
                                     psweep::testing::brute_force_project(a, g)));
  }
  const bool pass = idempotent && worst_nonexp <= 1e-12 &&
                    worst_member <= 1e-12 && worst_oracle <= 1e-6;
  report(3, "projection-laws", pass,
         fmt("idempotent=%s nonexpansive-excess %.1e membership %.1e "
             "oracle-gap %.2e (tol 1e-6)",
             idempotent ? "exact" : "BROKEN", worst_nonexp, worst_member,
             worst_oracle));
}

// 4. 0D sweeping accuracy against the exact stop operator
void criterion_sweeping_accuracy() {
  const std::vector<double> dts = {1e-2, 5e-3, 2.5e-3};
  bool pass = true;
  double worst_ratio = 0.0, min_order = 1e300;
  for (const ScalarSweepProblem& p :
       {oracle_drive_to_boundary(), oracle_shrinking_radius()}) {
    const SweepAccuracyReport rep = sweep_accuracy_study(p, dts);
    for (const auto& row : rep.rows) {
      pass = pass && row.sup_error <= 2.0 * row.dt;
      worst_ratio = std::max(worst_ratio, row.sup_error / row.dt);
    }
    pass = pass && rep.min_order >= 0.9;
    min_order = std::min(min_order, rep.min_order);
  }
  report(4, "0d-sweeping-accuracy", pass,
         fmt("sup_err/dt <= %.3f (tol 2), min order %.3f (tol 0.9)",
             worst_ratio, min_order));
}

// 5. shrink transport lands in K(t); condition-(H) slacks nonnegative on
//    every shipped scenario satisfying (A3)-(A5)
void criterion_condition_h() {
  const Scenario ms = parse_scenario(fixture("moving_shift.ini"));
  const CoupledProblem pb = ms.make_problem();
  Rng rng(1005);
  double worst_violation = 0.0;
  int transported = 0;
  for (int it = 0; it < 500; ++it) {
    const double s = rng.uniform(0.0, ms.T * 0.9);
    const double t = s + rng.uniform(0.0, ms.T - s);
    const TensorField tau =
        pb.constraint.project(random_tensor_field(pb.grid, rng, 1.2), s);
    const auto res = pb.constraint.shrink_transport(tau, s, t);
    worst_violation = std::max(
        worst_violation,
        pb.constraint.membership(res.tau, t, 0.0).max_violation);
    ++transported;
  }

  bool slacks_ok = true;
  std::string worst_scenario;
  double worst_slack = 1e300;
  for (const char* name : {"reference.ini", "reference_sweeping.ini",
                           "zero_data.ini", "zero_drive.ini",
                           "moving_shift.ini"}) {
    const Scenario s = parse_scenario(fixture(name));
    const CoupledProblem spb = s.make_problem();
    const ConditionHRegime regime = s.regime == Regime::Regularized
                                        ? ConditionHRegime::Regularized
                                        : ConditionHRegime::Indicator;
    const ConditionHStudy study = run_condition_h_study(
        spb.constraint, s.T, regime, spb.kappa, 5, 20, 1005 + s.seed);
    const double slack =
        std::min(study.report.worst_h1_slack, study.report.worst_h2_slack);
    if (slack < worst_slack) {
      worst_slack = slack;
      worst_scenario = name;
    }
    slacks_ok = slacks_ok && study.report.pass;
  }
  const bool pass = worst_violation <= 1e-12 && transported == 500 && slacks_ok;
  report(5, "shrink-and-condition-h", pass,
         fmt("500 transports, worst violation %.2e (tol 1e-12); worst slack "
             "%.2e on %s (tol 0)",
             worst_violation, worst_slack, worst_scenario.c_str()));
}

// 6. contraction of the composed map under the window rules, and
//    geometrically decreasing Picard increments
void criterion_contraction() {
  bool pass = true;
  std::string detail;
  // the window rule must contract on every shipped scenario
  double worst_any = 0.0;
  for (const char* name :
       {"reference.ini", "reference_sweeping.ini", "zero_data.ini",
        "zero_drive.ini", "kink_threshold.ini", "moving_shift.ini"}) {
    Scenario s = parse_scenario(fixture(name));
    s.safety = 0.5;
    const CoupledProblem pb = s.make_problem();
    const ContractionReport rep = measure_contraction(pb, 5, 1006);
    for (const auto& probe : rep.probes) {
      pass = pass && !probe.skipped && probe.measured < 1.0;
      worst_any = std::max(worst_any, probe.measured);
    }
  }
  detail = fmt("worst ratio %.3f < 1 across 6 scenarios x 5 probes; ",
               worst_any);

  for (const char* name : {"reference.ini", "reference_sweeping.ini"}) {
    Scenario s = parse_scenario(fixture(name));
    s.safety = 0.5;
    const Trajectory traj = march(s.make_problem());
    for (const auto& window : traj.picard_distances)
      for (size_t i = 1; i < window.size(); ++i)
        if (window[i - 1] > 1e-14) pass = pass && window[i] < window[i - 1];
  }
  report(6, "contraction-window-rules", pass,
         detail + "picard increments decreasing");
}

// 7. variational-inequality residuals of marched trajectories
void criterion_vi_residuals() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"reference.ini", "reference_sweeping.ini"}) {
    const Scenario s = parse_scenario(fixture(name));
    const CoupledProblem pb = s.make_problem();
    const Trajectory traj = march(pb);
    const ResidualReport strong = vi_residual(traj, pb, 50, 1007);
    const ResidualReport weak = weak_vi_residual(traj, pb, 20, 1007);
    pass = pass && strong.feasible && strong.min_slack >= -1e-8 &&
           weak.min_slack >= -1e-6;
    detail += fmt("%s: strong %.1e / weak %.1e; ",
                  s.regime == Regime::Regularized ? "regularized" : "sweeping",
                  strong.min_slack, weak.min_slack);
  }
  report(7, "vi-residuals", pass,
         detail + "(tol -1e-8 strong, -1e-6 weak)");
}

// 8. energy-estimate echoes: kappa-independent band, zero-data run,
//    zero-drive decay
void criterion_energy() {
  std::vector<double> band;
  for (double kappa : {1.0, 0.1, 0.01}) {
    Scenario s = parse_scenario(fixture("reference.ini"));
    s.kappa = kappa;
    s.dt = 0.0025;  // resolves the kappa = 0.01 contraction window
    const CoupledProblem pb = s.make_problem();
    const Trajectory traj = march(pb);
    double lhs = 0.0;
    for (const auto& r : traj.records)
      lhs = std::max(lhs, r.energy_lhs);
    band.push_back(lhs);
  }
  const double mx = *std::max_element(band.begin(), band.end());
  const double mn = *std::min_element(band.begin(), band.end());
  const bool band_ok = mx <= 2.0 * mn;

  const Scenario zd = parse_scenario(fixture("zero_data.ini"));
  const Trajectory zt = march(zd.make_problem());
  bool zeros_ok = true;
  for (const auto& r : zt.records)
    zeros_ok = zeros_ok && r.norm_v_H == 0.0 && r.norm_sigma_H == 0.0;

  const Scenario dr = parse_scenario(fixture("zero_drive.ini"));
  const Trajectory dt_traj = march(dr.make_problem());
  bool decay_ok = true;
  for (size_t k = 1; k < dt_traj.records.size(); ++k)
    decay_ok = decay_ok && dt_traj.records[k].norm_sigma_H <=
                               dt_traj.records[k - 1].norm_sigma_H + 1e-10;

  report(8, "energy-echoes", band_ok && zeros_ok && decay_ok,
         fmt("kappa band %.3f..%.3f (factor %.2f <= 2), zero-data %s, "
             "zero-drive decay %s",
             mn, mx, mx / mn, zeros_ok ? "zero" : "NONZERO",
             decay_ok ? "monotone" : "BROKEN"));
}

// 9. mollified-threshold pipeline on the kink scenario
void criterion_mollification() {
  const Scenario s = parse_scenario(fixture("kink_threshold.ini"));
  const CoupledProblem pb = s.make_problem();
  MollificationPlan plan;
  plan.base = s.make_threshold();
  plan.indices = {4, 8, 16, 32};
  plan.w0 = 0.25;
  plan.horizon = s.T;

  bool validations_ok = true, feasible_ok = true;
  for (int n : plan.indices) {
    const ThresholdField gn = mollify_threshold(plan, n);
    validations_ok = validations_ok && gn.c1 == plan.base.c1 &&
                     gn.c2 == plan.base.c2 &&
                     validate_threshold(gn, pb.grid, 0.0, s.T, 33).pass;
    const auto sh =
        shrink_initial(pb.sigma0, plan.base, gn, pb.constraint.shift(), pb.grid);
    const ConstraintSet gn_set(gn, pb.constraint.shift(), pb.grid);
    feasible_ok = feasible_ok &&
                  gn_set.membership(sh.sigma0n, 0.0, 1e-12).feasible;
  }

  const CauchyReport rep = cauchy_study(pb, plan);
  bool decreasing = true;
  for (size_t i = 0; i + 2 < rep.rows.size(); ++i)
    decreasing = decreasing && rep.rows[i + 1].d_n < rep.rows[i].d_n;
  // regression pin on the shipped scenario, not a literature value
  decreasing = decreasing && rep.rows[rep.rows.size() - 2].d_n <= 1e-3;

  report(9, "mollification-pipeline",
         validations_ok && feasible_ok && decreasing,
         fmt("d(n) = %.2e, %.2e, %.2e strictly decreasing; bounds kept %s; "
             "initial data feasible %s",
             rep.rows[0].d_n, rep.rows[1].d_n, rep.rows[2].d_n,
             validations_ok ? "yes" : "NO", feasible_ok ? "yes" : "NO"));
}

// 10. determinism and first-order step refinement
void criterion_determinism_refinement() {
  const Scenario s = parse_scenario(fixture("reference.ini"));
  const CoupledProblem pb = s.make_problem();
  const std::string csv_a = trajectory_csv_string(march(pb));
  const std::string csv_b = trajectory_csv_string(march(pb));
  const bool deterministic = csv_a == csv_b && !csv_a.empty();

  const RefinementReport rep = refinement_study(pb);
  // pinned first-order constant for the reference scenario (measured
  // 1.89/1.95) and stability across the halving
  const double C_pin = 4.0;
  const bool refine_ok = rep.D1 <= C_pin * rep.dt &&
                         rep.D2 <= C_pin * rep.dt / 2.0 &&
                         rep.C2 <= 1.5 * rep.C1;
  report(10, "determinism-refinement", deterministic && refine_ok,
         fmt("byte-identical %s; D(dt)=%.3e<=%.1f*dt, C1=%.2f C2=%.2f "
             "(stability 1.5)",
             deterministic ? "yes" : "NO", rep.D1, C_pin, rep.C1, rep.C2));
}

}  // namespace

int main() {
  std::printf("acceptance suite (grids <= 16^3, horizons <= 1)\n");
  criterion_gauss_green();
  criterion_korn();
  criterion_projection();
  criterion_sweeping_accuracy();
  criterion_condition_h();
  criterion_contraction();
  criterion_vi_residuals();
  criterion_energy();
  criterion_mollification();
  criterion_determinism_refinement();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
