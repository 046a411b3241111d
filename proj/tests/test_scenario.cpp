#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "psweep/cli.hpp"
#include "psweep/errors.hpp"
#include "psweep/expression.hpp"
#include "psweep/io.hpp"
#include "psweep/scenario.hpp"

using namespace psweep;

namespace {

std::string fixture(const std::string& name) {
  return std::string(PSWEEP_SCENARIO_DIR) + "/" + name;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("expression evaluator") {
  CHECK(Expr::parse("1 + 2*3").eval(0, 0, 0, 0) == doctest::Approx(7.0));
  CHECK(Expr::parse("-t + x1*x2 - x3/2").eval(1, 2, 3, 4) ==
        doctest::Approx(-1 + 6 - 2));
  CHECK(Expr::parse("sin(0) + cos(0) + exp(0)").eval(0, 0, 0, 0) ==
        doctest::Approx(2.0));
  CHECK(Expr::parse("abs(-3.5)").eval(0, 0, 0, 0) == doctest::Approx(3.5));
  CHECK(Expr::parse("min(2, max(t, 1))").eval(5, 0, 0, 0) ==
        doctest::Approx(2.0));
  CHECK(Expr::parse("2*pi").eval(0, 0, 0, 0) ==
        doctest::Approx(6.283185307179586));
  CHECK(Expr::parse("(1+2)*(3-1)").eval(0, 0, 0, 0) == doctest::Approx(6.0));
  CHECK_THROWS_AS(Expr::parse("1 +"), ParseError);
  CHECK_THROWS_AS(Expr::parse("foo(2)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("min(1)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("(1"), ParseError);
}

TEST_CASE("shipped reference scenario parses and validates") {
  const Scenario s = parse_scenario(fixture("reference.ini"));
  CHECK(s.regime == Regime::Regularized);
  CHECK(s.nx == 4);
  CHECK(s.T == doctest::Approx(0.2));
  CHECK(s.c1 == doctest::Approx(1.0));
  const auto violations = s.validate();
  for (const auto& v : violations) INFO(v);
  CHECK(violations.empty());
}

TEST_CASE("every shipped fixture parses, validates and round-trips") {
  for (const char* name :
       {"reference.ini", "reference_sweeping.ini", "zero_data.ini",
        "zero_drive.ini", "kink_threshold.ini", "moving_shift.ini"}) {
    INFO(name);
    const Scenario s = parse_scenario(fixture(name));
    CHECK(s.validate().empty());
    // round-trip: parse(write(s)) reproduces the same serialized form
    const std::string text = write_scenario(s);
    const Scenario s2 = parse_scenario_string(text);
    CHECK(write_scenario(s2) == text);
  }
}

TEST_CASE("infeasible initial stress is reported against (A2)") {
  Scenario s = parse_scenario(fixture("reference.ini"));
  s.sigma0_exprs[0] = Expr::parse("10");
  s.sigma0_exprs[1] = Expr::parse("-5");
  s.sigma0_exprs[2] = Expr::parse("-5");
  const auto violations = s.validate();
  bool found = false;
  for (const auto& v : violations)
    found = found || (v.find("(A2)") != std::string::npos &&
                      v.find("violates K(0)") != std::string::npos);
  CHECK(found);
  CHECK_THROWS_AS(s.make_problem(), AssumptionViolation);
  // the documented repair flag projects instead of failing
  const CoupledProblem pb = s.make_problem(true);
  CHECK(pb.constraint.membership(pb.sigma0, 0.0, 1e-10).feasible);
}

TEST_CASE("sweeping regime rejects a merely continuous threshold citing (A4)") {
  Scenario s = parse_scenario(fixture("kink_threshold.ini"));
  s.regime = Regime::Sweeping;
  s.kappa = 0.0;
  const auto violations = s.validate();
  bool found = false;
  for (const auto& v : violations)
    found = found || v.find("(A4)") != std::string::npos;
  CHECK(found);
}

TEST_CASE("threshold violating its certified bounds is caught as (A5)") {
  Scenario s = parse_scenario(fixture("reference.ini"));
  s.threshold_expr = Expr::parse("0.5 - t");  // dips through zero
  s.threshold_derivative = Expr::parse("-1");
  const auto violations = s.validate();
  bool found = false;
  for (const auto& v : violations)
    found = found || v.find("(A5)") != std::string::npos;
  CHECK(found);
}

TEST_CASE("kappa outside (0,1] violates the regularized definition") {
  Scenario s = parse_scenario(fixture("reference.ini"));
  s.kappa = 2.0;
  CHECK_FALSE(s.validate().empty());
  s.kappa = 0.0;
  CHECK_FALSE(s.validate().empty());
}

TEST_CASE("table thresholds interpolate linearly in time") {
  const std::string table = "/tmp/psweep_test_table.csv";
  write_text_file(table, "0.0,1.0\n0.5,1.4\n1.0,1.2\n");
  Scenario s = parse_scenario(fixture("reference.ini"));
  s.threshold_kind = Scenario::ThresholdKind::Table;
  s.threshold_table = table;
  s.c1 = 0.9;
  s.c2 = 1.5;
  const ThresholdField f = s.make_threshold();
  CHECK(f.g(0.25, 0, 0, 0) == doctest::Approx(1.2));
  CHECK(f.g(0.75, 0, 0, 0) == doctest::Approx(1.3));
  CHECK(f.dgdt(0.25, 0, 0, 0) == doctest::Approx(0.8));
  CHECK(f.dgdt(0.75, 0, 0, 0) == doctest::Approx(-0.4));
  std::remove(table.c_str());
}

TEST_CASE("table threshold scenarios round-trip through the writer") {
  const std::string table = "/tmp/psweep_test_table_rt.csv";
  write_text_file(table, "0.0,1.2\n1.0,1.4\n");
  Scenario s = parse_scenario(fixture("reference.ini"));
  s.threshold_kind = Scenario::ThresholdKind::Table;
  s.threshold_table = table;
  s.c1 = 1.0;
  s.c2 = 1.5;
  const std::string text = write_scenario(s);
  const Scenario s2 = parse_scenario_string(text);
  CHECK(s2.threshold_kind == Scenario::ThresholdKind::Table);
  CHECK(s2.threshold_table == table);
  CHECK(write_scenario(s2) == text);
  std::remove(table.c_str());
}

TEST_CASE("snapshot round-trip through the flat CSV schema") {
  const Scenario s = parse_scenario(fixture("reference.ini"));
  const Grid g = s.make_grid();
  const VectorField v0 = s.make_v0(g);
  const TensorField s0 = s.make_sigma0(g);
  const std::string path = "/tmp/psweep_test_snapshot.csv";
  write_snapshot_csv(v0, s0, path);
  const VectorField v1 = load_vector_field_csv(g, path);
  TensorField s1 = load_tensor_field_csv(g, path);
  VectorField dv = v1;
  dv -= v0;
  s1 -= s0;
  CHECK(norm_l2(dv) == 0.0);
  CHECK(norm_l2(s1) == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("cli: run produces deterministic outputs and exit code 0") {
  const std::string out = "/tmp/psweep_cli_run";
  std::filesystem::remove_all(out);
  const int rc = run_command({"run", "--scenario", fixture("zero_drive.ini"),
                              "--out", out, "--seed", "42"});
  CHECK(rc == 0);
  const std::string csv1 = read_text_file(out + "/trajectory.csv");
  CHECK(csv1.find("step,t,norm_v_H") == 0);
  const int rc2 = run_command({"run", "--scenario", fixture("zero_drive.ini"),
                               "--out", out, "--seed", "42"});
  CHECK(rc2 == 0);
  CHECK(read_text_file(out + "/trajectory.csv") == csv1);
  CHECK(read_text_file(out + "/summary.json").find("\"feasible_at_recorded_times\": true") !=
        std::string::npos);
  std::filesystem::remove_all(out);
}

TEST_CASE("cli: assumption violations exit with code 2") {
  const int rc = run_command({"run", "--scenario", fixture("kink_threshold.ini"),
                              "--regime", "sweeping", "--out", "/tmp/psweep_cli_bad"});
  CHECK(rc == 2);
}

TEST_CASE("cli: vtk snapshots are emitted on request") {
  const std::string out = "/tmp/psweep_cli_vtk";
  std::filesystem::remove_all(out);
  const int rc = run_command({"run", "--scenario", fixture("zero_data.ini"),
                              "--out", out, "--snapshots", "vtk"});
  CHECK(rc == 0);
  CHECK(std::filesystem::exists(out + "/snapshot_000000.vtk"));
  const std::string vtk = read_text_file(out + "/snapshot_000000.vtk");
  CHECK(vtk.find("# vtk DataFile Version 3.0") == 0);
  CHECK(vtk.find("DIMENSIONS 4 4 4") != std::string::npos);
  CHECK(vtk.find("SCALARS sigma_11 double 1") != std::string::npos);
  std::filesystem::remove_all(out);
}

TEST_CASE("cli: verify runs the invariant suite") {
  CHECK(run_command({"verify"}) == 0);
}

TEST_CASE("cli: run --diagnostics writes residual and energy reports") {
  const std::string out = "/tmp/psweep_cli_diag";
  std::filesystem::remove_all(out);
  const int rc = run_command({"run", "--scenario", fixture("reference.ini"),
                              "--out", out, "--diagnostics"});
  CHECK(rc == 0);
  const std::string res = read_text_file(out + "/residuals.csv");
  CHECK(res.find("step,t,vi_min_slack,wvi_min_slack") == 0);
  CHECK(read_text_file(out + "/energy.csv").find("step,t,lhs_sigma") == 0);
  CHECK(read_text_file(out + "/summary.json")
            .find("\"residuals_within_tolerance\": true") != std::string::npos);
  std::filesystem::remove_all(out);
}

TEST_CASE("cli: oracle --out writes exact trajectories in the march schema") {
  const std::string out = "/tmp/psweep_cli_oracle";
  std::filesystem::remove_all(out);
  CHECK(run_command({"oracle", "--dt", "1e-2,5e-3", "--out", out}) == 0);
  const std::string csv =
      read_text_file(out + "/oracle_drive-to-boundary.csv");
  CHECK(csv.find("step,t,norm_v_H,norm_sigma_H") == 0);
  std::filesystem::remove_all(out);
}

TEST_CASE("cli: condition-h passes on the moving-shift fixture") {
  CHECK(run_command({"condition-h", "--scenario", fixture("moving_shift.ini")}) == 0);
}

TEST_CASE("cli: oracle meets the accuracy and order targets") {
  CHECK(run_command({"oracle", "--dt", "1e-2,5e-3,2.5e-3"}) == 0);
}

TEST_CASE("cli: contraction ratios stay below one on the reference") {
  CHECK(run_command({"contraction", "--scenario", fixture("reference.ini")}) == 0);
}

}  // TEST_SUITE
