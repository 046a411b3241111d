#ifndef PSWEEP_SCENARIO_HPP
#define PSWEEP_SCENARIO_HPP

#include <array>
#include <string>
#include <vector>

#include "psweep/coupled.hpp"
#include "psweep/expression.hpp"

namespace psweep {

//! Complete run configuration, the in-memory form of the scenario file.
//! Expressions are in the variables (t, x1, x2, x3).
struct Scenario {
  // domain
  int nx = 4, ny = 4, nz = 4;
  double hx = 0.25, hy = 0.25, hz = 0.25;
  std::vector<Face> dirichlet_faces = {Face::XMin};
  bool homogeneous = false;

  // time
  double T = 1.0;
  double dt = 0.01;

  // physics
  Regime regime = Regime::Regularized;
  Coupling coupling = Coupling::Picard;
  double kappa = 1.0;
  double nu = 1.0;
  double lambda = 0.1;

  // threshold
  enum class ThresholdKind { Constant, Expression, Table };
  ThresholdKind threshold_kind = ThresholdKind::Constant;
  double threshold_value = 1.0;
  Expr threshold_expr;
  Expr threshold_derivative;
  bool has_threshold_derivative = false;
  std::string threshold_table;  // CSV path for Table kind
  double c1 = 1.0, c2 = 1.0;
  Regularity threshold_tag = Regularity::H1InTime;

  // shift sigma*
  enum class ShiftKind { Zero, Expression };
  ShiftKind shift_kind = ShiftKind::Zero;
  std::array<Expr, 6> shift_exprs;
  std::array<Expr, 6> shift_derivatives;
  bool has_shift_derivative = false;
  bool shift_h1_in_V = true;  // (A3) vs (A3')

  // data
  std::array<Expr, 3> f_exprs;
  std::array<Expr, 6> h_exprs;

  // initial values (expressions, or snapshot-CSV file paths)
  std::array<Expr, 3> v0_exprs;
  std::array<Expr, 6> sigma0_exprs;
  std::string v0_file;
  std::string sigma0_file;

  // solver
  double picard_tol = 1e-12;
  int picard_max_iters = 200;
  double prox_tol = 1e-12;
  int prox_max_iters = 200000;
  double linear_tol = 1e-13;
  int linear_max_iters = 2000;
  double safety = 0.5;
  double membership_tol = 1e-10;

  // output
  std::string out_dir = "out";
  int cadence = 1;
  std::string snapshots = "none";  // none | vtk
  unsigned long long seed = 0;

  Grid make_grid() const;
  ThresholdField make_threshold() const;
  ShiftField make_shift() const;
  VectorField make_v0(const Grid& g) const;
  TensorField make_sigma0(const Grid& g) const;

  //! Assumption checks (A1)-(A5), (A3'), (A4') plus basic parameter
  //! sanity; returns human-readable violations, empty when valid.
  std::vector<std::string> validate() const;

  //! Fully assembled problem; throws AssumptionViolation listing every
  //! failed assumption.  project_initial replaces an infeasible sigma0 by
  //! its projection onto K(0) instead of failing (A2).
  CoupledProblem make_problem(bool project_initial = false) const;
};

//! Parse the sectioned key-value scenario file.  Throws ParseError on
//! syntax problems; assumption checks happen in validate/make_problem.
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_string(const std::string& text);

//! Serialize back into the file format; parse(write(s)) == s for every
//! shipped fixture.
std::string write_scenario(const Scenario& s);

}  // namespace psweep

#endif
