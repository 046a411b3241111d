#ifndef PSWEEP_DIAGNOSTICS_HPP
#define PSWEEP_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "psweep/coupled.hpp"

namespace psweep {

//! Signed slack of a checked inequality; >= 0 means it holds.  Slacks are
//! normalized by the per-step scale 1 + |sigma|_H + |v|_V + |h|_H.
struct ResidualReport {
  double min_slack = 0.0;       // most negative normalized slack
  long worst_step = -1;
  int worst_test = -1;
  double max_violation = 0.0;   // feasibility of the trajectory itself
  bool feasible = true;
  int steps_checked = 0;
  int tests_per_step = 0;
  std::vector<double> per_step_min;  // normalized, one entry per step >= 1
};

//! Pointwise variational-inequality residual of a trajectory: the
//! regularized form carries the kappa (.,.)_V term, the sweeping form does
//! not.  Test tensors are projections of Gaussian fields onto K(t); the
//! trajectory value itself is always included as test 0.
ResidualReport vi_residual(const Trajectory& traj, const CoupledProblem& pb,
                           int n_tests, unsigned long long seed);

//! Time-integrated weak variational-inequality residual against feasible
//! tensor paths built by projecting smooth random paths onto K(t).  Time
//! integrals use the right-endpoint rule and backward-difference path
//! derivatives, the quadrature consistent with the implicit stepping.
ResidualReport weak_vi_residual(const Trajectory& traj,
                                const CoupledProblem& pb, int n_paths,
                                unsigned long long seed);

//! Discrete left-hand sides of the a-priori estimates and the empirical
//! constants they suggest.
struct EnergyReport {
  std::vector<double> lhs_sigma;   // |sigma|_H^2 + kappa dt sum |sigma|_V^2
  std::vector<double> lhs_dsigma;  // dt sum |sigma'|_H^2 + kappa |sigma|_V^2
  std::vector<double> lhs_v;       // |v|_H^2 + nu dt sum |v|_V^2
  double data = 0.0;               // 1 + dt sum |v~|_V^2 over the horizon
  double M_sigma = 0.0;            // sup lhs_sigma / data
  double M_dsigma = 0.0;
  double M_v = 0.0;
};

EnergyReport energy_report(const Trajectory& traj, const CoupledProblem& pb);

struct SuiteCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string instance;
};

struct SuiteReport {
  bool pass = false;
  std::vector<SuiteCheck> checks;
};

//! Structural invariants across grids: Gauss-Green adjointness, the Korn
//! bound, projection laws, orthogonal decomposition and degenerate-axis
//! reduction.  Throws SuiteFailure naming the first broken invariant when
//! throw_on_failure is set.
SuiteReport invariant_suite(const std::vector<Grid>& grids,
                            unsigned long long seed,
                            bool throw_on_failure = false);

}  // namespace psweep

#endif
