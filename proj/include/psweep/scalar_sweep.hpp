#ifndef PSWEEP_SCALAR_SWEEP_HPP
#define PSWEEP_SCALAR_SWEEP_HPP

#include <functional>
#include <vector>

#include "psweep/tensor.hpp"

namespace psweep {

//! Piecewise-linear function given by breakpoint samples (t ascending).
struct PiecewiseLinear {
  std::vector<double> t;
  std::vector<double> v;

  double operator()(double s) const;
  double slope(double s) const;  // right slope, left slope at the end

  static PiecewiseLinear constant(double value, double t_end);
};

//! Piecewise-constant function: value v[i] on [t[i], t[i+1]).
struct PiecewiseConstant {
  std::vector<double> t;  // interval starts, t[0] = 0
  std::vector<double> v;

  double operator()(double s) const;

  static PiecewiseConstant constant(double value);
};

//! Scalar sweeping process sigma' + dI_[-r(t), r(t)](sigma) ∋ G(t).
struct ScalarSweepProblem {
  PiecewiseLinear radius;
  PiecewiseConstant rate;
  double sigma0 = 0.0;
  double horizon = 0.0;
};

//! Piecewise-linear trajectory with nodes at every event.
struct ScalarTrajectory {
  std::vector<double> t;
  std::vector<double> sigma;

  double eval(double s) const;
};

//! Exact integration of the scalar sweeping process between breakpoints:
//! free flight at rate G, boundary tracking while the drive presses
//! outward at least as fast as the boundary moves, with attach/detach
//! events resolved at the roots of the piecewise-linear data.
//! Throws DegenerateRadius when r <= 0 somewhere on [0, horizon].
ScalarTrajectory stop_operator_exact(const ScalarSweepProblem& p);

//! Fine-step catching-up for the spatially homogeneous tensor sweep with
//! threshold g(t) (sigma* = 0): a reference trajectory for the production
//! integrator; radially symmetric cases reduce to the scalar stop with
//! radius sqrt(2 g(t)).
struct HomogeneousSweepResult {
  std::vector<double> t;
  std::vector<SymTensor3> sigma;
};

HomogeneousSweepResult homogeneous_sweep_reference(
    const std::function<double(double)>& g,
    const std::function<SymTensor3(double)>& drive, const SymTensor3& sigma0,
    double horizon, double dt_fine);

//! Production catching-up (the kappa = 0 stress step on a one-node grid)
//! against the exact scalar trajectory, for a deviator-aligned drive.
//! The discrete trajectory is held right-constant on each step and the
//! error is sampled on a fine grid inside every step.
struct SweepAccuracyRow {
  double dt = 0.0;
  double sup_error = 0.0;
};

struct SweepAccuracyReport {
  std::vector<SweepAccuracyRow> rows;
  std::vector<double> orders;  // between consecutive dt entries
  double min_order = 0.0;
};

SweepAccuracyReport sweep_accuracy_study(const ScalarSweepProblem& p,
                                         const std::vector<double>& dts,
                                         int samples_per_step = 10);

//! Canned 0D scenarios: constant radius with a drive that reaches the
//! boundary, and a shrinking radius sweeping the state inward.
ScalarSweepProblem oracle_drive_to_boundary();
ScalarSweepProblem oracle_shrinking_radius();

}  // namespace psweep

#endif
