#ifndef PSWEEP_COUPLED_HPP
#define PSWEEP_COUPLED_HPP

#include <functional>
#include <vector>

#include "psweep/constraint.hpp"
#include "psweep/fields.hpp"

namespace psweep {

enum class Regime { Regularized, Sweeping };
enum class Coupling { Picard, Staggered };

//! Window sizing policy from the contraction rules of the two regimes.
struct WindowPolicy {
  Regime regime = Regime::Regularized;
  double kappa = 0.0;
  double nu = 0.0;
  double T = 0.0;
  double safety = 0.5;  // strictly below 1
  double picard_tol = 1e-12;
  int picard_max_iters = 200;
};

//! Window length: safety*kappa*nu^2 (regularized) or safety*nu^2*e^{-T}
//! (sweeping), clamped to the horizon. Throws BadParameters on
//! regime-inconsistent input.
double choose_window(const WindowPolicy& policy);

struct CoupledState {
  double t = 0.0;
  VectorField v;
  TensorField sigma;
};

//! Everything march needs; built from a Scenario or assembled by hand in
//! tests.
struct CoupledProblem {
  Grid grid = Grid::homogeneous_point();
  ConstraintSet constraint;
  std::function<VectorField(double)> f;  // body force at time t
  std::function<TensorField(double)> h;  // stress source at time t
  VectorField v0;
  TensorField sigma0;
  Regime regime = Regime::Regularized;
  Coupling coupling = Coupling::Picard;
  double kappa = 1.0;
  double nu = 1.0;
  double dt = 0.0;
  double T = 0.0;
  double safety = 0.5;
  double picard_tol = 1e-12;
  int picard_max_iters = 200;
  double prox_tol = 1e-12;
  int prox_max_iters = 100000;
  double linear_tol = 1e-12;
  int linear_max_iters = 2000;
  double membership_tol = 1e-10;

  WindowPolicy window_policy() const {
    return {regime, kappa, nu, T, safety, picard_tol, picard_max_iters};
  }
};

struct StepRecord {
  long step = 0;
  double t = 0.0;
  double norm_v_H = 0.0;
  double norm_sigma_H = 0.0;
  double norm_sigma_V = 0.0;
  double max_violation = 0.0;
  int picard_iters = 0;
  double contraction_ratio = 0.0;  // 0 when undefined
  double energy_lhs = 0.0;  // |sigma|_H^2 + kappa dt sum |sigma|_V^2
  double energy_rhs = 0.0;  // 1 + dt sum |v|_V^2
};

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;       // includes t = 0
  std::vector<VectorField> v;
  std::vector<TensorField> sigma;
  std::vector<StepRecord> records;
  std::vector<std::vector<double>> picard_distances;  // per window
  long windows = 0;
};

//! One contraction window: Picard iteration of the composed map
//! (stress march given a velocity trajectory, then velocity march given
//! the produced stress), measured in the discrete L2(0,T0;V) norm.
struct WindowResult {
  std::vector<double> times;        // t_1 .. t_m
  std::vector<VectorField> v;
  std::vector<TensorField> sigma;
  int picard_iters = 0;
  double final_ratio = 0.0;
  std::vector<double> distances;    // successive-iterate distances
};

WindowResult solve_window(const CoupledState& state, long steps,
                          const CoupledProblem& problem, double div_norm_sq);

//! Whole-horizon continuation: windows from choose_window run back to
//! back, each re-seeded with the previous end state.
Trajectory march(const CoupledProblem& problem);

//! Empirical Lipschitz measurement of the composed map on probe pairs of
//! velocity trajectories, next to the theoretical window bound.
struct ContractionProbe {
  double measured = 0.0;
  bool skipped = false;  // identical probes
};

struct ContractionReport {
  double T0 = 0.0;
  long steps = 0;
  double predicted = 0.0;  // sqrt(T0/(kappa nu^2)) or sqrt(e^T T0 / nu^2)
  std::vector<ContractionProbe> probes;
  double worst_measured = 0.0;
};

using VelocityTrajectory = std::vector<VectorField>;

ContractionReport measure_contraction(
    const CoupledProblem& problem,
    const std::vector<std::pair<VelocityTrajectory, VelocityTrajectory>>& probes);

//! Convenience wrapper: n random masked probe pairs sized to the window.
ContractionReport measure_contraction(const CoupledProblem& problem,
                                      int n_probes, unsigned long long seed);

//! The discrete L2(0,T0;V) distance between two velocity trajectories.
double trajectory_distance(const std::vector<VectorField>& a,
                           const std::vector<VectorField>& b, double dt);

//! sup over common times of |sigma_a(t) - sigma_b(t)|_H for trajectories
//! whose steps nest (dt_a = m * dt_b).
double trajectory_sup_sigma_gap(const Trajectory& a, const Trajectory& b);

//! Three marches at dt, dt/2, dt/4; D1 = sup-gap(dt, dt/2),
//! D2 = sup-gap(dt/2, dt/4), and the first-order constants C = D/dt.
struct RefinementReport {
  double dt = 0.0;
  double D1 = 0.0, D2 = 0.0;
  double C1 = 0.0, C2 = 0.0;
  double order = 0.0;  // log2(D1/D2)
};

RefinementReport refinement_study(const CoupledProblem& problem);

}  // namespace psweep

#endif
