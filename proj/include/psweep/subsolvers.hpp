#ifndef PSWEEP_SUBSOLVERS_HPP
#define PSWEEP_SUBSOLVERS_HPP

#include "psweep/constraint.hpp"
#include "psweep/fields.hpp"

namespace psweep {

//! One implicit step of the stress subproblem
//! sigma' + d(phi^t)(sigma) + E2 v ∋ h, discretized as a proximal step.
//!
//! drive = strain(v~) + h evaluated at t_next; kappa = 0 selects the pure
//! sweeping (catching-up) step, kappa > 0 the regularized prox step.
struct StressStepProblem {
  const TensorField* sigma_prev = nullptr;
  const TensorField* drive = nullptr;
  double t_next = 0.0;
  double dt = 0.0;
  double kappa = 0.0;
  const ConstraintSet* constraint = nullptr;
  const MaterializedConstraint* materialized = nullptr;  // optional, at t_next
  double prox_tol = 1e-12;
  int prox_max_iters = 100000;
  double div_norm_sq = -1.0;  // < 0 means estimate from the grid
};

//! Catching-up step sigma_next = P_{K(t_next)}(sigma_prev + dt*drive).
TensorField stress_step_catchup(const StressStepProblem& p);

//! Projected-gradient solve of
//!   min over K(t_next) of (1/(2dt))|tau - sigma_prev|_H^2
//!                         + (kappa/2)|tau|_V^2 - (drive, tau)_H
//! with fixed step 1/L, L = 1/dt + kappa (1 + |div|^2). Terminates on the
//! fixed-point residual |tau - P_K(tau - grad J / L)| <= prox_tol.
TensorField stress_step_regularized(const StressStepProblem& p);

//! Implicit viscous velocity step (I + nu dt A) v = v_prev + dt*source,
//! A the operator of nu-scaled ((.,.)), solved by conjugate gradients on
//! the masked space.
struct VelocityStepProblem {
  const VectorField* v_prev = nullptr;
  const VectorField* source = nullptr;  // div sigma + f at the step time
  double nu = 0.0;
  double dt = 0.0;
  double linear_tol = 1e-12;
  int linear_max_iters = 2000;
};

VectorField velocity_step(const VelocityStepProblem& p);

//! Resolvent J_lambda of d(phi^t): the plain projection for kappa = 0, the
//! prox of (kappa/2)|.|_V^2 + I_K(t) for kappa > 0.
TensorField yosida_resolvent(const TensorField& tau, double t, double lambda,
                             double kappa, const ConstraintSet& constraint,
                             double prox_tol = 1e-12,
                             int prox_max_iters = 100000);

//! (tau - J_lambda tau)/lambda, the Yosida approximation of the
//! subdifferential.
TensorField yosida_gradient(const TensorField& tau, double t, double lambda,
                            double kappa, const ConstraintSet& constraint,
                            double prox_tol = 1e-12,
                            int prox_max_iters = 100000);

}  // namespace psweep

#endif
