#include "psweep/subsolvers.hpp"

#include <cmath>
#include <sstream>

#include "psweep/errors.hpp"

namespace psweep {

namespace {

void check_problem(const StressStepProblem& p) {
  if (!p.sigma_prev || !p.drive || !p.constraint)
    throw BadParameters("stress step: missing fields or constraint");
  if (!(p.dt > 0.0)) throw BadParameters("stress step: dt must be positive");
  if (p.kappa < 0.0) throw BadParameters("stress step: kappa must be >= 0");
}

}  // namespace

TensorField stress_step_catchup(const StressStepProblem& p) {
  check_problem(p);
  if (p.kappa != 0.0)
    throw BadParameters("stress_step_catchup: kappa must be 0");
  TensorField predictor = *p.sigma_prev;
  predictor.axpy(p.dt, *p.drive);
  if (p.materialized) return p.constraint->project(predictor, *p.materialized);
  return p.constraint->project(predictor, p.t_next);
}

TensorField stress_step_regularized(const StressStepProblem& p) {
  check_problem(p);
  if (!(p.kappa > 0.0))
    throw BadParameters("stress_step_regularized: kappa must be positive");

  const Grid& grid = p.sigma_prev->grid();
  const double div_sq =
      p.div_norm_sq >= 0.0 ? p.div_norm_sq : estimate_div_norm_sq(grid);
  const double L = 1.0 / p.dt + p.kappa * (1.0 + div_sq);
  const double inv_dt = 1.0 / p.dt;

  MaterializedConstraint local =
      p.materialized ? *p.materialized : p.constraint->materialize(p.t_next);

  // grad J(tau) = (tau - sigma_prev)/dt + kappa (tau - strain(div tau)) - drive
  auto gradient = [&](const TensorField& tau) {
    TensorField g = strain(divergence(tau));
    g *= -p.kappa;
    g.axpy(p.kappa + inv_dt, tau);
    g.axpy(-inv_dt, *p.sigma_prev);
    g.axpy(-1.0, *p.drive);
    return g;
  };

  TensorField tau = p.constraint->project(*p.sigma_prev, local);
  double residual = 0.0;
  for (int it = 0; it < p.prox_max_iters; ++it) {
    TensorField step = tau;
    step.axpy(-1.0 / L, gradient(tau));
    TensorField next = p.constraint->project(step, local);
    TensorField diff = next;
    diff -= tau;
    residual = norm_l2(diff);
    tau = std::move(next);
    if (residual <= p.prox_tol) return tau;
  }
  std::ostringstream os;
  os << "stress_step_regularized: projected gradient exhausted "
     << p.prox_max_iters << " iterations, residual " << residual;
  throw ProxNoConvergence(os.str(), residual);
}

VectorField velocity_step(const VelocityStepProblem& p) {
  if (!p.v_prev || !p.source)
    throw BadParameters("velocity_step: missing fields");
  if (!(p.dt > 0.0) || !(p.nu > 0.0))
    throw BadParameters("velocity_step: dt and nu must be positive");

  const double nudt = p.nu * p.dt;
  auto apply = [&](const VectorField& v) {
    VectorField out = laplacian_form_apply(v, nudt);
    out += v;
    out.apply_mask();
    return out;
  };

  VectorField rhs = *p.v_prev;
  rhs.axpy(p.dt, *p.source);
  rhs.apply_mask();
  const double rhs_norm = norm_l2(rhs);
  if (rhs_norm == 0.0) return VectorField(rhs.grid());

  // plain conjugate gradients; the operator is SPD on the masked space
  VectorField x = rhs;  // warm-ish start: identity part dominates
  VectorField r = rhs;
  r -= apply(x);
  VectorField d = r;
  double rr = dot_l2(r, r);
  double res = std::sqrt(rr);
  for (int it = 0; it < p.linear_max_iters && res > p.linear_tol * rhs_norm;
       ++it) {
    VectorField ad = apply(d);
    const double alpha = rr / dot_l2(d, ad);
    x.axpy(alpha, d);
    r.axpy(-alpha, ad);
    const double rr_next = dot_l2(r, r);
    d *= rr_next / rr;
    d += r;
    rr = rr_next;
    res = std::sqrt(rr);
  }
  if (res > p.linear_tol * rhs_norm) {
    std::ostringstream os;
    os << "velocity_step: CG stalled at relative residual " << res / rhs_norm;
    throw LinearNoConvergence(os.str(), res / rhs_norm);
  }
  x.apply_mask();
  return x;
}

TensorField yosida_resolvent(const TensorField& tau, double t, double lambda,
                             double kappa, const ConstraintSet& constraint,
                             double prox_tol, int prox_max_iters) {
  if (!(lambda > 0.0))
    throw BadParameters("yosida_resolvent: lambda must be positive");
  if (kappa == 0.0) {
    // indicator case: the resolvent is the projection, independent of lambda
    return constraint.project(tau, t);
  }
  TensorField zero_drive(tau.grid());
  StressStepProblem p;
  p.sigma_prev = &tau;
  p.drive = &zero_drive;
  p.t_next = t;
  p.dt = lambda;
  p.kappa = kappa;
  p.constraint = &constraint;
  p.prox_tol = prox_tol;
  p.prox_max_iters = prox_max_iters;
  return stress_step_regularized(p);
}

TensorField yosida_gradient(const TensorField& tau, double t, double lambda,
                            double kappa, const ConstraintSet& constraint,
                            double prox_tol, int prox_max_iters) {
  TensorField res = yosida_resolvent(tau, t, lambda, kappa, constraint,
                                     prox_tol, prox_max_iters);
  TensorField grad = tau;
  grad -= res;
  grad *= 1.0 / lambda;
  return grad;
}

}  // namespace psweep
