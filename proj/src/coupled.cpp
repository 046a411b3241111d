#include "psweep/coupled.hpp"

#include <cmath>
#include <sstream>

#include "psweep/errors.hpp"
#include "psweep/rng.hpp"
#include "psweep/subsolvers.hpp"

namespace psweep {

double choose_window(const WindowPolicy& policy) {
  if (!(policy.nu > 0.0)) throw BadParameters("choose_window: nu must be > 0");
  if (!(policy.T > 0.0)) throw BadParameters("choose_window: T must be > 0");
  if (!(policy.safety > 0.0) || !(policy.safety < 1.0))
    throw BadParameters("choose_window: safety must lie strictly in (0,1)");
  double T0 = 0.0;
  if (policy.regime == Regime::Regularized) {
    if (!(policy.kappa > 0.0))
      throw BadParameters("choose_window: regularized regime needs kappa > 0");
    T0 = policy.safety * policy.kappa * policy.nu * policy.nu;
  } else {
    T0 = policy.safety * policy.nu * policy.nu * std::exp(-policy.T);
  }
  return std::min(T0, policy.T);
}

double trajectory_distance(const std::vector<VectorField>& a,
                           const std::vector<VectorField>& b, double dt) {
  if (a.size() != b.size())
    throw BadParameters("trajectory_distance: length mismatch");
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    VectorField d = a[k];
    d -= b[k];
    const double n = norm_grad(d);
    s += n * n;
  }
  return std::sqrt(dt * s);
}

namespace {

//! Per-window data materialized once and reused across Picard iterations.
struct WindowContext {
  const CoupledProblem* pb = nullptr;
  double div_sq = 0.0;
  const VectorField* v_init = nullptr;
  const TensorField* sigma_init = nullptr;
  std::vector<double> times;
  std::vector<TensorField> h_k;
  std::vector<VectorField> f_k;
  std::vector<MaterializedConstraint> mc_k;
};

WindowContext make_context(const CoupledState& state, long steps,
                           const CoupledProblem& pb, double div_sq) {
  WindowContext ctx;
  ctx.pb = &pb;
  ctx.div_sq = div_sq;
  ctx.v_init = &state.v;
  ctx.sigma_init = &state.sigma;
  for (long k = 1; k <= steps; ++k) {
    const double t = state.t + double(k) * pb.dt;
    ctx.times.push_back(t);
    ctx.h_k.push_back(pb.h(t));
    ctx.f_k.push_back(pb.f(t));
    ctx.mc_k.push_back(pb.constraint.materialize(t));
  }
  return ctx;
}

std::vector<TensorField> stress_march(const WindowContext& ctx,
                                      const std::vector<VectorField>& vtraj) {
  const CoupledProblem& pb = *ctx.pb;
  std::vector<TensorField> out;
  out.reserve(ctx.times.size());
  const TensorField* prev = ctx.sigma_init;
  for (size_t k = 0; k < ctx.times.size(); ++k) {
    TensorField drive = strain(vtraj[k]);
    drive += ctx.h_k[k];
    StressStepProblem p;
    p.sigma_prev = prev;
    p.drive = &drive;
    p.t_next = ctx.times[k];
    p.dt = pb.dt;
    p.kappa = pb.regime == Regime::Regularized ? pb.kappa : 0.0;
    p.constraint = &pb.constraint;
    p.materialized = &ctx.mc_k[k];
    p.prox_tol = pb.prox_tol;
    p.prox_max_iters = pb.prox_max_iters;
    p.div_norm_sq = ctx.div_sq;
    out.push_back(pb.regime == Regime::Regularized
                      ? stress_step_regularized(p)
                      : stress_step_catchup(p));
    prev = &out.back();
  }
  return out;
}

std::vector<VectorField> velocity_march(const WindowContext& ctx,
                                        const std::vector<TensorField>& sig) {
  const CoupledProblem& pb = *ctx.pb;
  std::vector<VectorField> out;
  out.reserve(ctx.times.size());
  const VectorField* prev = ctx.v_init;
  for (size_t k = 0; k < ctx.times.size(); ++k) {
    VectorField source = divergence(sig[k]);
    source += ctx.f_k[k];
    VelocityStepProblem p;
    p.v_prev = prev;
    p.source = &source;
    p.nu = pb.nu;
    p.dt = pb.dt;
    p.linear_tol = pb.linear_tol;
    p.linear_max_iters = pb.linear_max_iters;
    out.push_back(velocity_step(p));
    prev = &out.back();
  }
  return out;
}

}  // namespace

WindowResult solve_window(const CoupledState& state, long steps,
                          const CoupledProblem& problem, double div_norm_sq) {
  if (steps < 1) throw BadParameters("solve_window: need at least one step");
  const WindowContext ctx = make_context(state, steps, problem, div_norm_sq);

  std::vector<VectorField> vtraj(size_t(steps), state.v);
  std::vector<double> distances;
  double ratio = 0.0;
  bool converged = false;
  for (int it = 1; it <= problem.picard_max_iters; ++it) {
    const std::vector<TensorField> sig = stress_march(ctx, vtraj);
    std::vector<VectorField> vnext = velocity_march(ctx, sig);
    const double d = trajectory_distance(vnext, vtraj, problem.dt);
    if (!distances.empty() && distances.back() > 0.0)
      ratio = d / distances.back();
    distances.push_back(d);
    vtraj = std::move(vnext);
    if (d <= problem.picard_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::vector<double> ratios;
    for (size_t i = 1; i < distances.size(); ++i)
      if (distances[i - 1] > 0.0) ratios.push_back(distances[i] / distances[i - 1]);
    std::ostringstream os;
    os << "solve_window: Picard iteration did not reach " << problem.picard_tol
       << " within " << problem.picard_max_iters << " iterations (last distance "
       << (distances.empty() ? 0.0 : distances.back())
       << "); the window rule may be violated";
    throw PicardNoConvergence(os.str(), std::move(ratios));
  }

  WindowResult res;
  res.times = ctx.times;
  // one more stress march so the stored stress is the exact image of the
  // stored velocity trajectory
  res.sigma = stress_march(ctx, vtraj);
  res.v = std::move(vtraj);
  res.picard_iters = int(distances.size());
  res.final_ratio = ratio;
  res.distances = std::move(distances);
  return res;
}

namespace {

void validate_problem(const CoupledProblem& pb) {
  if (!(pb.dt > 0.0)) throw BadParameters("march: dt must be positive");
  if (!(pb.T > 0.0)) throw BadParameters("march: horizon must be positive");
  const double steps = pb.T / pb.dt;
  if (std::abs(steps - std::round(steps)) > 1e-8 * std::max(1.0, steps))
    throw BadParameters("march: dt must divide the horizon");
  if (pb.regime == Regime::Regularized && !(pb.kappa > 0.0))
    throw BadParameters("march: regularized regime needs kappa > 0");
  if (!pb.f || !pb.h) throw BadParameters("march: data evaluators missing");
}

StepRecord make_record(const CoupledProblem& pb, long step, double t,
                       const VectorField& v, const TensorField& sigma,
                       int picard_iters, double ratio, double energy_sig,
                       double energy_v) {
  StepRecord r;
  r.step = step;
  r.t = t;
  r.norm_v_H = norm_l2(v);
  r.norm_sigma_H = norm_l2(sigma);
  r.norm_sigma_V = norm_hdiv(sigma);
  r.max_violation =
      pb.constraint.membership(sigma, t, pb.membership_tol).max_violation;
  r.picard_iters = picard_iters;
  r.contraction_ratio = ratio;
  r.energy_lhs = r.norm_sigma_H * r.norm_sigma_H + energy_sig;
  r.energy_rhs = 1.0 + energy_v;
  return r;
}

}  // namespace

Trajectory march(const CoupledProblem& pb) {
  validate_problem(pb);
  const long N = std::lround(pb.T / pb.dt);

  const MembershipReport init =
      pb.constraint.membership(pb.sigma0, 0.0, pb.membership_tol);
  if (!init.feasible) {
    std::ostringstream os;
    os << "march: sigma0 violates K(0) by " << init.max_violation;
    throw BadParameters(os.str());
  }

  const double div_sq = pb.regime == Regime::Regularized
                            ? estimate_div_norm_sq(pb.grid)
                            : 0.0;

  Trajectory traj;
  traj.dt = pb.dt;
  traj.times.push_back(0.0);
  traj.v.push_back(pb.v0);
  traj.sigma.push_back(pb.sigma0);

  const double kappa_eff = pb.regime == Regime::Regularized ? pb.kappa : 0.0;
  double energy_sig = 0.0;  // kappa dt sum |sigma_k|_V^2, k >= 1
  double energy_v = 0.0;    // dt sum |v_k|_V^2, k >= 1
  traj.records.push_back(
      make_record(pb, 0, 0.0, pb.v0, pb.sigma0, 0, 0.0, energy_sig, energy_v));

  auto append_step = [&](double t, VectorField v, TensorField sigma,
                         int iters, double ratio) {
    const double nsv = norm_hdiv(sigma);
    const double nvv = norm_grad(v);
    energy_sig += kappa_eff * pb.dt * nsv * nsv;
    energy_v += pb.dt * nvv * nvv;
    traj.records.push_back(make_record(pb, long(traj.times.size()), t, v, sigma,
                                       iters, ratio, energy_sig, energy_v));
    traj.times.push_back(t);
    traj.v.push_back(std::move(v));
    traj.sigma.push_back(std::move(sigma));
  };

  if (pb.coupling == Coupling::Staggered) {
    CoupledState state{0.0, pb.v0, pb.sigma0};
    for (long k = 1; k <= N; ++k) {
      const double t = double(k) * pb.dt;
      const WindowContext ctx = make_context(state, 1, pb, div_sq);
      const std::vector<TensorField> sig = stress_march(ctx, {state.v});
      const std::vector<VectorField> vel = velocity_march(ctx, sig);
      state = CoupledState{t, vel[0], sig[0]};
      append_step(t, vel[0], sig[0], 0, 0.0);
    }
    traj.windows = N;
    return traj;
  }

  const double T0 = choose_window(pb.window_policy());
  const long steps_per_window =
      std::max<long>(1, long(std::floor(T0 / pb.dt + 1e-9)));

  CoupledState state{0.0, pb.v0, pb.sigma0};
  long done = 0;
  while (done < N) {
    const long m = std::min(steps_per_window, N - done);
    WindowResult res = solve_window(state, m, pb, div_sq);
    for (long k = 0; k < m; ++k)
      append_step(res.times[k], res.v[k], res.sigma[k], res.picard_iters,
                  res.final_ratio);
    traj.picard_distances.push_back(res.distances);
    state = CoupledState{res.times.back(), res.v.back(), res.sigma.back()};
    done += m;
    ++traj.windows;
  }
  return traj;
}

double trajectory_sup_sigma_gap(const Trajectory& a, const Trajectory& b) {
  const Trajectory& coarse = a.dt >= b.dt ? a : b;
  const Trajectory& fine = a.dt >= b.dt ? b : a;
  const long m = std::lround(coarse.dt / fine.dt);
  if (std::abs(coarse.dt - double(m) * fine.dt) > 1e-12)
    throw BadParameters("trajectory_sup_sigma_gap: steps do not nest");
  double gap = 0.0;
  for (size_t k = 0; k < coarse.sigma.size(); ++k) {
    const size_t kf = k * size_t(m);
    if (kf >= fine.sigma.size()) break;
    TensorField d = coarse.sigma[k];
    d -= fine.sigma[kf];
    gap = std::max(gap, norm_l2(d));
  }
  return gap;
}

RefinementReport refinement_study(const CoupledProblem& problem) {
  CoupledProblem half = problem;
  half.dt = problem.dt / 2.0;
  CoupledProblem quarter = problem;
  quarter.dt = problem.dt / 4.0;
  const Trajectory t1 = march(problem);
  const Trajectory t2 = march(half);
  const Trajectory t4 = march(quarter);
  RefinementReport rep;
  rep.dt = problem.dt;
  rep.D1 = trajectory_sup_sigma_gap(t1, t2);
  rep.D2 = trajectory_sup_sigma_gap(t2, t4);
  rep.C1 = rep.D1 / problem.dt;
  rep.C2 = rep.D2 / half.dt;
  rep.order = rep.D2 > 0.0 ? std::log2(rep.D1 / rep.D2) : 0.0;
  return rep;
}

ContractionReport measure_contraction(
    const CoupledProblem& pb,
    const std::vector<std::pair<VelocityTrajectory, VelocityTrajectory>>&
        probes) {
  validate_problem(pb);
  const double T0 = choose_window(pb.window_policy());
  const long m = std::max<long>(1, long(std::floor(T0 / pb.dt + 1e-9)));
  const double T0_eff = double(m) * pb.dt;

  const double div_sq = pb.regime == Regime::Regularized
                            ? estimate_div_norm_sq(pb.grid)
                            : 0.0;
  const CoupledState state{0.0, pb.v0, pb.sigma0};
  const WindowContext ctx = make_context(state, m, pb, div_sq);

  ContractionReport rep;
  rep.T0 = T0_eff;
  rep.steps = m;
  rep.predicted =
      pb.regime == Regime::Regularized
          ? std::sqrt(T0_eff / (pb.kappa * pb.nu * pb.nu))
          : std::sqrt(std::exp(pb.T) * T0_eff / (pb.nu * pb.nu));

  auto apply_S = [&](const VelocityTrajectory& vtraj) {
    return velocity_march(ctx, stress_march(ctx, vtraj));
  };
  for (const auto& [a, b] : probes) {
    if (long(a.size()) != m || long(b.size()) != m)
      throw BadParameters("measure_contraction: probe length must match the window");
    const double den = trajectory_distance(a, b, pb.dt);
    ContractionProbe pr;
    if (den == 0.0) {
      pr.skipped = true;  // identical probes: the ratio is undefined
    } else {
      pr.measured = trajectory_distance(apply_S(a), apply_S(b), pb.dt) / den;
      rep.worst_measured = std::max(rep.worst_measured, pr.measured);
    }
    rep.probes.push_back(pr);
  }
  return rep;
}

ContractionReport measure_contraction(const CoupledProblem& pb, int n_probes,
                                      unsigned long long seed) {
  const double T0 = choose_window(pb.window_policy());
  const long m = std::max<long>(1, long(std::floor(T0 / pb.dt + 1e-9)));
  Rng rng(seed);
  std::vector<std::pair<VelocityTrajectory, VelocityTrajectory>> probes;
  for (int probe = 0; probe < n_probes; ++probe) {
    VelocityTrajectory a, b;
    for (long k = 0; k < m; ++k) {
      a.push_back(random_vector_field(pb.grid, rng, 0.5));
      b.push_back(random_vector_field(pb.grid, rng, 0.5));
    }
    probes.emplace_back(std::move(a), std::move(b));
  }
  return measure_contraction(pb, probes);
}

}  // namespace psweep
