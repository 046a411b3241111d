#include "psweep/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include "psweep/errors.hpp"
#include "psweep/rng.hpp"

namespace psweep {

namespace {

double step_scale(const TensorField& sigma, const VectorField& v,
                  const TensorField& h) {
  return 1.0 + norm_l2(sigma) + norm_grad(v) + norm_l2(h);
}

}  // namespace

ResidualReport vi_residual(const Trajectory& traj, const CoupledProblem& pb,
                           int n_tests, unsigned long long seed) {
  ResidualReport rep;
  rep.min_slack = 1e300;
  rep.tests_per_step = n_tests + 1;
  Rng rng(seed);
  const double kappa = pb.regime == Regime::Regularized ? pb.kappa : 0.0;

  for (size_t k = 1; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const TensorField& sigma = traj.sigma[k];
    const MaterializedConstraint mc = pb.constraint.materialize(t);

    const auto member = pb.constraint.membership(sigma, mc, pb.membership_tol);
    rep.max_violation = std::max(rep.max_violation, member.max_violation);

    TensorField dsigma = sigma;
    dsigma -= traj.sigma[k - 1];
    dsigma *= 1.0 / traj.dt;
    const TensorField h = pb.h(t);
    const TensorField eps_v = strain(traj.v[k]);
    const double scale = step_scale(sigma, traj.v[k], h);

    double step_min = 1e300;
    for (int test = 0; test <= n_tests; ++test) {
      TensorField tau = test == 0
                            ? sigma
                            : pb.constraint.project(
                                  random_tensor_field(pb.grid, rng, 1.0), mc);
      TensorField diff = sigma;  // sigma - tau
      diff -= tau;
      double slack = dot_l2(h, diff) - dot_l2(dsigma, diff) +
                     dot_l2(eps_v, diff);
      if (kappa > 0.0) slack -= kappa * dot_hdiv(sigma, diff);
      slack /= scale;
      step_min = std::min(step_min, slack);
      if (slack < rep.min_slack) {
        rep.min_slack = slack;
        rep.worst_step = long(k);
        rep.worst_test = test;
      }
    }
    rep.per_step_min.push_back(step_min);
    ++rep.steps_checked;
  }
  rep.feasible = rep.max_violation <= pb.membership_tol;
  return rep;
}

ResidualReport weak_vi_residual(const Trajectory& traj,
                                const CoupledProblem& pb, int n_paths,
                                unsigned long long seed) {
  ResidualReport rep;
  rep.min_slack = 1e300;
  rep.tests_per_step = n_paths;
  Rng rng(seed);
  const double kappa = pb.regime == Regime::Regularized ? pb.kappa : 0.0;
  const size_t K = traj.times.size();
  if (K < 2) return rep;
  rep.per_step_min.assign(K - 1, 1e300);

  // step data shared by all paths
  std::vector<TensorField> h_k, eps_v;
  std::vector<MaterializedConstraint> mc;
  for (size_t k = 0; k < K; ++k) {
    h_k.push_back(pb.h(traj.times[k]));
    eps_v.push_back(strain(traj.v[k]));
    mc.push_back(pb.constraint.materialize(traj.times[k]));
  }

  for (int path = 0; path < n_paths; ++path) {
    // feasible path: projection of a smooth random tensor path
    const TensorField base = random_tensor_field(pb.grid, rng, 0.6);
    const TensorField wave = random_tensor_field(pb.grid, rng, 0.4);
    const double omega = rng.uniform(0.5, 6.0);
    const double phase = rng.uniform(0.0, 6.28318530717958648);
    std::vector<TensorField> eta;
    for (size_t k = 0; k < K; ++k) {
      TensorField raw = base;
      raw.axpy(std::sin(omega * traj.times[k] + phase), wave);
      eta.push_back(pb.constraint.project(raw, mc[k]));
    }
    // backward-difference eta' and right-endpoint time sums: the
    // quadrature consistent with the implicit stepping, under which the
    // step-wise inequality telescopes into the integrated one
    TensorField init_diff = traj.sigma[0];
    init_diff -= eta[0];
    const double rhs_init = 0.5 * dot_l2(init_diff, init_diff);
    double acc = 0.0;
    for (size_t k = 1; k < K; ++k) {
      TensorField deta = eta[k];
      deta -= eta[k - 1];
      deta *= 1.0 / traj.dt;
      TensorField diff = traj.sigma[k];
      diff -= eta[k];
      double integrand = dot_l2(deta, diff) - dot_l2(eps_v[k], diff) -
                         dot_l2(h_k[k], diff);
      if (kappa > 0.0) integrand += kappa * dot_hdiv(traj.sigma[k], diff);
      acc += traj.dt * integrand;
      const double lhs = acc + 0.5 * dot_l2(diff, diff);
      const double scale = step_scale(traj.sigma[k], traj.v[k], h_k[k]);
      const double slack = (rhs_init - lhs) / scale;
      rep.per_step_min[k - 1] = std::min(rep.per_step_min[k - 1], slack);
      if (slack < rep.min_slack) {
        rep.min_slack = slack;
        rep.worst_step = long(k);
        rep.worst_test = path;
      }
    }
  }
  rep.steps_checked = int(K) - 1;
  rep.feasible = true;
  return rep;
}

EnergyReport energy_report(const Trajectory& traj, const CoupledProblem& pb) {
  EnergyReport rep;
  const double kappa = pb.regime == Regime::Regularized ? pb.kappa : 0.0;
  const size_t K = traj.times.size();
  double sum_sigV = 0.0, sum_dsig = 0.0, sum_vV = 0.0;
  for (size_t k = 0; k < K; ++k) {
    const double nsH = norm_l2(traj.sigma[k]);
    const double nsV = norm_hdiv(traj.sigma[k]);
    const double nvH = norm_l2(traj.v[k]);
    const double nvV = norm_grad(traj.v[k]);
    if (k > 0) {
      TensorField d = traj.sigma[k];
      d -= traj.sigma[k - 1];
      d *= 1.0 / traj.dt;
      const double nd = norm_l2(d);
      sum_dsig += traj.dt * nd * nd;
      sum_sigV += traj.dt * nsV * nsV;
      sum_vV += traj.dt * nvV * nvV;
    }
    rep.lhs_sigma.push_back(nsH * nsH + kappa * sum_sigV);
    rep.lhs_dsigma.push_back(sum_dsig + kappa * nsV * nsV);
    rep.lhs_v.push_back(nvH * nvH + pb.nu * sum_vV);
  }
  rep.data = 1.0 + sum_vV;
  for (size_t k = 0; k < K; ++k) {
    rep.M_sigma = std::max(rep.M_sigma, rep.lhs_sigma[k] / rep.data);
    rep.M_dsigma = std::max(rep.M_dsigma, rep.lhs_dsigma[k] / rep.data);
    rep.M_v = std::max(rep.M_v, rep.lhs_v[k] / rep.data);
  }
  return rep;
}

namespace {

void add_check(SuiteReport& rep, const std::string& name, double worst,
               double tol, const std::string& instance) {
  SuiteCheck chk;
  chk.name = name;
  chk.worst = worst;
  chk.tolerance = tol;
  chk.pass = worst <= tol;
  chk.instance = instance;
  rep.checks.push_back(chk);
}

std::string grid_label(const Grid& g) {
  std::ostringstream os;
  os << g.nx() << "x" << g.ny() << "x" << g.nz();
  return os.str();
}

}  // namespace

SuiteReport invariant_suite(const std::vector<Grid>& grids,
                            unsigned long long seed, bool throw_on_failure) {
  SuiteReport rep;
  Rng rng(seed);

  for (const Grid& g : grids) {
    // Gauss-Green adjointness, relative
    double worst_gg = 0.0;
    for (int it = 0; it < 100; ++it) {
      const VectorField z = random_vector_field(g, rng, 1.0);
      const TensorField tau = random_tensor_field(g, rng, 1.0);
      const double a = dot_l2(strain(z), tau);
      const double b = dot_l2(divergence(tau), z);
      const double denom = std::max(std::abs(a) + std::abs(b), 1e-30);
      worst_gg = std::max(worst_gg, std::abs(a + b) / denom);
    }
    add_check(rep, "gauss-green", worst_gg, 1e-12, grid_label(g));

    // Korn bound, relative violation
    double worst_korn = 0.0;
    for (int it = 0; it < 250; ++it) {
      const VectorField z = random_vector_field(g, rng, 1.0);
      const double lhs = norm_l2(strain(z));
      const double rhs = norm_grad(z);
      if (rhs > 0.0) worst_korn = std::max(worst_korn, (lhs - rhs) / rhs);
    }
    add_check(rep, "korn", worst_korn, 1e-12, grid_label(g));
  }

  // projection laws on plain tensors
  double worst_idem = 0.0, worst_nonexp = 0.0, worst_member = 0.0,
         worst_orth = 0.0;
  for (int it = 0; it < 1000; ++it) {
    SymTensor3 a, b;
    for (int c = 0; c < 6; ++c) {
      a[c] = rng.uniform(-3.0, 3.0);
      b[c] = rng.uniform(-3.0, 3.0);
    }
    const double gval = rng.uniform(0.2, 2.0);
    const SymTensor3 pa = project_deviatoric_ball(a, gval);
    const SymTensor3 pb = project_deviatoric_ball(b, gval);
    const SymTensor3 ppa = project_deviatoric_ball(pa, gval);
    worst_idem = std::max(worst_idem, frobenius_norm(ppa - pa));
    const double num = frobenius_norm(pa - pb);
    const double den = frobenius_norm(a - b);
    if (den > 0.0) worst_nonexp = std::max(worst_nonexp, (num - den) / den);
    worst_member = std::max(worst_member,
                            std::max(0.0, deviatoric_ball_violation(pa, gval)));
    worst_orth = std::max(
        worst_orth, std::abs(frobenius_inner(deviator(a), trace_part(a))) /
                        std::max(1.0, frobenius_inner(a, a)));
  }
  add_check(rep, "projection-idempotent", worst_idem, 0.0, "1000 tensors");
  add_check(rep, "projection-nonexpansive", worst_nonexp, 1e-12, "1000 pairs");
  add_check(rep, "projection-membership", worst_member, 1e-12, "1000 tensors");
  add_check(rep, "deviator-trace-orthogonal", worst_orth, 1e-14, "1000 tensors");

  // degenerate-axis reduction: a field constant along a 1-node axis gives
  // the same nodal operator values as the flat grid
  {
    const Grid flat(5, 4, 1, 0.25, 0.3, 0.2, {Face::XMin});
    const Grid thick(5, 4, 3, 0.25, 0.3, 0.2, {Face::XMin});
    const VectorField zf = random_vector_field(flat, rng, 1.0);
    VectorField zt(thick);
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 5; ++i) zt.at(i, j, k) = zf.at(i, j, 0);
    const TensorField ef = strain(zf);
    const TensorField et = strain(zt);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 5; ++i)
          worst = std::max(worst,
                           frobenius_norm(et.at(i, j, k) - ef.at(i, j, 0)));
    add_check(rep, "degenerate-axis", worst, 1e-14, "5x4x1 vs 5x4x3");
  }

  rep.pass = true;
  for (const auto& chk : rep.checks) rep.pass = rep.pass && chk.pass;
  if (!rep.pass && throw_on_failure) {
    for (const auto& chk : rep.checks)
      if (!chk.pass) {
        std::ostringstream os;
        os << "invariant '" << chk.name << "' failed on " << chk.instance
           << ": worst " << chk.worst << " > tolerance " << chk.tolerance;
        throw SuiteFailure(os.str());
      }
  }
  return rep;
}

}  // namespace psweep
