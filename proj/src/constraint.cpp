#include "psweep/constraint.hpp"

#include <cmath>
#include <sstream>

#include "psweep/errors.hpp"
#include "psweep/rng.hpp"

namespace psweep {

ConstraintSet::ConstraintSet()
    : ConstraintSet(ThresholdField::constant(1.0), ShiftField::zero(),
                    Grid::homogeneous_point()) {}

ConstraintSet::ConstraintSet(ThresholdField threshold, ShiftField shift,
                             Grid grid, double membership_tol)
    : threshold_(std::move(threshold)),
      shift_(std::move(shift)),
      grid_(std::move(grid)),
      membership_tol_(membership_tol) {
  if (!threshold_.g) throw BadParameters("ConstraintSet: threshold evaluator missing");
  if (!shift_.value) throw BadParameters("ConstraintSet: shift evaluator missing");
}

MaterializedConstraint ConstraintSet::materialize(double t) const {
  MaterializedConstraint mc(grid_, t);
  mc.shift = shift_.materialize(grid_, t);
  long n = 0;
  for (int k = 0; k < grid_.nz(); ++k)
    for (int j = 0; j < grid_.ny(); ++j)
      for (int i = 0; i < grid_.nx(); ++i, ++n) {
        const Vec3 x = grid_.coord(i, j, k);
        mc.g[n] = threshold_.g(t, x[0], x[1], x[2]);
      }
  return mc;
}

MembershipReport ConstraintSet::membership(const TensorField& tau, double t,
                                           double tol) const {
  return membership(tau, materialize(t), tol);
}

MembershipReport ConstraintSet::membership(const TensorField& tau,
                                           const MaterializedConstraint& mc,
                                           double tol) const {
  if (tau.grid() != grid_)
    throw GridMismatch("membership: field grid differs from constraint grid");
  double worst = 0.0;
  for (long n = 0; n < tau.size(); ++n) {
    const double v = deviatoric_ball_violation(tau[n] + mc.shift[n], mc.g[n]);
    worst = std::max(worst, v);
  }
  MembershipReport rep;
  rep.max_violation = std::max(0.0, worst);
  rep.feasible = rep.max_violation <= tol;
  return rep;
}

TensorField ConstraintSet::project(const TensorField& tau, double t) const {
  return project(tau, materialize(t));
}

TensorField ConstraintSet::project(const TensorField& tau,
                                   const MaterializedConstraint& mc) const {
  if (tau.grid() != grid_)
    throw GridMismatch("project: field grid differs from constraint grid");
  TensorField out(grid_);
  for (long n = 0; n < tau.size(); ++n)
    out[n] = project_deviatoric_ball(tau[n] + mc.shift[n], mc.g[n]) - mc.shift[n];
  return out;
}

ConstraintSet::ShrinkResult ConstraintSet::shrink_transport(
    const TensorField& tau, double s, double t) const {
  if (tau.grid() != grid_)
    throw GridMismatch("shrink_transport: field grid differs from constraint grid");
  const MembershipReport pre = membership(tau, s, membership_tol_);
  if (!pre.feasible) {
    std::ostringstream os;
    os << "shrink_transport: input not in K(s), violation " << pre.max_violation;
    throw BadParameters(os.str());
  }
  const double gap = threshold_.sup_diff(grid_, s, t);
  if (gap >= threshold_.c1) {
    std::ostringstream os;
    os << "shrink_transport: |g(t)-g(s)|_C = " << gap << " >= C1 = "
       << threshold_.c1 << " between s=" << s << " and t=" << t;
    throw WindowTooWide(os.str());
  }
  const double theta = 1.0 - gap / threshold_.c1;

  const TensorField shift_s = shift_.materialize(grid_, s);
  const MaterializedConstraint mc_t = materialize(t);
  TensorField out(grid_);
  for (long n = 0; n < tau.size(); ++n) {
    SymTensor3 shrunk = theta * (tau[n] + shift_s[n]) - mc_t.shift[n];
    // Loose feasibility of the input may leak through the formula; snap
    // back radially so the output honors K(t) to rounding.
    if (deviatoric_ball_violation(shrunk + mc_t.shift[n], mc_t.g[n]) > 0.0)
      shrunk = project_deviatoric_ball(shrunk + mc_t.shift[n], mc_t.g[n]) -
               mc_t.shift[n];
    out[n] = shrunk;
  }
  return {std::move(out), theta};
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int subintervals) {
  if (a == b) return 0.0;
  const int n = std::max(2, subintervals + (subintervals % 2));  // even
  const double h = (b - a) / double(n);
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

ConditionHData ConstraintSet::condition_h_data(double r, double kappa,
                                               ConditionHRegime regime,
                                               double t_begin, double t_end,
                                               int time_samples) const {
  if (threshold_.tag != Regularity::H1InTime)
    throw MissingDerivative(
        "condition_h_data: threshold must be H1-in-time (merely continuous "
        "thresholds go through the mollification pipeline)");
  if (!threshold_.has_derivative())
    throw MissingDerivative("condition_h_data: threshold derivative missing");
  if (!shift_.has_derivative())
    throw MissingDerivative("condition_h_data: shift derivative missing");
  if (regime == ConditionHRegime::Regularized && !(kappa > 0.0))
    throw BadParameters("condition_h_data: regularized regime needs kappa > 0");

  // sup-in-time norms of the shift, sampled
  const int nt = std::max(2, time_samples);
  double shift_sup_l2 = 0.0, shift_sup_hdiv = 0.0;
  for (int i = 0; i < nt; ++i) {
    const double t = t_begin + (t_end - t_begin) * double(i) / double(nt - 1);
    const TensorField st = shift_.materialize(grid_, t);
    shift_sup_l2 = std::max(shift_sup_l2, norm_l2(st));
    shift_sup_hdiv = std::max(shift_sup_hdiv, norm_hdiv(st));
  }

  const double c1 = threshold_.c1;
  ConditionHData data;
  data.regime = regime;
  data.kappa = kappa;
  data.r = r;

  if (regime == ConditionHRegime::Indicator) {
    data.alpha_eval = [this, c1, r, shift_sup_l2](double t) {
      const double gp = threshold_.sup_dgdt(grid_, t);
      const double sp = norm_l2(shift_.materialize_derivative(grid_, t));
      return (gp / c1) * (r + shift_sup_l2) + sp;
    };
    data.beta_eval = [](double) { return 0.0; };
  } else {
    const double amp = std::sqrt(2.0 / kappa);
    data.alpha_eval = [this, c1, amp, shift_sup_l2](double t) {
      const double gp = threshold_.sup_dgdt(grid_, t);
      const double sp = norm_l2(shift_.materialize_derivative(grid_, t));
      return (gp / c1) * (amp + shift_sup_l2) + sp;
    };
    data.beta_eval = [this, c1, shift_sup_hdiv](double t) {
      const double gp = threshold_.sup_dgdt(grid_, t);
      const double spv = norm_hdiv(shift_.materialize_derivative(grid_, t));
      return (1.0 + shift_sup_hdiv) * spv + (2.0 / c1) * shift_sup_hdiv * gp;
    };
  }

  data.times.resize(nt);
  data.alpha.resize(nt);
  data.beta.resize(nt);
  for (int i = 0; i < nt; ++i) {
    const double t = t_begin + (t_end - t_begin) * double(i) / double(nt - 1);
    data.times[i] = t;
    data.alpha[i] = data.alpha_eval(t);
    data.beta[i] = data.beta_eval(t);
  }
  return data;
}

ConditionHStudy run_condition_h_study(const ConstraintSet& constraint,
                                      double horizon, ConditionHRegime regime,
                                      double kappa, int n_pairs, int n_samples,
                                      unsigned long long seed) {
  Rng rng(seed);
  const double delta = horizon / double(2 * n_pairs);
  ConditionHStudy study;
  study.report.worst_h1_slack = 1e300;
  study.report.worst_h2_slack = 1e300;
  study.report.pass = true;

  for (int p = 0; p < n_pairs; ++p) {
    const double s = horizon * double(p) / double(n_pairs);
    const double t = std::min(horizon, s + delta);

    std::vector<TensorField> samples;
    double radius = 0.0;
    for (int q = 0; q < n_samples; ++q) {
      TensorField z = constraint.project(
          random_tensor_field(constraint.grid(), rng, 1.0), s);
      radius = std::max(radius, norm_l2(z));
      samples.push_back(std::move(z));
    }

    study.data = constraint.condition_h_data(radius * (1.0 + 1e-9), kappa,
                                             regime, 0.0, horizon, 65);
    const HReport rep =
        constraint.verify_condition_h({{s, t}}, samples, study.data);
    study.report.worst_h1_slack =
        std::min(study.report.worst_h1_slack, rep.worst_h1_slack);
    study.report.worst_h2_slack =
        std::min(study.report.worst_h2_slack, rep.worst_h2_slack);
    study.report.checked += rep.checked;
    study.report.pass = study.report.pass && rep.pass;
    for (const auto& f : rep.failures) study.report.failures.push_back(f);
  }
  return study;
}

HReport ConstraintSet::verify_condition_h(
    const std::vector<std::pair<double, double>>& pairs,
    const std::vector<TensorField>& samples, const ConditionHData& data) const {
  HReport rep;
  rep.worst_h1_slack = 1e300;
  rep.worst_h2_slack = 1e300;

  auto phi = [&](const TensorField& z) {
    // value of the convex functional on its domain; membership is checked
    // separately, so only the quadratic part shows up here
    if (data.regime == ConditionHRegime::Indicator) return 0.0;
    const double n = norm_hdiv(z);
    return 0.5 * data.kappa * n * n;
  };

  for (const auto& [s, t] : pairs) {
    const double int_alpha = integrate(data.alpha_eval, s, t);
    const double int_beta = integrate(data.beta_eval, s, t);
    for (const TensorField& z : samples) {
      const MembershipReport in_ks = membership(z, s, membership_tol_);
      if (!in_ks.feasible) {
        std::ostringstream os;
        os << "verify_condition_h: sample not in K(s) at s=" << s
           << " (violation " << in_ks.max_violation << ")";
        throw BadParameters(os.str());
      }
      if (data.regime == ConditionHRegime::Indicator &&
          norm_l2(z) > data.r * (1.0 + 1e-12)) {
        throw BadParameters(
            "verify_condition_h: sample leaves the L2 ball the alpha_r data "
            "was built for");
      }
      const auto [zt, theta] = shrink_transport(z, s, t);
      const double phi_s = phi(z);
      const double phi_t = phi(zt);

      TensorField diff = zt;
      diff -= z;
      const double h1_lhs = norm_l2(diff);
      const double h1_rhs = int_alpha * (1.0 + std::sqrt(std::abs(phi_s)));
      const double h2_lhs = phi_t - phi_s;
      const double h2_rhs = int_beta * (1.0 + std::abs(phi_s));

      HCheck chk;
      chk.s = s;
      chk.t = t;
      chk.theta = theta;
      chk.h1_slack = h1_rhs - h1_lhs;
      chk.h2_slack = h2_rhs - h2_lhs;
      rep.worst_h1_slack = std::min(rep.worst_h1_slack, chk.h1_slack);
      rep.worst_h2_slack = std::min(rep.worst_h2_slack, chk.h2_slack);
      ++rep.checked;
      if (chk.h1_slack < 0.0 || chk.h2_slack < 0.0) rep.failures.push_back(chk);
    }
  }
  rep.pass = rep.failures.empty() && rep.checked > 0;
  return rep;
}

}  // namespace psweep
