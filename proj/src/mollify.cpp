#include "psweep/mollify.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "psweep/errors.hpp"

namespace psweep {

namespace {

void check_plan(const MollificationPlan& plan) {
  if (!plan.base.g) throw BadPlan("mollify: base threshold missing");
  if (!(plan.w0 > 0.0)) throw BadPlan("mollify: w0 must be positive");
  if (!(plan.horizon > 0.0)) throw BadPlan("mollify: horizon must be positive");
  if (plan.indices.empty()) throw BadPlan("mollify: empty index list");
  int prev = 0;
  for (int n : plan.indices) {
    if (n <= prev) throw BadPlan("mollify: indices must be ascending and >= 1");
    prev = n;
  }
}

// C^1 bump on [-1,1] with unit mass and its derivative
inline double kernel(double u) {
  const double q = 1.0 - u * u;
  return (15.0 / 16.0) * q * q;
}
inline double kernel_prime(double u) {
  return -(15.0 / 4.0) * u * (1.0 - u * u);
}

}  // namespace

ThresholdField mollify_threshold(const MollificationPlan& plan, int n) {
  check_plan(plan);
  bool listed = false;
  for (int m : plan.indices) listed = listed || m == n;
  if (!listed) throw BadPlan("mollify: index " + std::to_string(n) + " not in plan");

  if (plan.base.tag == Regularity::H1InTime) return plan.base;

  const double w = plan.w0 / double(n);
  const double T = plan.horizon;
  const double c1 = plan.base.c1;
  const double c2 = plan.base.c2;
  const auto base_g = plan.base.g;

  // composite Simpson on [-1,1]; the kernel vanishes at the ends so the
  // convolution of the constant-extended g stays inside [c1, c2]
  const int M = 200;
  auto convolve = [base_g, w, T, M](double t, double x1, double x2, double x3,
                                    bool derivative) {
    const double du = 2.0 / double(M);
    double acc = 0.0;
    for (int i = 0; i <= M; ++i) {
      const double u = -1.0 + i * du;
      const double s = std::clamp(t - w * u, 0.0, T);
      const double weight = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double k = derivative ? kernel_prime(u) : kernel(u);
      acc += weight * k * base_g(s, x1, x2, x3);
    }
    return acc * du / 3.0;
  };

  ThresholdField out;
  out.c1 = c1;
  out.c2 = c2;
  out.tag = Regularity::H1InTime;
  out.g = [convolve, c1, c2](double t, double x1, double x2, double x3) {
    return std::clamp(convolve(t, x1, x2, x3, false), c1, c2);
  };
  out.dgdt = [convolve, w](double t, double x1, double x2, double x3) {
    return convolve(t, x1, x2, x3, true) / w;
  };
  return out;
}

double threshold_sup_gap(const ThresholdField& a, const ThresholdField& b,
                         const Grid& grid, double horizon, int time_samples) {
  const int nt = std::max(2, time_samples);
  double gap = 0.0;
  for (int it = 0; it < nt; ++it) {
    const double t = horizon * double(it) / double(nt - 1);
    for (int k = 0; k < grid.nz(); ++k)
      for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i) {
          const Vec3 x = grid.coord(i, j, k);
          gap = std::max(gap, std::abs(a.g(t, x[0], x[1], x[2]) -
                                       b.g(t, x[0], x[1], x[2])));
        }
  }
  return gap;
}

ShrinkInitialResult shrink_initial(const TensorField& sigma0,
                                   const ThresholdField& g,
                                   const ThresholdField& gn,
                                   const ShiftField& shift, const Grid& grid) {
  // sup_x |g_n(0,x) - g(0,x)| over grid nodes
  double gap = 0.0;
  for (int k = 0; k < grid.nz(); ++k)
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const Vec3 x = grid.coord(i, j, k);
        gap = std::max(gap, std::abs(gn.g(0.0, x[0], x[1], x[2]) -
                                     g.g(0.0, x[0], x[1], x[2])));
      }
  if (gap >= g.c1) {
    std::ostringstream os;
    os << "shrink_initial: |g_n(0) - g(0)|_C = " << gap << " >= C1 = " << g.c1;
    throw WindowTooWide(os.str());
  }
  const double theta0 = 1.0 - gap / g.c1;

  const TensorField shift0 = shift.materialize(grid, 0.0);
  TensorField out(grid);
  long n = 0;
  for (int k = 0; k < grid.nz(); ++k)
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i, ++n) {
        const Vec3 x = grid.coord(i, j, k);
        SymTensor3 shrunk = theta0 * (sigma0[n] + shift0[n]) - shift0[n];
        const double gval = gn.g(0.0, x[0], x[1], x[2]);
        if (deviatoric_ball_violation(shrunk + shift0[n], gval) > 0.0)
          shrunk = project_deviatoric_ball(shrunk + shift0[n], gval) - shift0[n];
        out[n] = shrunk;
      }
  return {std::move(out), theta0};
}

CauchyReport cauchy_study(const CoupledProblem& base,
                          const MollificationPlan& plan) {
  check_plan(plan);
  if (plan.indices.size() < 2)
    throw BadPlan("cauchy_study: need at least two plan indices");

  CauchyReport rep;
  std::vector<Trajectory> trajectories;
  std::vector<ThresholdField> thresholds;
  for (int n : plan.indices) {
    const auto t_start = std::chrono::steady_clock::now();
    ThresholdField gn = mollify_threshold(plan, n);
    const auto sh = shrink_initial(base.sigma0, plan.base, gn,
                                   base.constraint.shift(), base.grid);
    CoupledProblem pb = base;
    pb.regime = Regime::Regularized;
    pb.constraint = ConstraintSet(gn, base.constraint.shift(), base.grid,
                                  base.constraint.membership_tol());
    pb.sigma0 = sh.sigma0n;
    trajectories.push_back(march(pb));
    thresholds.push_back(gn);
    const auto t_end = std::chrono::steady_clock::now();

    CauchyRow row;
    row.n = n;
    row.sup_g_gap = threshold_sup_gap(gn, plan.base, base.grid, base.T, 64);
    row.runtime_seconds =
        std::chrono::duration<double>(t_end - t_start).count();
    rep.rows.push_back(row);
  }

  for (size_t i = 0; i + 1 < trajectories.size(); ++i) {
    double d = 0.0;
    const auto& a = trajectories[i];
    const auto& b = trajectories[i + 1];
    for (size_t k = 0; k < a.sigma.size(); ++k) {
      TensorField diff = a.sigma[k];
      diff -= b.sigma[k];
      d = std::max(d, norm_l2(diff));
    }
    rep.rows[i].d_n = d;
  }

  rep.gaps_nonincreasing = true;
  for (size_t i = 0; i + 2 < rep.rows.size(); ++i)
    rep.gaps_nonincreasing =
        rep.gaps_nonincreasing && rep.rows[i + 1].d_n <= rep.rows[i].d_n;

  // the finest solution must satisfy the unmollified constraint up to the
  // threshold gap
  const ConstraintSet base_set(plan.base, base.constraint.shift(), base.grid,
                               base.constraint.membership_tol());
  const Trajectory& finest = trajectories.back();
  const double tol = rep.rows.back().sup_g_gap + 1e-10;
  rep.final_feasible_for_base = true;
  for (size_t k = 0; k < finest.sigma.size(); ++k) {
    const auto m = base_set.membership(finest.sigma[k], finest.times[k], tol);
    rep.final_feasible_for_base = rep.final_feasible_for_base && m.feasible;
  }
  return rep;
}

}  // namespace psweep
