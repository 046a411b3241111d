#include "psweep/scalar_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "psweep/constraint.hpp"
#include "psweep/errors.hpp"
#include "psweep/subsolvers.hpp"

namespace psweep {

double PiecewiseLinear::operator()(double s) const {
  if (t.empty()) return 0.0;
  if (s <= t.front()) return v.front();
  if (s >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const size_t i = size_t(it - t.begin()) - 1;
  const double w = (s - t[i]) / (t[i + 1] - t[i]);
  return v[i] + w * (v[i + 1] - v[i]);
}

double PiecewiseLinear::slope(double s) const {
  if (t.size() < 2) return 0.0;
  size_t i;
  if (s >= t.back())
    i = t.size() - 2;
  else {
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    i = it == t.begin() ? 0 : size_t(it - t.begin()) - 1;
    if (i > t.size() - 2) i = t.size() - 2;
  }
  return (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
}

PiecewiseLinear PiecewiseLinear::constant(double value, double t_end) {
  return {{0.0, t_end}, {value, value}};
}

double PiecewiseConstant::operator()(double s) const {
  if (t.empty()) return 0.0;
  if (s < t.front()) return v.front();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const size_t i = size_t(it - t.begin()) - 1;
  return v[std::min(i, v.size() - 1)];
}

PiecewiseConstant PiecewiseConstant::constant(double value) {
  return {{0.0}, {value}};
}

double ScalarTrajectory::eval(double s) const {
  if (t.empty()) return 0.0;
  if (s <= t.front()) return sigma.front();
  if (s >= t.back()) return sigma.back();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const size_t i = size_t(it - t.begin()) - 1;
  const double w = (s - t[i]) / (t[i + 1] - t[i]);
  return sigma[i] + w * (sigma[i + 1] - sigma[i]);
}

ScalarTrajectory stop_operator_exact(const ScalarSweepProblem& p) {
  const double T = p.horizon;
  if (!(T > 0.0)) throw BadParameters("stop_operator_exact: horizon must be > 0");

  // merged breakpoint grid of r and G restricted to [0, T]
  std::set<double> marks = {0.0, T};
  for (double s : p.radius.t)
    if (s > 0.0 && s < T) marks.insert(s);
  for (double s : p.rate.t)
    if (s > 0.0 && s < T) marks.insert(s);

  for (double s : marks) {
    if (!(p.radius(s) > 0.0)) {
      std::ostringstream os;
      os << "stop_operator_exact: radius " << p.radius(s) << " at t=" << s;
      throw DegenerateRadius(os.str());
    }
  }
  if (std::abs(p.sigma0) > p.radius(0.0) + 1e-14)
    throw BadParameters("stop_operator_exact: sigma0 outside [-r(0), r(0)]");

  ScalarTrajectory traj;
  traj.t.push_back(0.0);
  traj.sigma.push_back(std::clamp(p.sigma0, -p.radius(0.0), p.radius(0.0)));

  std::vector<double> grid(marks.begin(), marks.end());
  const double eps = 1e-14;

  for (size_t m = 0; m + 1 < grid.size(); ++m) {
    double a = grid[m];
    const double b = grid[m + 1];
    const double G = p.rate(0.5 * (a + b));
    const double rho = p.radius.slope(0.5 * (a + b));

    // march within [a, b]; at most two events (attach can happen once,
    // after which the state tracks the boundary until b)
    double sigma = traj.sigma.back();
    while (a < b - eps) {
      const double ra = p.radius(a);
      const bool on_upper = sigma >= ra - eps;
      const bool on_lower = sigma <= -ra + eps;
      if (on_upper && G >= rho) {
        // track the upper boundary to the end of the interval
        sigma = p.radius(b);
        traj.t.push_back(b);
        traj.sigma.push_back(sigma);
        a = b;
      } else if (on_lower && G <= -rho) {
        sigma = -p.radius(b);
        traj.t.push_back(b);
        traj.sigma.push_back(sigma);
        a = b;
      } else {
        // free flight; find the first boundary crossing in (a, b]
        double hit = b;
        if (G - rho > eps) {
          const double s = a + (ra - sigma) / (G - rho);
          if (s > a + eps && s < hit) hit = s;
        }
        if (G + rho < -eps) {
          const double s = a + (-ra - sigma) / (G + rho);
          if (s > a + eps && s < hit) hit = s;
        }
        sigma += G * (hit - a);
        // clamp float dust so a subsequent contact test sees the boundary
        sigma = std::clamp(sigma, -p.radius(hit), p.radius(hit));
        traj.t.push_back(hit);
        traj.sigma.push_back(sigma);
        a = hit;
      }
    }
  }
  return traj;
}

HomogeneousSweepResult homogeneous_sweep_reference(
    const std::function<double(double)>& g,
    const std::function<SymTensor3(double)>& drive, const SymTensor3& sigma0,
    double horizon, double dt_fine) {
  if (!(dt_fine > 0.0) || !(horizon > 0.0))
    throw BadParameters("homogeneous_sweep_reference: bad horizon or step");
  const long n = std::lround(horizon / dt_fine);
  HomogeneousSweepResult out;
  out.t.reserve(n + 1);
  out.sigma.reserve(n + 1);
  SymTensor3 sigma = project_deviatoric_ball(sigma0, g(0.0));
  out.t.push_back(0.0);
  out.sigma.push_back(sigma);
  for (long k = 1; k <= n; ++k) {
    const double t = k * dt_fine;
    sigma += dt_fine * drive(t);
    sigma = project_deviatoric_ball(sigma, g(t));
    out.t.push_back(t);
    out.sigma.push_back(sigma);
  }
  return out;
}

ScalarSweepProblem oracle_drive_to_boundary() {
  ScalarSweepProblem p;
  p.radius = PiecewiseLinear::constant(1.0, 1.0);
  p.rate = PiecewiseConstant::constant(2.0);
  p.sigma0 = 0.0;
  p.horizon = 1.0;
  return p;
}

ScalarSweepProblem oracle_shrinking_radius() {
  ScalarSweepProblem p;
  p.radius = {{0.0, 1.0}, {1.0, 0.5}};
  p.rate = PiecewiseConstant::constant(0.0);
  p.sigma0 = 1.0;
  p.horizon = 1.0;
  return p;
}

SweepAccuracyReport sweep_accuracy_study(const ScalarSweepProblem& p,
                                         const std::vector<double>& dts,
                                         int samples_per_step) {
  const ScalarTrajectory exact = stop_operator_exact(p);

  // deviator direction with unit Frobenius norm
  const SymTensor3 dir = (1.0 / std::sqrt(6.0)) * SymTensor3::diag(2, -1, -1);
  const Grid grid = Grid::homogeneous_point();
  const ConstraintSet constraint(
      ThresholdField{[&p](double t, double, double, double) {
                       const double r = p.radius(t);
                       return 0.5 * r * r;
                     },
                     [](double, double, double, double) { return 0.0; },
                     1e-12, 1e300, Regularity::H1InTime},
      ShiftField::zero(), grid);

  SweepAccuracyReport rep;
  for (double dt : dts) {
    const long n = std::lround(p.horizon / dt);
    TensorField sigma(grid);
    sigma[0] = p.sigma0 * dir;
    double sup_err = 0.0;
    for (long k = 0; k < n; ++k) {
      const double t_next = (k + 1) * dt;
      TensorField drive(grid);
      drive[0] = p.rate(t_next) * dir;
      StressStepProblem step;
      step.sigma_prev = &sigma;
      step.drive = &drive;
      step.t_next = t_next;
      step.dt = dt;
      step.kappa = 0.0;
      step.constraint = &constraint;
      sigma = stress_step_catchup(step);
      // the discrete state is held right-constant over (t_k, t_{k+1}]
      const double value = frobenius_inner(sigma[0], dir);
      for (int s = 1; s <= samples_per_step; ++s) {
        const double tau = k * dt + dt * double(s) / double(samples_per_step);
        sup_err = std::max(sup_err, std::abs(value - exact.eval(tau)));
      }
    }
    rep.rows.push_back({dt, sup_err});
  }
  rep.min_order = 1e300;
  for (size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    const double order =
        std::log(rep.rows[i].sup_error / rep.rows[i + 1].sup_error) /
        std::log(rep.rows[i].dt / rep.rows[i + 1].dt);
    rep.orders.push_back(order);
    rep.min_order = std::min(rep.min_order, order);
  }
  return rep;
}

}  // namespace psweep
