#include <doctest.h>

#include <cmath>

#include "psweep/errors.hpp"
#include "psweep/scalar_sweep.hpp"

using namespace psweep;

TEST_SUITE("oracle") {

TEST_CASE("stop operator: drive to a constant boundary") {
  const ScalarSweepProblem p = oracle_drive_to_boundary();
  const ScalarTrajectory traj = stop_operator_exact(p);
  // sigma(t) = 2t until t = 1/2, then 1; checked against a fine-step
  // catching-up
  for (double t : {0.1, 0.25, 0.49, 0.5, 0.7, 1.0}) {
    const double expected = t <= 0.5 ? 2.0 * t : 1.0;
    CHECK(traj.eval(t) == doctest::Approx(expected).epsilon(1e-12));
  }
  const SymTensor3 dir = (1.0 / std::sqrt(6.0)) * SymTensor3::diag(2, -1, -1);
  const auto fine = homogeneous_sweep_reference(
      [&p](double t) {
        const double r = p.radius(t);
        return 0.5 * r * r;
      },
      [&p, dir](double t) { return p.rate(t) * dir; }, p.sigma0 * dir, 1.0,
      1e-5);
  double worst = 0.0;
  for (size_t k = 0; k < fine.t.size(); k += 100)
    worst = std::max(worst, std::abs(frobenius_inner(fine.sigma[k], dir) -
                                     traj.eval(fine.t[k])));
  CHECK(worst <= 1e-5);
}

TEST_CASE("stop operator: pure sweeping by a shrinking boundary") {
  const ScalarSweepProblem p = oracle_shrinking_radius();
  const ScalarTrajectory traj = stop_operator_exact(p);
  for (double t : {0.0, 0.3, 0.5, 0.9, 1.0})
    CHECK(traj.eval(t) == doctest::Approx(1.0 - 0.5 * t).epsilon(1e-12));
}

TEST_CASE("stop operator: interior state without drive stays put") {
  ScalarSweepProblem p;
  p.radius = PiecewiseLinear::constant(1.0, 1.0);
  p.rate = PiecewiseConstant::constant(0.0);
  p.sigma0 = 0.4;
  p.horizon = 1.0;
  const ScalarTrajectory traj = stop_operator_exact(p);
  for (double t : {0.0, 0.5, 1.0})
    CHECK(traj.eval(t) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("stop operator: detach when the drive reverses") {
  ScalarSweepProblem p;
  p.radius = PiecewiseLinear::constant(1.0, 1.0);
  p.rate = {{0.0, 0.6}, {2.0, -2.0}};
  p.sigma0 = 0.0;
  p.horizon = 1.0;
  const ScalarTrajectory traj = stop_operator_exact(p);
  // hits the boundary at t = 0.5, stays until 0.6, then retreats
  CHECK(traj.eval(0.55) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(traj.eval(0.8) == doctest::Approx(1.0 - 2.0 * 0.2).epsilon(1e-12));
}

TEST_CASE("stop operator: boundary catches an interior state") {
  ScalarSweepProblem p;
  p.radius = {{0.0, 1.0}, {1.0, 0.2}};  // shrinks at rate 0.8
  p.rate = PiecewiseConstant::constant(0.0);
  p.sigma0 = 0.6;
  p.horizon = 1.0;
  const ScalarTrajectory traj = stop_operator_exact(p);
  // r(t) = 1 - 0.8t reaches 0.6 at t = 0.5
  CHECK(traj.eval(0.3) == doctest::Approx(0.6).epsilon(1e-13));
  CHECK(traj.eval(0.75) == doctest::Approx(1.0 - 0.8 * 0.75).epsilon(1e-12));
}

TEST_CASE("stop operator rejects degenerate radii") {
  ScalarSweepProblem p;
  p.radius = {{0.0, 1.0}, {1.0, -0.2}};
  p.rate = PiecewiseConstant::constant(0.0);
  p.sigma0 = 0.0;
  p.horizon = 1.0;
  CHECK_THROWS_AS(stop_operator_exact(p), DegenerateRadius);
}

TEST_CASE("homogeneous sweep: zero drive under a growing threshold is constant") {
  const SymTensor3 dir = (1.0 / std::sqrt(6.0)) * SymTensor3::diag(2, -1, -1);
  const auto fine = homogeneous_sweep_reference(
      [](double t) { return 0.5 + 0.4 * t; },
      [](double) { return SymTensor3{}; }, 0.9 * dir, 1.0, 1e-4);
  for (size_t k = 0; k < fine.t.size(); k += 1000)
    CHECK(frobenius_norm(fine.sigma[k] - 0.9 * dir) <= 1e-12);
}

TEST_CASE("homogeneous sweep: shrinking threshold tracks the boundary") {
  const SymTensor3 dir = (1.0 / std::sqrt(6.0)) * SymTensor3::diag(2, -1, -1);
  auto g = [](double t) {
    const double r = 1.0 - 0.4 * t;
    return 0.5 * r * r;
  };
  const auto fine = homogeneous_sweep_reference(
      g, [](double) { return SymTensor3{}; }, dir, 1.0, 1e-5);
  for (size_t k = 0; k < fine.t.size(); k += 5000) {
    const double r = std::sqrt(2.0 * g(fine.t[k]));
    CHECK(frobenius_norm(fine.sigma[k]) == doctest::Approx(r).epsilon(1e-9));
  }
}

TEST_CASE("oracle trajectories are feasible at all output times") {
  for (const ScalarSweepProblem& p :
       {oracle_drive_to_boundary(), oracle_shrinking_radius()}) {
    const ScalarTrajectory traj = stop_operator_exact(p);
    for (int m = 0; m <= 1000; ++m) {
      const double t = p.horizon * double(m) / 1000.0;
      CHECK(std::abs(traj.eval(t)) <= p.radius(t) + 1e-12);
    }
  }
}

TEST_CASE("production catching-up converges at first order to the oracle") {
  const std::vector<double> dts = {1e-2, 5e-3, 2.5e-3};
  for (const ScalarSweepProblem& p :
       {oracle_drive_to_boundary(), oracle_shrinking_radius()}) {
    const SweepAccuracyReport rep = sweep_accuracy_study(p, dts);
    for (const auto& row : rep.rows) {
      CHECK(row.sup_error > 0.0);
      CHECK(row.sup_error <= 2.0 * row.dt);
    }
    CHECK(rep.min_order >= 0.9);
  }
}

}  // TEST_SUITE
