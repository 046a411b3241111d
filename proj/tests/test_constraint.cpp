#include <doctest.h>

#include <cmath>

#include "psweep/constraint.hpp"
#include "psweep/errors.hpp"
#include "psweep/rng.hpp"

using namespace psweep;

namespace {

Grid test_grid() { return Grid(4, 4, 4, 0.25, 0.25, 0.25, {Face::XMin}); }

ThresholdField linear_threshold(double a, double b, double c1, double c2) {
  // g(t) = a + b t
  ThresholdField f;
  f.g = [a, b](double t, double, double, double) { return a + b * t; };
  f.dgdt = [b](double, double, double, double) { return b; };
  f.c1 = c1;
  f.c2 = c2;
  f.tag = Regularity::H1InTime;
  return f;
}

}  // namespace

TEST_SUITE("constraint") {

TEST_CASE("validate: constant threshold passes with tight bounds") {
  const Grid g = test_grid();
  const auto rep = validate_threshold(ThresholdField::constant(1.0), g, 0, 1, 9);
  CHECK(rep.pass);
  CHECK(rep.min_g == doctest::Approx(1.0));
  CHECK(rep.max_g == doctest::Approx(1.0));
}

TEST_CASE("validate: sinusoidal threshold stays within certified bounds") {
  ThresholdField f;
  f.g = [](double t, double, double, double) { return 1.5 + 0.4 * std::sin(t); };
  f.dgdt = [](double t, double, double, double) { return 0.4 * std::cos(t); };
  f.c1 = 1.0;
  f.c2 = 2.0;
  f.tag = Regularity::H1InTime;
  CHECK(validate_threshold(f, test_grid(), 0, 1, 17).pass);
}

TEST_CASE("validate: g(t) = t fails at t = 0") {
  ThresholdField f = linear_threshold(0.0, 1.0, 0.1, 1.0);
  CHECK_THROWS_AS(validate_threshold(f, test_grid(), 0, 1, 9),
                  ThresholdViolation);
}

TEST_CASE("membership: -sigma* always belongs to K(t)") {
  const Grid g = test_grid();
  const SymTensor3 s(0.3, -0.1, 0.2, 0.15, 0.0, 0.05);
  const ConstraintSet cs(ThresholdField::constant(1.0), ShiftField::constant(s), g);
  TensorField tau(g);
  for (long n = 0; n < tau.size(); ++n) tau[n] = -1.0 * s;
  const auto rep = cs.membership(tau, 0.5, 1e-12);
  CHECK(rep.feasible);
  CHECK(rep.max_violation == 0.0);
}

TEST_CASE("membership: hand-computed violation") {
  const Grid g = test_grid();
  const ConstraintSet cs(ThresholdField::constant(1.0), ShiftField::zero(), g);
  TensorField tau(g);
  tau.at(1, 2, 3) = std::sqrt(2.0) * SymTensor3::diag(2, -1, -1);
  // (1/2)|dev|^2 = (1/2) * 2 * 6 = 6, minus g = 1 leaves 5
  const auto rep = cs.membership(tau, 0.0, 1e-12);
  CHECK(rep.max_violation == doctest::Approx(5.0).epsilon(1e-13));
  CHECK_FALSE(rep.feasible);
}

TEST_CASE("project: members are unchanged, outputs are members") {
  const Grid g = test_grid();
  const ConstraintSet cs(ThresholdField::constant(1.0), ShiftField::zero(), g);
  Rng rng(31);
  const TensorField raw = random_tensor_field(g, rng, 2.0);
  const TensorField proj = cs.project(raw, 0.0);
  CHECK(cs.membership(proj, 0.0, 1e-12).feasible);
  TensorField again = cs.project(proj, 0.0);
  again -= proj;
  CHECK(norm_l2(again) == 0.0);  // idempotent through the field layer
}

TEST_CASE("project: single node against the tensor formula") {
  const Grid g = Grid::homogeneous_point();
  const ConstraintSet cs(ThresholdField::constant(1.0), ShiftField::zero(), g);
  TensorField tau(g);
  tau[0] = SymTensor3::diag(2, -1, -1);
  const TensorField p = cs.project(tau, 0.0);
  const double scale = 1.0 / std::sqrt(3.0);
  CHECK(p[0].t11() == doctest::Approx(2.0 * scale).epsilon(1e-12));
}

TEST_CASE("project: shift consistency") {
  const Grid g = test_grid();
  const SymTensor3 s(0.4, 0.0, -0.2, 0.1, 0.0, 0.0);
  const ConstraintSet cs(ThresholdField::constant(1.0), ShiftField::constant(s), g);
  // tau = -s + w with w feasible stays put
  const SymTensor3 w = SymTensor3::diag(0.5, -0.2, -0.3);
  TensorField tau(g);
  for (long n = 0; n < tau.size(); ++n) tau[n] = w - s;
  TensorField p = cs.project(tau, 0.0);
  p -= tau;
  CHECK(norm_l2(p) == 0.0);
}

TEST_CASE("project is nonexpansive in the L2 norm") {
  const Grid g = test_grid();
  const ConstraintSet cs(ThresholdField::constant(0.7), ShiftField::zero(), g);
  Rng rng(32);
  for (int it = 0; it < 50; ++it) {
    const TensorField a = random_tensor_field(g, rng, 2.0);
    const TensorField b = random_tensor_field(g, rng, 2.0);
    TensorField pa = cs.project(a, 0.0);
    pa -= cs.project(b, 0.0);
    TensorField ab = a;
    ab -= b;
    CHECK(norm_l2(pa) <= norm_l2(ab) * (1.0 + 1e-12));
  }
}

TEST_CASE("shrink_transport: static threshold gives theta = 1") {
  const Grid g = test_grid();
  const SymTensor3 s(0.2, 0.0, 0.0, 0.1, 0.0, 0.0);
  ShiftField shift;
  shift.value = [s](double t, double, double, double) { return (1.0 + t) * s; };
  shift.derivative = [s](double, double, double, double) { return s; };
  const ConstraintSet cs(ThresholdField::constant(1.0), shift, g);
  Rng rng(33);
  const TensorField tau = cs.project(random_tensor_field(g, rng, 1.0), 0.2);
  const auto res = cs.shrink_transport(tau, 0.2, 0.7);
  CHECK(res.theta == 1.0);
  // tau_* = tau + sigma*(s) - sigma*(t)
  TensorField expected = tau;
  for (long n = 0; n < expected.size(); ++n) expected[n] += (1.2 - 1.7) * s;
  TensorField diff = res.tau;
  diff -= expected;
  CHECK(norm_l2(diff) <= 1e-13);
  CHECK(cs.membership(res.tau, 0.7, 1e-12).feasible);
}

TEST_CASE("shrink_transport: the threshold-drop formula for theta") {
  // g(s)=2 at s=0, g(t)=1.5 at t=1, C1=1 gives theta = 0.5
  const Grid g = test_grid();
  const ConstraintSet cs(linear_threshold(2.0, -0.5, 1.0, 2.0),
                         ShiftField::zero(), g);
  const TensorField tau(g);  // zero field is inside K(s)
  const auto res = cs.shrink_transport(tau, 0.0, 1.0);
  CHECK(res.theta == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("shrink_transport: random members land in K(t) after a drop") {
  const Grid g = test_grid();
  const ConstraintSet cs(linear_threshold(1.0, -0.1, 0.5, 1.0),
                         ShiftField::zero(), g);
  Rng rng(34);
  for (int it = 0; it < 20; ++it) {
    const TensorField tau = cs.project(random_tensor_field(g, rng, 1.5), 0.0);
    const auto res = cs.shrink_transport(tau, 0.0, 1.0);  // drop 0.1
    CHECK(res.theta > 0.0);
    CHECK(res.theta <= 1.0);
    CHECK(cs.membership(res.tau, 1.0, 1e-12).max_violation <= 1e-12);
  }
}

TEST_CASE("shrink_transport: too wide a window is refused") {
  const Grid g = test_grid();
  // drop of 0.6 >= C1 = 0.5 between s=0 and t=1
  const ConstraintSet cs(linear_threshold(1.2, -0.6, 0.5, 1.2),
                         ShiftField::zero(), g);
  const TensorField tau(g);
  CHECK_THROWS_AS(cs.shrink_transport(tau, 0.0, 1.0), WindowTooWide);
}

TEST_CASE("condition_h_data: static data gives vanishing alpha and beta") {
  const Grid g = test_grid();
  const ConstraintSet cs(ThresholdField::constant(1.0), ShiftField::zero(), g);
  const auto data = cs.condition_h_data(3.0, 1.0, ConditionHRegime::Regularized,
                                        0.0, 1.0, 9);
  for (double a : data.alpha) CHECK(a == 0.0);
  for (double b : data.beta) CHECK(b == 0.0);
}

TEST_CASE("condition_h_data: indicator formula") {
  // sigma* = 0, g(t) = 2 - t, C1 = 1, r = 3: alpha = |g'| * r / C1 = 3
  const Grid g = test_grid();
  const ConstraintSet cs(linear_threshold(2.0, -1.0, 1.0, 2.0),
                         ShiftField::zero(), g);
  const auto data =
      cs.condition_h_data(3.0, 0.0, ConditionHRegime::Indicator, 0.0, 1.0, 5);
  for (double a : data.alpha) CHECK(a == doctest::Approx(3.0).epsilon(1e-13));
  for (double b : data.beta) CHECK(b == 0.0);
}

TEST_CASE("condition_h_data: regularized formula with kappa = 2") {
  const Grid g = test_grid();
  const ConstraintSet cs(linear_threshold(2.0, -1.0, 1.0, 2.0),
                         ShiftField::zero(), g);
  const auto data = cs.condition_h_data(0.0, 2.0, ConditionHRegime::Regularized,
                                        0.0, 1.0, 5);
  // alpha = (1/C1)|g'| sqrt(2/kappa) = 1
  for (double a : data.alpha) CHECK(a == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("condition_h_data: continuous thresholds are refused") {
  const Grid g = test_grid();
  ThresholdField f = ThresholdField::constant(1.0);
  f.tag = Regularity::Continuous;
  f.dgdt = nullptr;
  const ConstraintSet cs(f, ShiftField::zero(), g);
  CHECK_THROWS_AS(
      cs.condition_h_data(1.0, 1.0, ConditionHRegime::Regularized, 0, 1, 5),
      MissingDerivative);
}

TEST_CASE("verify_condition_h: static data has zero lhs and passes") {
  const Grid g = test_grid();
  const ConstraintSet cs(ThresholdField::constant(1.0), ShiftField::zero(), g);
  const auto data = cs.condition_h_data(5.0, 1.0, ConditionHRegime::Regularized,
                                        0.0, 1.0, 9);
  Rng rng(35);
  std::vector<TensorField> samples;
  for (int i = 0; i < 10; ++i)
    samples.push_back(cs.project(random_tensor_field(g, rng, 1.0), 0.0));
  const auto rep = cs.verify_condition_h({{0.0, 0.5}}, samples, data);
  CHECK(rep.pass);
  CHECK(rep.worst_h1_slack >= 0.0);
  CHECK(rep.worst_h2_slack >= 0.0);
}

TEST_CASE("verify_condition_h: linear threshold drop keeps (H1) slack nonnegative") {
  const Grid g = test_grid();
  const ConstraintSet cs(linear_threshold(1.5, -1.0, 1.0, 1.5),
                         ShiftField::zero(), g);
  Rng rng(36);
  std::vector<TensorField> samples;
  for (int i = 0; i < 100; ++i)
    samples.push_back(cs.project(random_tensor_field(g, rng, 1.2), 0.1));
  double r = 0.0;
  for (const auto& z : samples) r = std::max(r, norm_l2(z));
  const auto data = cs.condition_h_data(r * (1 + 1e-12), 0.0,
                                        ConditionHRegime::Indicator, 0, 0.5, 9);
  const auto rep = cs.verify_condition_h({{0.1, 0.2}}, samples, data);
  CHECK(rep.pass);
  CHECK(rep.worst_h1_slack >= 0.0);
  // indicator regime: (H2) reads 0 <= 0
  CHECK(rep.worst_h2_slack == 0.0);
}

TEST_CASE("canned condition-h study passes on regular data") {
  const Grid g = test_grid();
  ThresholdField f;
  f.g = [](double t, double, double, double) { return 1.5 + 0.3 * std::sin(t); };
  f.dgdt = [](double t, double, double, double) { return 0.3 * std::cos(t); };
  f.c1 = 1.0;
  f.c2 = 2.0;
  const SymTensor3 s(0.2, 0.0, -0.1, 0.05, 0.0, 0.0);
  ShiftField shift;
  shift.value = [s](double t, double, double, double) {
    return (0.5 + 0.2 * std::sin(t)) * s;
  };
  shift.derivative = [s](double t, double, double, double) {
    return (0.2 * std::cos(t)) * s;
  };
  const ConstraintSet cs(f, shift, g);
  const auto reg = run_condition_h_study(cs, 1.0, ConditionHRegime::Regularized,
                                         0.5, 4, 10, 99);
  CHECK(reg.report.pass);
  CHECK(reg.report.checked == 40);
  const auto ind = run_condition_h_study(cs, 1.0, ConditionHRegime::Indicator,
                                         0.0, 4, 10, 99);
  CHECK(ind.report.pass);
}

}  // TEST_SUITE
