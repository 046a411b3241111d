#include "psweep/tensor.hpp"

#include <limits>

#include "psweep/errors.hpp"

namespace psweep {

SymTensor3 deviator(const SymTensor3& tau) {
  const double m = tau.trace() / 3.0;
  return {tau.t11() - m, tau.t22() - m, tau.t33() - m,
          tau.t12(),     tau.t13(),     tau.t23()};
}

SymTensor3 trace_part(const SymTensor3& tau) {
  const double m = tau.trace() / 3.0;
  return SymTensor3::diag(m, m, m);
}

double frobenius_inner(const SymTensor3& a, const SymTensor3& b) {
  return a.t11() * b.t11() + a.t22() * b.t22() + a.t33() * b.t33() +
         2.0 * (a.t12() * b.t12() + a.t13() * b.t13() + a.t23() * b.t23());
}

double frobenius_norm(const SymTensor3& a) {
  return std::sqrt(frobenius_inner(a, a));
}

double deviatoric_ball_violation(const SymTensor3& tau, double g) {
  const SymTensor3 dev = deviator(tau);
  return 0.5 * frobenius_inner(dev, dev) - g;
}

SymTensor3 project_deviatoric_ball(const SymTensor3& tau, double g) {
  if (!(g > 0.0)) {
    throw NonPositiveThreshold("project_deviatoric_ball: threshold g = " +
                               std::to_string(g) + " must be positive");
  }
  const SymTensor3 dev = deviator(tau);
  const double q = 0.5 * frobenius_inner(dev, dev);
  if (q <= g) return tau;

  const double m = tau.trace() / 3.0;
  double scale = std::sqrt(2.0 * g) / std::sqrt(2.0 * q);
  SymTensor3 out = SymTensor3::diag(m, m, m) + scale * dev;
  // Rounding can leave the scaled deviator a few ulps outside the ball;
  // nudge down so a repeated projection is an exact no-op.
  while (deviatoric_ball_violation(out, g) > 0.0) {
    scale *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    out = SymTensor3::diag(m, m, m) + scale * dev;
  }
  return out;
}

}  // namespace psweep
