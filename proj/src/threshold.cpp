#include "psweep/threshold.hpp"

#include <cmath>
#include <sstream>

#include "psweep/errors.hpp"

namespace psweep {

ThresholdField ThresholdField::constant(double value) {
  ThresholdField f;
  f.g = [value](double, double, double, double) { return value; };
  f.dgdt = [](double, double, double, double) { return 0.0; };
  f.c1 = value;
  f.c2 = value;
  f.tag = Regularity::H1InTime;
  return f;
}

double ThresholdField::max_over_grid(const Grid& grid, double t) const {
  double m = -1e300;
  for (int k = 0; k < grid.nz(); ++k)
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const Vec3 x = grid.coord(i, j, k);
        m = std::max(m, g(t, x[0], x[1], x[2]));
      }
  return m;
}

double ThresholdField::min_over_grid(const Grid& grid, double t) const {
  double m = 1e300;
  for (int k = 0; k < grid.nz(); ++k)
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const Vec3 x = grid.coord(i, j, k);
        m = std::min(m, g(t, x[0], x[1], x[2]));
      }
  return m;
}

double ThresholdField::sup_diff(const Grid& grid, double s, double t) const {
  double m = 0.0;
  for (int k = 0; k < grid.nz(); ++k)
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const Vec3 x = grid.coord(i, j, k);
        m = std::max(m, std::abs(g(t, x[0], x[1], x[2]) - g(s, x[0], x[1], x[2])));
      }
  return m;
}

double ThresholdField::sup_dgdt(const Grid& grid, double t) const {
  if (!dgdt)
    throw MissingDerivative("threshold has no time derivative evaluator");
  double m = 0.0;
  for (int k = 0; k < grid.nz(); ++k)
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const Vec3 x = grid.coord(i, j, k);
        m = std::max(m, std::abs(dgdt(t, x[0], x[1], x[2])));
      }
  return m;
}

ShiftField ShiftField::zero() { return constant(SymTensor3{}); }

ShiftField ShiftField::constant(const SymTensor3& s) {
  ShiftField f;
  f.value = [s](double, double, double, double) { return s; };
  f.derivative = [](double, double, double, double) { return SymTensor3{}; };
  f.h1_in_V = true;
  return f;
}

TensorField ShiftField::materialize(const Grid& grid, double t) const {
  return TensorField(grid, [&](double x1, double x2, double x3) {
    return value(t, x1, x2, x3);
  });
}

TensorField ShiftField::materialize_derivative(const Grid& grid,
                                               double t) const {
  if (!derivative)
    throw MissingDerivative("shift has no time derivative evaluator");
  return TensorField(grid, [&](double x1, double x2, double x3) {
    return derivative(t, x1, x2, x3);
  });
}

ValidationReport validate_threshold(const ThresholdField& threshold,
                                    const Grid& grid, double t_begin,
                                    double t_end, int time_samples) {
  ValidationReport report;
  report.min_g = 1e300;
  report.max_g = -1e300;
  const int nt = std::max(2, time_samples);
  for (int it = 0; it < nt; ++it) {
    const double t =
        t_begin + (t_end - t_begin) * double(it) / double(nt - 1);
    for (int k = 0; k < grid.nz(); ++k)
      for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i) {
          const Vec3 x = grid.coord(i, j, k);
          const double v = threshold.g(t, x[0], x[1], x[2]);
          if (v < report.min_g) {
            report.min_g = v;
            if (v < threshold.c1) {
              report.worst_t = t;
              report.worst_x = x;
            }
          }
          report.max_g = std::max(report.max_g, v);
          if (threshold.tag == Regularity::H1InTime) {
            if (!threshold.has_derivative())
              throw MissingDerivative(
                  "threshold tagged H1-in-time but no derivative present");
            const double dv = threshold.dgdt(t, x[0], x[1], x[2]);
            if (!std::isfinite(dv)) {
              std::ostringstream os;
              os << "dg/dt not finite at t=" << t << " x=(" << x[0] << ","
                 << x[1] << "," << x[2] << ")";
              throw ThresholdViolation(os.str());
            }
          }
        }
  }
  if (!(report.min_g > 0.0) || report.min_g < threshold.c1 ||
      report.max_g > threshold.c2) {
    std::ostringstream os;
    os << "threshold bounds violated: sampled range [" << report.min_g << ","
       << report.max_g << "] vs certified [" << threshold.c1 << ","
       << threshold.c2 << "], worst at t=" << report.worst_t << " x=("
       << report.worst_x[0] << "," << report.worst_x[1] << ","
       << report.worst_x[2] << ")";
    report.message = os.str();
    throw ThresholdViolation(report.message);
  }
  report.pass = true;
  report.message = "ok";
  return report;
}

}  // namespace psweep
