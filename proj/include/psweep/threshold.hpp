#ifndef PSWEEP_THRESHOLD_HPP
#define PSWEEP_THRESHOLD_HPP

#include <functional>
#include <string>
#include <vector>

#include "psweep/fields.hpp"

namespace psweep {

enum class Regularity { H1InTime, Continuous };

//! Yield threshold g(t,x) with certified bounds 0 < C1 <= g <= C2.
//!
//! H1InTime carries an evaluator for dg/dt; Continuous does not, and the
//! operations that need the derivative refuse to run on it.
struct ThresholdField {
  std::function<double(double t, double x1, double x2, double x3)> g;
  std::function<double(double t, double x1, double x2, double x3)> dgdt;
  double c1 = 0.0;
  double c2 = 0.0;
  Regularity tag = Regularity::H1InTime;

  static ThresholdField constant(double value);

  bool has_derivative() const { return bool(dgdt); }

  //! Max over grid nodes of |g(t,.)|-style evaluations.
  double max_over_grid(const Grid& grid, double t) const;
  double min_over_grid(const Grid& grid, double t) const;
  //! max_x |g(t,x) - g(s,x)| over grid nodes, the computable C(Omega)-norm.
  double sup_diff(const Grid& grid, double s, double t) const;
  //! max_x |dg/dt(t,x)| over grid nodes; throws MissingDerivative.
  double sup_dgdt(const Grid& grid, double t) const;
};

//! Stress shift sigma*(t) defining K(t) = K~(t) - sigma*(t).
struct ShiftField {
  std::function<SymTensor3(double t, double x1, double x2, double x3)> value;
  std::function<SymTensor3(double t, double x1, double x2, double x3)> derivative;
  //! H1InTime: sigma* in H^1(0,T;V); Continuous stands in for the weaker
  //! H^1(0,T;H) tag used by the sweeping regime bookkeeping.
  bool h1_in_V = true;

  static ShiftField zero();
  static ShiftField constant(const SymTensor3& s);

  bool has_derivative() const { return bool(derivative); }

  TensorField materialize(const Grid& grid, double t) const;
  TensorField materialize_derivative(const Grid& grid, double t) const;
};

struct ValidationReport {
  bool pass = false;
  double min_g = 0.0;
  double max_g = 0.0;
  double worst_t = 0.0;
  Vec3 worst_x{};
  std::string message;
};

//! Sample g over a time/space lattice and verify 0 < C1 <= g <= C2; with
//! the H1InTime tag also require finite derivative samples.
//! Throws ThresholdViolation when the bounds fail.
ValidationReport validate_threshold(const ThresholdField& threshold,
                                    const Grid& grid, double t_begin,
                                    double t_end, int time_samples);

}  // namespace psweep

#endif
