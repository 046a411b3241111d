#ifndef PSWEEP_MOLLIFY_HPP
#define PSWEEP_MOLLIFY_HPP

#include <vector>

#include "psweep/coupled.hpp"
#include "psweep/threshold.hpp"

namespace psweep {

//! Smoothing plan for a merely continuous threshold: time-convolution
//! with a C^1 bump of half-width w0/n, clamped back into [C1, C2].
struct MollificationPlan {
  ThresholdField base;
  std::vector<int> indices;  // ascending, >= 1
  double w0 = 0.25;
  double horizon = 0.0;  // constant extension of g outside [0, horizon]
};

//! g_n: H1-in-time threshold with the analytic derivative of the
//! convolution.  An H1-in-time base passes through unchanged.
//! Throws BadPlan on malformed plans.
ThresholdField mollify_threshold(const MollificationPlan& plan, int n);

//! max over sampled (t,x) of |a - b|.
double threshold_sup_gap(const ThresholdField& a, const ThresholdField& b,
                         const Grid& grid, double horizon, int time_samples);

//! Initial data transported into the mollified constraint set:
//! sigma_{0,n} = theta0 (sigma_0 + sigma*(0)) - sigma*(0) with
//! theta0 = 1 - sup_x|g_n(0) - g(0)|/C1.
struct ShrinkInitialResult {
  TensorField sigma0n;
  double theta0;
};

ShrinkInitialResult shrink_initial(const TensorField& sigma0,
                                   const ThresholdField& g,
                                   const ThresholdField& gn,
                                   const ShiftField& shift, const Grid& grid);

//! Pairwise Cauchy gaps of the solutions along the mollified sequence.
struct CauchyRow {
  int n = 0;
  double sup_g_gap = 0.0;
  double d_n = 0.0;  // sup_t |sigma_n - sigma_next|_H; 0 for the last index
  double runtime_seconds = 0.0;
};

struct CauchyReport {
  std::vector<CauchyRow> rows;
  bool gaps_nonincreasing = false;   // d_n over consecutive pairs
  bool final_feasible_for_base = false;
};

//! Solve the coupled problem (regularized regime) for every g_n in the
//! plan and report the consecutive sup-in-time stress gaps.  The final
//! solution is checked against the unmollified constraint with tolerance
//! sup|g_n - g|.
CauchyReport cauchy_study(const CoupledProblem& base,
                          const MollificationPlan& plan);

}  // namespace psweep

#endif
