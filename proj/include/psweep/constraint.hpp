#ifndef PSWEEP_CONSTRAINT_HPP
#define PSWEEP_CONSTRAINT_HPP

#include <functional>
#include <string>
#include <vector>

#include "psweep/fields.hpp"
#include "psweep/threshold.hpp"

namespace psweep {

//! Threshold and shift frozen at one time level; the hot path of the
//! projection-based solvers works against this instead of re-evaluating
//! the analytic specs at every inner iteration.
struct MaterializedConstraint {
  double t = 0.0;
  std::vector<double> g;  // per node
  TensorField shift;      // sigma*(t)

  MaterializedConstraint(const Grid& grid, double time)
      : t(time), g(grid.num_nodes(), 0.0), shift(grid) {}
};

struct MembershipReport {
  bool feasible = false;
  double max_violation = 0.0;  // max over nodes, clamped at zero below
};

enum class ConditionHRegime { Regularized, Indicator };

//! Time-sampled condition-(H) data alpha(.), beta(.) plus the evaluators
//! they were sampled from.
struct ConditionHData {
  ConditionHRegime regime = ConditionHRegime::Regularized;
  double kappa = 0.0;
  double r = 0.0;
  std::vector<double> times;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::function<double(double)> alpha_eval;
  std::function<double(double)> beta_eval;
};

struct HCheck {
  double s = 0.0, t = 0.0;
  double h1_slack = 0.0;  // rhs - lhs, >= 0 means the inequality holds
  double h2_slack = 0.0;
  double theta = 0.0;
};

struct HReport {
  bool pass = false;
  double worst_h1_slack = 0.0;
  double worst_h2_slack = 0.0;
  int checked = 0;
  std::vector<HCheck> failures;
};

//! The moving constraint set K(t) = K~(t) - sigma*(t) on a grid.
class ConstraintSet {
 public:
  //! Trivial set on the one-node grid (threshold 1, zero shift).
  ConstraintSet();
  ConstraintSet(ThresholdField threshold, ShiftField shift, Grid grid,
                double membership_tol = 1e-10);

  const Grid& grid() const { return grid_; }
  const ThresholdField& threshold() const { return threshold_; }
  const ShiftField& shift() const { return shift_; }
  double membership_tol() const { return membership_tol_; }

  MaterializedConstraint materialize(double t) const;

  //! Pointwise feasibility of tau for K(t): max over nodes of
  //! (1/2)|(tau+sigma*)^D|^2 - g, clamped below at zero.
  MembershipReport membership(const TensorField& tau, double t,
                              double tol) const;
  MembershipReport membership(const TensorField& tau,
                              const MaterializedConstraint& mc,
                              double tol) const;

  //! Nodewise projection onto K(t); nonexpansive in the L2 tensor norm.
  TensorField project(const TensorField& tau, double t) const;
  TensorField project(const TensorField& tau,
                      const MaterializedConstraint& mc) const;

  //! Transport tau in K(s) into K(t) by the threshold-shrink map
  //! theta = 1 - sup_x|g(t)-g(s)|/C1 applied to tau + sigma*(s).
  //! Throws WindowTooWide when sup|g(t)-g(s)| >= C1.
  struct ShrinkResult {
    TensorField tau;
    double theta;
  };
  ShrinkResult shrink_transport(const TensorField& tau, double s,
                                double t) const;

  //! Condition-(H) data: the indicator regime needs the radius r of the
  //! L2 ball the samples live in, the regularized regime needs kappa.
  ConditionHData condition_h_data(double r, double kappa,
                                  ConditionHRegime regime,
                                  double t_begin, double t_end,
                                  int time_samples) const;

  //! Empirically check (H1)/(H2) for sample stresses transported between
  //! time pairs, against the condition-(H) data above.
  HReport verify_condition_h(const std::vector<std::pair<double, double>>& pairs,
                             const std::vector<TensorField>& samples,
                             const ConditionHData& data) const;

 private:
  ThresholdField threshold_;
  ShiftField shift_;
  Grid grid_;
  double membership_tol_;
};

//! Integral of a scalar function over [a,b] by composite Simpson rule.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int subintervals = 256);

//! Canned condition-(H) check: random feasible samples per (s,t) pair,
//! alpha/beta from the constraint's own data, worst slacks aggregated.
struct ConditionHStudy {
  HReport report;
  ConditionHData data;
};

ConditionHStudy run_condition_h_study(const ConstraintSet& constraint,
                                      double horizon, ConditionHRegime regime,
                                      double kappa, int n_pairs, int n_samples,
                                      unsigned long long seed);

}  // namespace psweep

#endif
