#ifndef PSWEEP_TENSOR_HPP
#define PSWEEP_TENSOR_HPP

#include <array>
#include <cmath>

namespace psweep {

//! 3x3 symmetric tensor stored as six independent components.
//!
//! The inner product uses the full 3x3 Frobenius convention, i.e. the
//! off-diagonal products are counted twice.
class SymTensor3 {
 public:
  // component order: 11, 22, 33, 12, 13, 23
  SymTensor3() : c_{0, 0, 0, 0, 0, 0} {}
  SymTensor3(double t11, double t22, double t33, double t12, double t13,
             double t23)
      : c_{t11, t22, t33, t12, t13, t23} {}

  static SymTensor3 identity() { return {1, 1, 1, 0, 0, 0}; }
  static SymTensor3 diag(double a, double b, double c) {
    return {a, b, c, 0, 0, 0};
  }

  double& operator[](int i) { return c_[i]; }
  double operator[](int i) const { return c_[i]; }

  double t11() const { return c_[0]; }
  double t22() const { return c_[1]; }
  double t33() const { return c_[2]; }
  double t12() const { return c_[3]; }
  double t13() const { return c_[4]; }
  double t23() const { return c_[5]; }

  double trace() const { return c_[0] + c_[1] + c_[2]; }

  SymTensor3& operator+=(const SymTensor3& o) {
    for (int i = 0; i < 6; ++i) c_[i] += o.c_[i];
    return *this;
  }
  SymTensor3& operator-=(const SymTensor3& o) {
    for (int i = 0; i < 6; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  SymTensor3& operator*=(double s) {
    for (int i = 0; i < 6; ++i) c_[i] *= s;
    return *this;
  }
  void axpy(double s, const SymTensor3& o) {
    for (int i = 0; i < 6; ++i) c_[i] += s * o.c_[i];
  }

  friend SymTensor3 operator+(SymTensor3 a, const SymTensor3& b) {
    return a += b;
  }
  friend SymTensor3 operator-(SymTensor3 a, const SymTensor3& b) {
    return a -= b;
  }
  friend SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }
  friend SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }
  friend bool operator==(const SymTensor3& a, const SymTensor3& b) {
    return a.c_ == b.c_;
  }

 private:
  std::array<double, 6> c_;
};

//! Trace-free part: tau - (1/3) tr(tau) I.
SymTensor3 deviator(const SymTensor3& tau);

//! Spherical part: (1/3) tr(tau) I.
SymTensor3 trace_part(const SymTensor3& tau);

//! Full 3x3 Frobenius inner product (off-diagonals counted twice).
double frobenius_inner(const SymTensor3& a, const SymTensor3& b);

double frobenius_norm(const SymTensor3& a);

//! Nearest point of {pi : (1/2)|pi^D|^2 <= g} in the Frobenius metric.
//!
//! The constraint only touches the deviator, so the spherical part passes
//! through unchanged and an infeasible deviator is scaled back radially.
//! A feasible input is returned bit-exactly, which makes the projection
//! idempotent in exact float comparison.
//! Throws NonPositiveThreshold when g <= 0.
SymTensor3 project_deviatoric_ball(const SymTensor3& tau, double g);

//! Constraint value (1/2)|tau^D|^2 - g; feasible iff <= 0.
double deviatoric_ball_violation(const SymTensor3& tau, double g);

}  // namespace psweep

#endif
