#ifndef PSWEEP_FIELDS_HPP
#define PSWEEP_FIELDS_HPP

#include <array>
#include <functional>
#include <vector>

#include "psweep/tensor.hpp"

namespace psweep {

using Vec3 = std::array<double, 3>;

enum class Face : int { XMin = 0, XMax, YMin, YMax, ZMin, ZMax };

//! Collocated nodal box grid with per-face Dirichlet/Neumann tags.
//!
//! Nodes sit at (i*hx, j*hy, k*hz); each node owns one cell of volume
//! hx*hy*hz, so the quadrature volume is nx*ny*nz*hx*hy*hz.  Axes with a
//! single node are degenerate and carry zero derivative.  In homogeneous
//! mode there is no boundary mask at all (used for 0D oracle comparisons).
class Grid {
 public:
  Grid(int nx, int ny, int nz, double hx, double hy, double hz,
       const std::vector<Face>& dirichlet_faces = {}, bool homogeneous = false);

  //! All-ones grid without boundary, the 0D setting.
  static Grid homogeneous_point() { return Grid(1, 1, 1, 1, 1, 1, {}, true); }

  int nx() const { return n_[0]; }
  int ny() const { return n_[1]; }
  int nz() const { return n_[2]; }
  int extent(int axis) const { return n_[axis]; }
  double hx() const { return h_[0]; }
  double hy() const { return h_[1]; }
  double hz() const { return h_[2]; }
  double spacing(int axis) const { return h_[axis]; }
  bool homogeneous() const { return homogeneous_; }
  bool face_dirichlet(Face f) const { return dirichlet_[static_cast<int>(f)]; }

  long num_nodes() const { return long(n_[0]) * n_[1] * n_[2]; }
  long index(int i, int j, int k) const {
    return i + long(n_[0]) * (j + long(n_[1]) * k);
  }
  double cell_volume() const { return h_[0] * h_[1] * h_[2]; }
  double volume() const { return double(num_nodes()) * cell_volume(); }
  Vec3 coord(int i, int j, int k) const {
    return {i * h_[0], j * h_[1], k * h_[2]};
  }

  bool dirichlet_node(int i, int j, int k) const;

  bool operator==(const Grid& o) const;
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int n_[3];
  double h_[3];
  std::array<bool, 6> dirichlet_{};
  bool homogeneous_ = false;
};

//! Nodal 3-vector field, zero on Dirichlet nodes (the space V).
class VectorField {
 public:
  //! Zero field on the one-node grid; placeholder for late-bound members.
  VectorField() : VectorField(Grid::homogeneous_point()) {}
  explicit VectorField(const Grid& g);
  VectorField(const Grid& g,
              const std::function<Vec3(double, double, double)>& fn);

  const Grid& grid() const { return grid_; }
  long size() const { return long(v_.size()); }
  Vec3& operator[](long n) { return v_[n]; }
  const Vec3& operator[](long n) const { return v_[n]; }
  Vec3& at(int i, int j, int k) { return v_[grid_.index(i, j, k)]; }
  const Vec3& at(int i, int j, int k) const {
    return v_[grid_.index(i, j, k)];
  }

  //! Re-impose zeros on Dirichlet nodes.
  void apply_mask();

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  //! *this += s * o
  void axpy(double s, const VectorField& o);

 private:
  Grid grid_;
  std::vector<Vec3> v_;
};

//! Nodal symmetric-tensor field (the space H of stresses).
class TensorField {
 public:
  //! Zero field on the one-node grid; placeholder for late-bound members.
  TensorField() : TensorField(Grid::homogeneous_point()) {}
  explicit TensorField(const Grid& g);
  TensorField(const Grid& g,
              const std::function<SymTensor3(double, double, double)>& fn);

  const Grid& grid() const { return grid_; }
  long size() const { return long(t_.size()); }
  SymTensor3& operator[](long n) { return t_[n]; }
  const SymTensor3& operator[](long n) const { return t_[n]; }
  SymTensor3& at(int i, int j, int k) { return t_[grid_.index(i, j, k)]; }
  const SymTensor3& at(int i, int j, int k) const {
    return t_[grid_.index(i, j, k)];
  }

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(double s);
  void axpy(double s, const TensorField& o);

 private:
  Grid grid_;
  std::vector<SymTensor3> t_;
};

// -- discrete operators -------------------------------------------------
//
// The derivative stencil is the forward difference, switching to the
// backward difference at the last node of each axis so that linear fields
// differentiate exactly on the full nodal quadrature.  The divergence is
// the exact negative adjoint of the strain with respect to the discrete
// inner products below, which makes the Gauss-Green identity hold to
// rounding on every grid and mask.

//! Symmetric gradient eps_ij = (D_j z_i + D_i z_j) / 2.
TensorField strain(const VectorField& z);

//! Exact negative adjoint of strain; output is masked on Dirichlet nodes.
VectorField divergence(const TensorField& tau);

//! Operator induced by nu*((.,.)): componentwise nu * D^T D with mask.
VectorField laplacian_form_apply(const VectorField& z, double nu);

// -- inner products and norms -------------------------------------------
// Nodal quadrature: sum over nodes times the cell volume.

double dot_l2(const VectorField& a, const VectorField& b);   // (.,.)_H
double dot_l2(const TensorField& a, const TensorField& b);   // (.,.)_HH
double dot_grad(const VectorField& a, const VectorField& b); // ((.,.))
double dot_hdiv(const TensorField& a, const TensorField& b); // (.,.)_V

double norm_l2(const VectorField& a);
double norm_l2(const TensorField& a);
double norm_grad(const VectorField& a);   // |.|_V
double norm_hdiv(const TensorField& a);   // |.|_VV

//! Largest eigenvalue estimate of tau -> -strain(divergence(tau)), i.e.
//! the squared operator norm of the discrete divergence.  Deterministic
//! (fixed start vector), 50 power iterations, intended to be cached per
//! grid by the caller.
double estimate_div_norm_sq(const Grid& g);

}  // namespace psweep

#endif
