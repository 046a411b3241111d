#include "psweep/fields.hpp"

#include <cmath>

#include "psweep/errors.hpp"

namespace psweep {

Grid::Grid(int nx, int ny, int nz, double hx, double hy, double hz,
           const std::vector<Face>& dirichlet_faces, bool homogeneous)
    : n_{nx, ny, nz}, h_{hx, hy, hz}, homogeneous_(homogeneous) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw BadParameters("Grid: extents must be >= 1");
  if (!(hx > 0) || !(hy > 0) || !(hz > 0))
    throw BadParameters("Grid: spacings must be positive");
  for (Face f : dirichlet_faces) dirichlet_[static_cast<int>(f)] = true;
  if (homogeneous_) {
    if (!dirichlet_faces.empty())
      throw BadParameters("Grid: homogeneous mode carries no Dirichlet faces");
    return;
  }
  bool any = false, all = true;
  for (bool d : dirichlet_) {
    any = any || d;
    all = all && d;
  }
  if (!any)
    throw BadParameters("Grid: Dirichlet part of the boundary must be nonempty");
  if (all)
    throw BadParameters("Grid: Neumann part of the boundary must be nonempty");
}

bool Grid::dirichlet_node(int i, int j, int k) const {
  if (homogeneous_) return false;
  if (i == 0 && dirichlet_[int(Face::XMin)]) return true;
  if (i == n_[0] - 1 && dirichlet_[int(Face::XMax)]) return true;
  if (j == 0 && dirichlet_[int(Face::YMin)]) return true;
  if (j == n_[1] - 1 && dirichlet_[int(Face::YMax)]) return true;
  if (k == 0 && dirichlet_[int(Face::ZMin)]) return true;
  if (k == n_[2] - 1 && dirichlet_[int(Face::ZMax)]) return true;
  return false;
}

bool Grid::operator==(const Grid& o) const {
  for (int a = 0; a < 3; ++a)
    if (n_[a] != o.n_[a] || h_[a] != o.h_[a]) return false;
  return dirichlet_ == o.dirichlet_ && homogeneous_ == o.homogeneous_;
}

VectorField::VectorField(const Grid& g) : grid_(g), v_(g.num_nodes(), Vec3{}) {}

VectorField::VectorField(const Grid& g,
                         const std::function<Vec3(double, double, double)>& fn)
    : grid_(g), v_(g.num_nodes()) {
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const Vec3 x = g.coord(i, j, k);
        v_[g.index(i, j, k)] = fn(x[0], x[1], x[2]);
      }
  apply_mask();
}

void VectorField::apply_mask() {
  if (grid_.homogeneous()) return;
  for (int k = 0; k < grid_.nz(); ++k)
    for (int j = 0; j < grid_.ny(); ++j)
      for (int i = 0; i < grid_.nx(); ++i)
        if (grid_.dirichlet_node(i, j, k))
          v_[grid_.index(i, j, k)] = Vec3{0, 0, 0};
}

static void check_same_grid(const Grid& a, const Grid& b, const char* op) {
  if (a != b) throw GridMismatch(std::string(op) + ": fields live on different grids");
}

VectorField& VectorField::operator+=(const VectorField& o) {
  check_same_grid(grid_, o.grid_, "VectorField +=");
  for (long n = 0; n < size(); ++n)
    for (int c = 0; c < 3; ++c) v_[n][c] += o.v_[n][c];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  check_same_grid(grid_, o.grid_, "VectorField -=");
  for (long n = 0; n < size(); ++n)
    for (int c = 0; c < 3; ++c) v_[n][c] -= o.v_[n][c];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (long n = 0; n < size(); ++n)
    for (int c = 0; c < 3; ++c) v_[n][c] *= s;
  return *this;
}

void VectorField::axpy(double s, const VectorField& o) {
  check_same_grid(grid_, o.grid_, "VectorField axpy");
  for (long n = 0; n < size(); ++n)
    for (int c = 0; c < 3; ++c) v_[n][c] += s * o.v_[n][c];
}

TensorField::TensorField(const Grid& g) : grid_(g), t_(g.num_nodes()) {}

TensorField::TensorField(
    const Grid& g, const std::function<SymTensor3(double, double, double)>& fn)
    : grid_(g), t_(g.num_nodes()) {
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const Vec3 x = g.coord(i, j, k);
        t_[g.index(i, j, k)] = fn(x[0], x[1], x[2]);
      }
}

TensorField& TensorField::operator+=(const TensorField& o) {
  check_same_grid(grid_, o.grid_, "TensorField +=");
  for (long n = 0; n < size(); ++n) t_[n] += o.t_[n];
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  check_same_grid(grid_, o.grid_, "TensorField -=");
  for (long n = 0; n < size(); ++n) t_[n] -= o.t_[n];
  return *this;
}

TensorField& TensorField::operator*=(double s) {
  for (long n = 0; n < size(); ++n) t_[n] *= s;
  return *this;
}

void TensorField::axpy(double s, const TensorField& o) {
  check_same_grid(grid_, o.grid_, "TensorField axpy");
  for (long n = 0; n < size(); ++n) t_[n].axpy(s, o.t_[n]);
}

// -- per-axis difference stencils -----------------------------------------
//
// D: forward difference, backward at the last node, zero on degenerate
// axes.  DT is its exact transpose, derived row by row from the matrix of
// D; the branches below enumerate the nonzero column entries.

namespace {

struct AxisView {
  int n;       // nodes along the axis
  long stride; // flat-index stride along the axis
  double h;
};

inline AxisView axis_view(const Grid& g, int axis) {
  long strides[3] = {1, g.nx(), long(g.nx()) * g.ny()};
  return {g.extent(axis), strides[axis], g.spacing(axis)};
}

// w and out are flat scalar lattices of g.num_nodes() entries.
void apply_d(const Grid& g, int axis, const std::vector<double>& w,
             std::vector<double>& out) {
  const AxisView ax = axis_view(g, axis);
  const long N = g.num_nodes();
  if (ax.n == 1) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double inv_h = 1.0 / ax.h;
  for (long n = 0; n < N; ++n) {
    const int k = int((n / ax.stride) % ax.n);
    if (k < ax.n - 1)
      out[n] = (w[n + ax.stride] - w[n]) * inv_h;
    else
      out[n] = (w[n] - w[n - ax.stride]) * inv_h;
  }
}

void apply_dt(const Grid& g, int axis, const std::vector<double>& w,
              std::vector<double>& out) {
  const AxisView ax = axis_view(g, axis);
  const long N = g.num_nodes();
  if (ax.n == 1) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double inv_h = 1.0 / ax.h;
  for (long n = 0; n < N; ++n) {
    const int m = int((n / ax.stride) % ax.n);
    double acc = 0.0;
    if (m <= ax.n - 2) acc -= w[n];
    if (m >= 1) acc += w[n - ax.stride];
    if (m == ax.n - 2) acc -= w[n + ax.stride]; // backward row at n-1
    if (m == ax.n - 1) acc += w[n];
    out[n] = acc * inv_h;
  }
}

}  // namespace

TensorField strain(const VectorField& z) {
  const Grid& g = z.grid();
  const long N = g.num_nodes();
  TensorField eps(g);
  std::vector<double> comp(N), d(N);
  // d_j z_i for all component/axis pairs; symmetrized on the fly
  static const int voigt[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  for (int ci = 0; ci < 3; ++ci) {
    for (long n = 0; n < N; ++n) comp[n] = z[n][ci];
    for (int aj = 0; aj < 3; ++aj) {
      apply_d(g, aj, comp, d);
      const int slot = voigt[ci][aj];
      const double w = (ci == aj) ? 1.0 : 0.5;
      for (long n = 0; n < N; ++n) eps[n][slot] += w * d[n];
    }
  }
  return eps;
}

VectorField divergence(const TensorField& tau) {
  const Grid& g = tau.grid();
  const long N = g.num_nodes();
  VectorField div(g);
  std::vector<double> comp(N), d(N);
  static const int voigt[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  // (div tau)_i = -sum_j DT_j tau_ij, the negative adjoint of strain in
  // the doubled-off-diagonal Frobenius convention
  for (int ci = 0; ci < 3; ++ci) {
    for (int aj = 0; aj < 3; ++aj) {
      const int slot = voigt[ci][aj];
      for (long n = 0; n < N; ++n) comp[n] = tau[n][slot];
      apply_dt(g, aj, comp, d);
      for (long n = 0; n < N; ++n) div[n][ci] -= d[n];
    }
  }
  div.apply_mask();
  return div;
}

VectorField laplacian_form_apply(const VectorField& z, double nu) {
  const Grid& g = z.grid();
  const long N = g.num_nodes();
  VectorField out(g);
  std::vector<double> comp(N), d(N), dt(N);
  for (int ci = 0; ci < 3; ++ci) {
    for (long n = 0; n < N; ++n) comp[n] = z[n][ci];
    for (int aj = 0; aj < 3; ++aj) {
      apply_d(g, aj, comp, d);
      apply_dt(g, aj, d, dt);
      for (long n = 0; n < N; ++n) out[n][ci] += nu * dt[n];
    }
  }
  out.apply_mask();
  return out;
}

double dot_l2(const VectorField& a, const VectorField& b) {
  check_same_grid(a.grid(), b.grid(), "dot_l2");
  double s = 0.0;
  for (long n = 0; n < a.size(); ++n)
    s += a[n][0] * b[n][0] + a[n][1] * b[n][1] + a[n][2] * b[n][2];
  return s * a.grid().cell_volume();
}

double dot_l2(const TensorField& a, const TensorField& b) {
  check_same_grid(a.grid(), b.grid(), "dot_l2");
  double s = 0.0;
  for (long n = 0; n < a.size(); ++n) s += frobenius_inner(a[n], b[n]);
  return s * a.grid().cell_volume();
}

double dot_grad(const VectorField& a, const VectorField& b) {
  check_same_grid(a.grid(), b.grid(), "dot_grad");
  const Grid& g = a.grid();
  const long N = g.num_nodes();
  std::vector<double> ca(N), cb(N), da(N), db(N);
  double s = 0.0;
  for (int ci = 0; ci < 3; ++ci) {
    for (long n = 0; n < N; ++n) {
      ca[n] = a[n][ci];
      cb[n] = b[n][ci];
    }
    for (int aj = 0; aj < 3; ++aj) {
      apply_d(g, aj, ca, da);
      apply_d(g, aj, cb, db);
      for (long n = 0; n < N; ++n) s += da[n] * db[n];
    }
  }
  return s * g.cell_volume();
}

double dot_hdiv(const TensorField& a, const TensorField& b) {
  return dot_l2(a, b) + dot_l2(divergence(a), divergence(b));
}

double norm_l2(const VectorField& a) { return std::sqrt(dot_l2(a, a)); }
double norm_l2(const TensorField& a) { return std::sqrt(dot_l2(a, a)); }
double norm_grad(const VectorField& a) { return std::sqrt(dot_grad(a, a)); }
double norm_hdiv(const TensorField& a) { return std::sqrt(dot_hdiv(a, a)); }

double estimate_div_norm_sq(const Grid& g) {
  // power iteration on tau -> -strain(divergence(tau)), symmetric PSD
  TensorField tau(g);
  // fixed quasi-random start touching every component
  for (long n = 0; n < tau.size(); ++n)
    for (int c = 0; c < 6; ++c)
      tau[n][c] = std::sin(0.7 * double(n + 1) + 1.3 * double(c + 1));
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double nrm = norm_l2(tau);
    if (nrm == 0.0) return 0.0;
    tau *= 1.0 / nrm;
    TensorField next = strain(divergence(tau));
    next *= -1.0;
    lambda = dot_l2(next, tau);
    tau = next;
  }
  return lambda;
}

}  // namespace psweep
