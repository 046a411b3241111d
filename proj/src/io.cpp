#include "psweep/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "psweep/errors.hpp"

namespace psweep {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv_string(const Trajectory& traj, int cadence) {
  if (cadence < 1) cadence = 1;
  std::ostringstream os;
  os << "step,t,norm_v_H,norm_sigma_H,norm_sigma_V,max_violation,"
        "picard_iters,contraction_ratio,energy_lhs,energy_rhs\n";
  for (size_t k = 0; k < traj.records.size(); ++k) {
    if (k % size_t(cadence) != 0 && k + 1 != traj.records.size()) continue;
    const StepRecord& r = traj.records[k];
    os << r.step << ',' << format_double(r.t) << ','
       << format_double(r.norm_v_H) << ',' << format_double(r.norm_sigma_H)
       << ',' << format_double(r.norm_sigma_V) << ','
       << format_double(r.max_violation) << ',' << r.picard_iters << ','
       << format_double(r.contraction_ratio) << ','
       << format_double(r.energy_lhs) << ',' << format_double(r.energy_rhs)
       << '\n';
  }
  return os.str();
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          int cadence) {
  write_text_file(path, trajectory_csv_string(traj, cadence));
}

std::string snapshot_csv_string(const VectorField& v,
                                const TensorField& sigma) {
  if (v.grid() != sigma.grid())
    throw GridMismatch("snapshot: fields on different grids");
  const Grid& g = v.grid();
  std::ostringstream os;
  os << "node,x1,x2,x3,v1,v2,v3,s11,s22,s33,s12,s13,s23\n";
  long n = 0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i, ++n) {
        const Vec3 x = g.coord(i, j, k);
        os << n << ',' << format_double(x[0]) << ',' << format_double(x[1])
           << ',' << format_double(x[2]);
        for (int c = 0; c < 3; ++c) os << ',' << format_double(v[n][c]);
        for (int c = 0; c < 6; ++c) os << ',' << format_double(sigma[n][c]);
        os << '\n';
      }
  return os.str();
}

void write_snapshot_csv(const VectorField& v, const TensorField& sigma,
                        const std::string& path) {
  write_text_file(path, snapshot_csv_string(v, sigma));
}

void write_snapshot_vtk(const VectorField& v, const TensorField& sigma,
                        double t, const std::string& path) {
  if (v.grid() != sigma.grid())
    throw GridMismatch("snapshot: fields on different grids");
  const Grid& g = v.grid();
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n";
  os << "psweep snapshot t=" << format_double(t) << "\n";
  os << "ASCII\nDATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << g.nx() << ' ' << g.ny() << ' ' << g.nz() << '\n';
  os << "ORIGIN 0 0 0\n";
  os << "SPACING " << format_double(g.hx()) << ' ' << format_double(g.hy())
     << ' ' << format_double(g.hz()) << '\n';
  os << "POINT_DATA " << g.num_nodes() << '\n';
  os << "VECTORS velocity double\n";
  for (long n = 0; n < v.size(); ++n)
    os << format_double(v[n][0]) << ' ' << format_double(v[n][1]) << ' '
       << format_double(v[n][2]) << '\n';
  static const char* comp_names[6] = {"sigma_11", "sigma_22", "sigma_33",
                                      "sigma_12", "sigma_13", "sigma_23"};
  for (int c = 0; c < 6; ++c) {
    os << "SCALARS " << comp_names[c] << " double 1\nLOOKUP_TABLE default\n";
    for (long n = 0; n < sigma.size(); ++n)
      os << format_double(sigma[n][c]) << '\n';
  }
  write_text_file(path, os.str());
}

namespace {

std::vector<std::vector<double>> read_csv_rows(const std::string& path,
                                               size_t expect_cols) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.find_first_not_of("0123456789+-.eE, \r") !=
                     std::string::npos) {
      first = false;  // header
      continue;
    }
    first = false;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != expect_cols)
      throw ParseError("'" + path + "': expected " +
                       std::to_string(expect_cols) + " columns, got " +
                       std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

VectorField load_vector_field_csv(const Grid& g, const std::string& path) {
  const auto rows = read_csv_rows(path, 13);
  if (long(rows.size()) != g.num_nodes())
    throw ParseError("'" + path + "': node count mismatch");
  VectorField out(g);
  for (const auto& row : rows) {
    const long n = long(row[0]);
    for (int c = 0; c < 3; ++c) out[n][c] = row[4 + c];
  }
  out.apply_mask();
  return out;
}

TensorField load_tensor_field_csv(const Grid& g, const std::string& path) {
  const auto rows = read_csv_rows(path, 13);
  if (long(rows.size()) != g.num_nodes())
    throw ParseError("'" + path + "': node count mismatch");
  TensorField out(g);
  for (const auto& row : rows) {
    const long n = long(row[0]);
    for (int c = 0; c < 6; ++c) out[n][c] = row[7 + c];
  }
  return out;
}

std::string cauchy_report_csv(const CauchyReport& rep) {
  std::ostringstream os;
  os << "n,sup_g_gap,d_n,runtime_seconds\n";
  for (const auto& row : rep.rows)
    os << row.n << ',' << format_double(row.sup_g_gap) << ','
       << format_double(row.d_n) << ',' << format_double(row.runtime_seconds)
       << '\n';
  return os.str();
}

std::string scalar_trajectory_csv(const ScalarTrajectory& traj) {
  std::ostringstream os;
  os << "step,t,norm_v_H,norm_sigma_H,norm_sigma_V,max_violation,"
        "picard_iters,contraction_ratio,energy_lhs,energy_rhs\n";
  for (size_t k = 0; k < traj.t.size(); ++k) {
    const double s = std::abs(traj.sigma[k]);
    os << k << ',' << format_double(traj.t[k]) << ",0," << format_double(s)
       << ',' << format_double(s) << ",0,0,0,"
       << format_double(s * s) << ",1\n";
  }
  return os.str();
}

std::string residuals_csv(const Trajectory& traj, const ResidualReport& strong,
                          const ResidualReport& weak) {
  std::ostringstream os;
  os << "step,t,vi_min_slack,wvi_min_slack\n";
  for (size_t k = 1; k < traj.times.size(); ++k) {
    os << k << ',' << format_double(traj.times[k]);
    os << ',';
    if (k - 1 < strong.per_step_min.size())
      os << format_double(strong.per_step_min[k - 1]);
    os << ',';
    if (k - 1 < weak.per_step_min.size())
      os << format_double(weak.per_step_min[k - 1]);
    os << '\n';
  }
  return os.str();
}

std::string energy_csv(const Trajectory& traj, const EnergyReport& rep) {
  std::ostringstream os;
  os << "step,t,lhs_sigma,lhs_dsigma,lhs_v\n";
  for (size_t k = 0; k < traj.times.size(); ++k)
    os << k << ',' << format_double(traj.times[k]) << ','
       << format_double(rep.lhs_sigma[k]) << ','
       << format_double(rep.lhs_dsigma[k]) << ','
       << format_double(rep.lhs_v[k]) << '\n';
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace psweep
