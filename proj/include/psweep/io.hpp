#ifndef PSWEEP_IO_HPP
#define PSWEEP_IO_HPP

#include <string>

#include "psweep/coupled.hpp"
#include "psweep/diagnostics.hpp"
#include "psweep/mollify.hpp"
#include "psweep/scalar_sweep.hpp"

namespace psweep {

//! Shortest round-trippable decimal form, identical across runs.
std::string format_double(double v);

//! Fixed trajectory schema: step,t,norm_v_H,norm_sigma_H,norm_sigma_V,
//! max_violation,picard_iters,contraction_ratio,energy_lhs,energy_rhs
std::string trajectory_csv_string(const Trajectory& traj, int cadence = 1);
void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          int cadence = 1);

//! Flat snapshot: node,x1,x2,x3,v1,v2,v3,s11,s22,s33,s12,s13,s23.
std::string snapshot_csv_string(const VectorField& v, const TensorField& sigma);
void write_snapshot_csv(const VectorField& v, const TensorField& sigma,
                        const std::string& path);

//! Legacy ASCII VTK structured points: velocity as VECTORS plus one
//! SCALARS array per stress component.
void write_snapshot_vtk(const VectorField& v, const TensorField& sigma,
                        double t, const std::string& path);

//! Read fields back from the flat snapshot schema.
VectorField load_vector_field_csv(const Grid& g, const std::string& path);
TensorField load_tensor_field_csv(const Grid& g, const std::string& path);

//! Mollification study rows: n,sup_g_gap,d_n,runtime_seconds.
std::string cauchy_report_csv(const CauchyReport& rep);

//! A scalar oracle trajectory rendered in the march CSV schema (the
//! stress norm column carries the scalar state; velocity columns are 0).
std::string scalar_trajectory_csv(const ScalarTrajectory& traj);

//! Per-step residual slacks: step,t,vi_min_slack,wvi_min_slack.
std::string residuals_csv(const Trajectory& traj, const ResidualReport& strong,
                          const ResidualReport& weak);

//! Per-step estimate left-hand sides: step,t,lhs_sigma,lhs_dsigma,lhs_v.
std::string energy_csv(const Trajectory& traj, const EnergyReport& rep);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace psweep

#endif
