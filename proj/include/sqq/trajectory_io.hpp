/**
 * @file trajectory_io.hpp
 * @brief CSV dump of sampled trajectories.
 *
 * Header: t,q_0..q_{d-1},p_0..p_{d-1},H,abs_err,rel_err,sigma,iters
 * One row per sample, every real printed with 17 significant digits so a reader recovers the
 * exact doubles.
 */
#pragma once

#include <iosfwd>
#include <string>

#include "sqq/integrator.hpp"

namespace sqq {

std::string trajectory_csv_header(int dof);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// Throws Error(data_load) when the file cannot be written.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Reads a dump back. The first row is the initial state, so H0 is its H column; samples
/// carry t, q, p, H, sigma and iters. Throws Error(data_load) on a malformed file.
Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace sqq
