#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "qmeas/distribution.hpp"
#include "qmeas/moments.hpp"
#include "qmeas/wavefunction.hpp"

namespace qmeas::io {

// Distribution CSV:
//   # origin=<r> step=<r> n=<int>
//   <coordinate>,<density>
// Reals are written with 17 significant digits, so a read restores the
// exact samples.
void write_distribution_csv(std::ostream& out, const GriddedDistribution& f);
GriddedDistribution read_distribution_csv(std::istream& in);
void save_distribution_csv(const std::filesystem::path& path, const GriddedDistribution& f);
GriddedDistribution load_distribution_csv(const std::filesystem::path& path);

struct TrajectoryRow {
    double w;
    double eps_tilde;
    double eta_tilde;
    double hur_lhs;
    double our_lhs;
    double circle_lhs;
};

std::vector<TrajectoryRow> trajectory_rows(const InteractionParams& params, std::span<const double> w_grid);

inline constexpr const char* kTrajectoryHeader = "w,eps_tilde,eta_tilde,hur_lhs,our_lhs,circle_lhs";

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRow> rows);
std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in);

// Joint state binary layout, little-endian:
//   "QMO1"
//   object axis: origin f64, step f64, count u32
//   probe axis:  origin f64, step f64, count u32
//   count_object * count_probe (re f64, im f64) pairs, row-major
void write_joint_binary(std::ostream& out, const JointWavefunction& joint);
JointWavefunction read_joint_binary(std::istream& in, Basis basis = Basis::Position);

}  // namespace qmeas::io
