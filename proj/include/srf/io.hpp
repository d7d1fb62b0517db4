#pragma once

#include <string>

#include "srf/conjugate.hpp"

namespace srf {

/// Plain-text trajectory serialization: header lines with the model, grid,
/// spacing and normalization, then one row per state (t, phi nodes, u nodes)
/// in hexfloat so that round-trips are bit-exact.
void save_trajectory(const Trajectory& traj, const std::string& path);

/// Load a normalized trajectory; caches are rebuilt deterministically.
Trajectory load_trajectory(const Calculus& calc, const std::string& path);

/// DilatonPath rows mirror the trajectory rows: (t, [tau,] f nodes).
void save_dilaton_path(const DilatonPath& path, const Trajectory& traj,
                       const std::string& file);
DilatonPath load_dilaton_path(const Calculus& calc, const Trajectory& traj,
                              const std::string& file);

std::string format_hex(double v);
double parse_hex(const std::string& s);

} // namespace srf
