#pragma once

#include <string>
#include <vector>

#include "crossdiff/stability.hpp"
#include "crossdiff/stationary.hpp"

namespace crossdiff {

// Full round-trip formatting (17 significant digits).
std::string fmt17(double x);

void write_state_csv(const std::string& path, const System& sys, const SystemState& s);
void write_trajectory_csv(const std::string& path, const Grid1D& grid,
                          const Trajectory& traj);
void write_sweep_csv(const std::string& path, const std::string& axis_name,
                     const std::vector<SweepRecord>& records);
void write_spectrum_csv(const std::string& path, const std::vector<double>& values);
void write_eigen_sweep_csv(const std::string& path,
                           const std::vector<std::pair<double, double>>& rows);

// Standalone matplotlib scripts consuming the CSVs next to them.
void emit_sweep_plot_script(const std::string& path, const std::string& csv_name,
                            bool loglog);
void emit_profile_plot_script(const std::string& path, const std::string& csv_name);

}  // namespace crossdiff
