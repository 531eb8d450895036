#pragma once

#include <string>

#include "crossdiff/timestepper.hpp"

namespace crossdiff {

struct StationaryResult {
    GridField r, b;
    double chi_r = 0.0, chi_b = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Point-particle equilibrium (C_r e^{-V_r}, C_b e^{-V_b}) with the constants
// fixed by the prescribed masses under trapezoid quadrature.
SystemState equilibrium_pointparticle(const System& sys);

// Residual of the stationary system: nodal dual equations minus the species
// multipliers, plus the two mass constraints.
void stationary_residual(const System& sys, const GridField& r, const GridField& b,
                         double chi_r, double chi_b, GridField& Fr, GridField& Fb,
                         double& Fmass_r, double& Fmass_b);

// Grid-weighted norm of the full residual vector.
double stationary_residual_norm(const System& sys, const GridField& Fr, const GridField& Fb,
                                double Fmass_r, double Fmass_b);

// Damped Newton for the constrained minimizer, initialized from the
// point-particle equilibrium; backtracking halving with positivity clipping.
// Throws SolverError on divergence (message carries the last residual).
StationaryResult solve_entropy_stationary(const System& sys, double tol = 1e-8,
                                          int max_iter = 40);

struct LongtimeOptions {
    double t_max = 1e5;
    // Stationarity threshold on ||rhs||_inf; <= 0 selects
    // 1e-10 * max(N_r, N_b).
    double rhs_inf_tol = 0.0;
    MolOptions mol = {};
};

struct LongtimeResult {
    SystemState state;
    double t_final = 0.0;
    double rhs_inf = 0.0;
    StepStats stats;
    Trajectory trajectory;  // populated when mol.record_trajectory
};

// Long-time integration from the point-particle equilibrium (or a caller
// state) until the stationarity criterion fires. Throws SolverError if t_max
// is reached first (message carries the final rhs norm).
LongtimeResult equilibrate_longtime(const System& sys, const LongtimeOptions& opts = {});
LongtimeResult equilibrate_longtime(const System& sys, const SystemState& initial,
                                    const LongtimeOptions& opts = {});

enum class SweepAxis { ThetaR, Epsilon };

struct SweepRecord {
    double value = 0.0;  // swept parameter (scaled theta_r or epsilon)
    double abs_err_r = 0.0, abs_err_b = 0.0;
    double rel_err_r = 0.0, rel_err_b = 0.0;
    int newton_iterations = 0;
    double newton_residual = 0.0;
    long mol_steps = 0;
    double mol_rhs_inf = 0.0;
    // Worst relative mass deviation from the prescribed values, across both
    // routes and species.
    double mass_err_rel = 0.0;
    bool ok = false;
    std::string note;
};

struct SweepOptions {
    double newton_tol = 1e-8;
    int newton_max_iter = 40;
    LongtimeOptions longtime = {};
    int jobs = 1;
};

// Applies one sweep value to the base parameters. For the theta axis the red
// diffusivity moves so that eps_ref^d * theta_r equals the requested value;
// for the epsilon axis both diameters are set to it.
ModelParams apply_sweep_value(const ModelParams& base, SweepAxis axis, double value);

// Runs both stationary routes per value and records the grid-weighted L2
// discrepancies. Solver failures annotate the record instead of aborting.
std::vector<SweepRecord> sweep(const ModelParams& base, const Grid1D& grid, SweepAxis axis,
                               const std::vector<double>& values,
                               const SweepOptions& opts = {});

}  // namespace crossdiff
