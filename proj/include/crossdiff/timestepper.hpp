#pragma once

#include <string>

#include "crossdiff/discretization.hpp"
#include "crossdiff/entropy.hpp"

namespace crossdiff {

// Diagnostics of one instant: entropy value, the dissipation quadratic form,
// the lower-bound breakdown and the potential-term bound of the dissipation
// inequality, plus the entropy variables themselves.
struct EntropyReport {
    double E = 0.0;
    // h * sum_f grad(u,v)^T M_f grad(u,v) with discrete gradients of the nodal
    // dual variables; nonnegative wherever the mobility is positive
    // semidefinite.
    double dissipation = 0.0;
    // Same quadratic form with chain-rule face gradients (pointwise algebra).
    double dissipation_chain = 0.0;
    // Lower-bound quadrature: 2(1-g rho)|d sqrt r|^2 + 2(1-g rho)|d sqrt b|^2
    // + (g/2)|d rho|^2 + (tau^2/2) g^5 rho^2/(1-g rho)^2 |d rho|^2.
    double d0 = 0.0;
    double d0_sqrt_r = 0.0, d0_sqrt_b = 0.0, d0_rho = 0.0, d0_tau = 0.0;
    // (1-g rho)(r|dV_r|^2 + b|dV_b|^2) + g |r dV_r + b dV_b|^2 integrated.
    double potential_bound = 0.0;
    GridField u, v;
};

EntropyReport entropy_dissipation_report(const System& sys, const SystemState& s,
                                         const EntropyKind& kind);

struct MolOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double dt_init = 0.0;   // 0: automatic
    double dt_max = 0.0;    // 0: unlimited
    double dt_min = 1e-14;
    long max_steps = 500000;
    int max_order = 2;      // 1 or 2 (variable-step BDF)
    double fixed_dt = 0.0;  // > 0 disables step control (self-convergence tests)
    // > 0: stop once ||rhs||_inf falls below this threshold.
    double stationary_rhs_inf = 0.0;
    bool record_trajectory = true;
    // Rescale species to their initial masses after each accepted step
    // (relative factor within the Newton truncation).
    bool project_masses = true;
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    long newton_iterations = 0;
    long jacobian_builds = 0;
    long rhs_evaluations = 0;
};

struct TrajectorySample {
    double t = 0.0;
    SystemState state;
    EntropyReport report;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    SystemState final_state;
    StepStats stats;
    bool reached_stationary = false;
    double final_rhs_inf = 0.0;
};

// Variable-step BDF1/BDF2 integration of the semidiscrete system with PI step
// control (safety 0.9, step-ratio limits [0.2, 5]) and a banded modified-Newton
// solve per step. Logs an entropy report per accepted step. Throws SolverError
// on Newton failure at the minimum step or when the state leaves the
// admissible set.
Trajectory integrate_mol(const System& sys, const SystemState& y0, double t_end,
                         const MolOptions& opts = {});

struct RegularizedStepConfig {
    double tau = 1e-2;        // step size, doubling as the regularization weight
    double newton_tol = 1e-10;
    int max_newton = 60;
};

// One step of the fully implicit entropy-variable scheme
//   (w_k - w_{k-1})/tau = div(M(w_k) grad z_k) + tau (lap z_k - z_k),
// solved by a damped Newton in the dual unknowns z = (u, v); the state is
// recovered through the entropy-gradient inversion, which keeps it interior.
// Requires symmetric parameters.
SystemState step_regularized_euler(const System& sys, const SystemState& prev,
                                   const RegularizedStepConfig& cfg);

// Discrete-inequality bookkeeping for one accepted step of the scheme.
struct RegularizedStepCheck {
    double h_prev = 0.0, h_next = 0.0;  // entropy before/after
    double quadform = 0.0;              // dissipation quadratic form at the new state
    double h1_term = 0.0;               // ||u||_H1^2 + ||v||_H1^2 at the new state
    double mass_shift_r = 0.0, mass_shift_b = 0.0;  // predicted -tau^2 * integral of (u, v)
};

RegularizedStepCheck check_regularized_step(const System& sys, const SystemState& prev,
                                            const SystemState& next,
                                            const RegularizedStepConfig& cfg);

}  // namespace crossdiff
