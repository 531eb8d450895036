#pragma once

#include "crossdiff/grid.hpp"

namespace crossdiff {

// Linear external potential slope * x. The drift entering the equations is the
// constant gradient; nodal tabulation is derived on demand for a given grid.
struct LinearPotential {
    double slope = 0.0;
    double value(double x) const { return slope * x; }
    double grad() const { return slope; }
    GridField sample(const Grid1D& grid) const;
};

struct ModelParams {
    int d = 2;                        // ball dimension, 2 or 3
    double eps_r = 0.0, eps_b = 0.0;  // particle diameters
    double D_r = 1.0, D_b = 1.0;      // diffusivities
    double N_r = 1.0, N_b = 1.0;      // species masses
    double v_r = 0.0, v_b = 0.0;      // slopes of the unscaled linear potentials
    double x_lo = -0.5, x_hi = 0.5;

    double eps_br() const { return 0.5 * (eps_r + eps_b); }
    // Rescaled potentials V_i = (unscaled potential)/D_i as they enter fluxes
    // and entropies.
    LinearPotential potential_r() const { return {v_r / D_r}; }
    LinearPotential potential_b() const { return {v_b / D_b}; }

    void validate() const;  // throws ConfigError
};

// Closed-form interaction coefficients for balls, the scaled forms used by the
// equal-size/equal-diffusivity reduction, and the size ratios a_i relative to
// the reference diameter.
struct Coefficients {
    int d = 2;
    double alpha = 0.0;
    double beta_r = 0.0, beta_b = 0.0;
    double gamma_r = 0.0, gamma_b = 0.0;
    double alpha_bar = 0.0, gamma_bar = 0.0;  // eps_ref^d-scaled forms
    double theta_r = 0.0, theta_b = 0.0;
    double a_r = 1.0, a_b = 1.0, a_br = 1.0;
    double eps_ref = 0.0;
    double eps_ref_d = 0.0;  // eps_ref^d
    double eps_2d = 0.0;     // eps_ref^(2d)
    double eps_rd = 0.0, eps_bd = 0.0, eps_brd = 0.0;  // diameters^d
    double D_r = 1.0, D_b = 1.0;
    bool symmetric = false;  // equal diameters and diffusivities

    // eps_ref^d * theta_r, the sweep axis of the figure reproductions.
    double scaled_theta_r() const { return eps_ref_d * theta_r; }
};

Coefficients compute_coefficients(const ModelParams& params, double eps_ref);
// eps_ref defaults to max(eps_r, eps_b).
Coefficients compute_coefficients(const ModelParams& params);

// Volume of a d-ball of given diameter.
double ball_volume(int d, double diameter);
// Total excluded volume N_r v_d(eps_r) + N_b v_d(eps_b).
double volume_fraction(const ModelParams& params);
// Pointwise volume density v_d(eps_r) r(x) + v_d(eps_b) b(x).
GridField local_volume_density(const ModelParams& params, const SystemState& s);

}  // namespace crossdiff
