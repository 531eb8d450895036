#pragma once

#include "crossdiff/mobility.hpp"
#include "crossdiff/system.hpp"

namespace crossdiff {

// Face fluxes at the interval midpoints (n_faces values per species), D_i
// factors included. The wall fluxes are identically zero and not stored.
struct FluxField {
    GridField jr, jb;
};

// Second-order conservative assembly of the full system: centered differences
// for gradients, arithmetic-mean face values for densities.
FluxField assemble_fluxes(const System& sys, const SystemState& s);

// rho-form assembly of the equal-size/equal-diffusivity reduction. Agrees
// with assemble_fluxes to round-off for symmetric parameters; throws
// ConfigError otherwise.
FluxField assemble_symmetric_fluxes(const System& sys, const SystemState& s);

// Gradient-flow-form assembly: face-mean mobility times chain-rule dual
// gradients, without the defect term.
FluxField assemble_gradflow_fluxes(const System& sys, const SystemState& s);

// (J_f - J_{f-1}) / w_i with zero wall fluxes; the weighted nodal sum
// telescopes to zero exactly.
PairField divergence(const Grid1D& grid, const FluxField& flux);

// Time derivative fields of the full system.
PairField rhs(const System& sys, const SystemState& s);

// rhs into a flat interleaved buffer [r0, b0, r1, b1, ...]; gf_form selects
// the gradient-flow assembly.
void rhs_into(const System& sys, const SystemState& s, double* out, bool gf_form = false);

// Centered differences at interior nodes, one-sided at the walls.
PairField nodal_gradients(const Grid1D& grid, const SystemState& s);

double rhs_inf_norm(const System& sys, const SystemState& s);

}  // namespace crossdiff
