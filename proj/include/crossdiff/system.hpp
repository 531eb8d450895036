#pragma once

#include "crossdiff/grid.hpp"
#include "crossdiff/model.hpp"

namespace crossdiff {

// Grid, parameters and derived coefficients bundled with the tabulated
// rescaled potentials. Immutable after build(); safe to share across threads.
struct System {
    Grid1D grid;
    ModelParams params;
    Coefficients coeffs;
    GridField Vr, Vb;  // rescaled potentials at the nodes
    double dVr = 0.0, dVb = 0.0;  // their constant slopes

    static System build(const Grid1D& grid, const ModelParams& params);
    static System build(const Grid1D& grid, const ModelParams& params, double eps_ref);
};

}  // namespace crossdiff
