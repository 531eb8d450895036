#include "crossdiff/system.hpp"

namespace crossdiff {

System System::build(const Grid1D& grid, const ModelParams& params, double eps_ref) {
    System sys;
    sys.grid = grid;
    sys.params = params;
    sys.coeffs = compute_coefficients(params, eps_ref);
    sys.Vr = params.potential_r().sample(grid);
    sys.Vb = params.potential_b().sample(grid);
    sys.dVr = params.potential_r().grad();
    sys.dVb = params.potential_b().grad();
    return sys;
}

System System::build(const Grid1D& grid, const ModelParams& params) {
    return build(grid, params, std::max(params.eps_r, params.eps_b));
}

}  // namespace crossdiff
