#include "crossdiff/discretization.hpp"

#include <cmath>

#include "crossdiff/errors.hpp"

namespace crossdiff {

namespace {
constexpr int kParallelThreshold = 4096;
}

FluxField assemble_fluxes(const System& sys, const SystemState& s) {
    const Grid1D& g = sys.grid;
    const int nf = g.n_faces();
    const double inv_h = 1.0 / g.h();
    const Coefficients& c = sys.coeffs;
    FluxField flux;
    flux.jr.resize(nf);
    flux.jb.resize(nf);
#pragma omp parallel for schedule(static) if (nf >= kParallelThreshold)
    for (int f = 0; f < nf; ++f) {
        const double rm = 0.5 * (s.r[f] + s.r[f + 1]);
        const double bm = 0.5 * (s.b[f] + s.b[f + 1]);
        const double dr = (s.r[f + 1] - s.r[f]) * inv_h;
        const double db = (s.b[f + 1] - s.b[f]) * inv_h;
        const Flux2 j = flux_general_point(rm, bm, dr, db, sys.dVr, sys.dVb, c);
        flux.jr[f] = j.jr;
        flux.jb[f] = j.jb;
    }
    return flux;
}

FluxField assemble_symmetric_fluxes(const System& sys, const SystemState& s) {
    if (!sys.coeffs.symmetric)
        throw ConfigError("symmetric flux assembly requires equal sizes and diffusivities");
    const Grid1D& g = sys.grid;
    const int nf = g.n_faces();
    const double inv_h = 1.0 / g.h();
    const double abar = sys.coeffs.alpha_bar;
    const double gbar = sys.coeffs.gamma_bar;
    const double D = sys.coeffs.D_r;
    const double cross = gbar * (sys.dVb - sys.dVr);
    FluxField flux;
    flux.jr.resize(nf);
    flux.jb.resize(nf);
#pragma omp parallel for schedule(static) if (nf >= kParallelThreshold)
    for (int f = 0; f < nf; ++f) {
        const double rm = 0.5 * (s.r[f] + s.r[f + 1]);
        const double bm = 0.5 * (s.b[f] + s.b[f + 1]);
        const double dr = (s.r[f + 1] - s.r[f]) * inv_h;
        const double db = (s.b[f + 1] - s.b[f]) * inv_h;
        const double rho = rm + bm;
        const double drho = dr + db;
        flux.jr[f] = D * ((1.0 - gbar * rho) * dr + (abar + gbar) * rm * drho +
                          rm * sys.dVr + cross * rm * bm);
        flux.jb[f] = D * ((1.0 - gbar * rho) * db + (abar + gbar) * bm * drho +
                          bm * sys.dVb - cross * rm * bm);
    }
    return flux;
}

FluxField assemble_gradflow_fluxes(const System& sys, const SystemState& s) {
    const Grid1D& g = sys.grid;
    const int nf = g.n_faces();
    const double inv_h = 1.0 / g.h();
    FluxField flux;
    flux.jr.resize(nf);
    flux.jb.resize(nf);
#pragma omp parallel for schedule(static) if (nf >= kParallelThreshold)
    for (int f = 0; f < nf; ++f) {
        const double rm = 0.5 * (s.r[f] + s.r[f + 1]);
        const double bm = 0.5 * (s.b[f] + s.b[f + 1]);
        const double dr = (s.r[f + 1] - s.r[f]) * inv_h;
        const double db = (s.b[f + 1] - s.b[f]) * inv_h;
        const Flux2 j = flux_gradflow_point(rm, bm, dr, db, sys.dVr, sys.dVb, sys.coeffs);
        flux.jr[f] = j.jr;
        flux.jb[f] = j.jb;
    }
    return flux;
}

PairField divergence(const Grid1D& grid, const FluxField& flux) {
    const int n = grid.n_nodes();
    PairField out;
    out.r.resize(n);
    out.b.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (int i = 0; i < n; ++i) {
        const double jl_r = (i == 0) ? 0.0 : flux.jr[i - 1];
        const double jl_b = (i == 0) ? 0.0 : flux.jb[i - 1];
        const double jr_r = (i == grid.n_cells) ? 0.0 : flux.jr[i];
        const double jr_b = (i == grid.n_cells) ? 0.0 : flux.jb[i];
        const double inv_w = 1.0 / grid.weight(i);
        out.r[i] = (jr_r - jl_r) * inv_w;
        out.b[i] = (jr_b - jl_b) * inv_w;
    }
    return out;
}

PairField rhs(const System& sys, const SystemState& s) {
    return divergence(sys.grid, assemble_fluxes(sys, s));
}

void rhs_into(const System& sys, const SystemState& s, double* out, bool gf_form) {
    const FluxField flux =
        gf_form ? assemble_gradflow_fluxes(sys, s) : assemble_fluxes(sys, s);
    const PairField div = divergence(sys.grid, flux);
    const int n = sys.grid.n_nodes();
    for (int i = 0; i < n; ++i) {
        out[2 * i] = div.r[i];
        out[2 * i + 1] = div.b[i];
    }
}

PairField nodal_gradients(const Grid1D& grid, const SystemState& s) {
    const int n = grid.n_nodes();
    const double inv_h = 1.0 / grid.h();
    PairField out;
    out.r.resize(n);
    out.b.resize(n);
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            out.r[i] = (s.r[1] - s.r[0]) * inv_h;
            out.b[i] = (s.b[1] - s.b[0]) * inv_h;
        } else if (i == grid.n_cells) {
            out.r[i] = (s.r[i] - s.r[i - 1]) * inv_h;
            out.b[i] = (s.b[i] - s.b[i - 1]) * inv_h;
        } else {
            out.r[i] = 0.5 * (s.r[i + 1] - s.r[i - 1]) * inv_h;
            out.b[i] = 0.5 * (s.b[i + 1] - s.b[i - 1]) * inv_h;
        }
    }
    return out;
}

double rhs_inf_norm(const System& sys, const SystemState& s) {
    const PairField f = rhs(sys, s);
    double m = 0.0;
    for (std::size_t i = 0; i < f.r.size(); ++i)
        m = std::max({m, std::abs(f.r[i]), std::abs(f.b[i])});
    return m;
}

}  // namespace crossdiff
