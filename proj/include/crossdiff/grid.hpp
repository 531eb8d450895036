#pragma once

#include <vector>

namespace crossdiff {

using GridField = std::vector<double>;

// Vertex-centered uniform 1-D grid: n_cells intervals, n_cells+1 nodes,
// interior faces at the interval midpoints. The domain walls coincide with
// the first and last node; fluxes there are identically zero and not stored.
struct Grid1D {
    double x_lo = -0.5;
    double x_hi = 0.5;
    int n_cells = 200;

    double h() const { return (x_hi - x_lo) / n_cells; }
    int n_nodes() const { return n_cells + 1; }
    int n_faces() const { return n_cells; }
    double node(int i) const { return x_lo + i * h(); }
    double face(int f) const { return x_lo + (f + 0.5) * h(); }
    // Trapezoid weight of node i (half cells at the walls).
    double weight(int i) const { return (i == 0 || i == n_cells) ? 0.5 * h() : h(); }
    double length() const { return x_hi - x_lo; }
};

// Validates n_cells >= 4 and x_hi > x_lo.
Grid1D make_grid(double x_lo, double x_hi, int n_cells);

struct SystemState {
    GridField r;
    GridField b;
    double t = 0.0;
};

SystemState uniform_state(const Grid1D& grid, double r0, double b0);

// Compensated trapezoid quadrature of a nodal field.
double trapezoid(const Grid1D& grid, const GridField& f);
// Grid-weighted L2 norm, sqrt(trapezoid(f^2)).
double l2_norm(const Grid1D& grid, const GridField& f);
double l2_error(const Grid1D& grid, const GridField& f, const GridField& g);
double linf_norm(const GridField& f);

double mass_r(const Grid1D& grid, const SystemState& s);
double mass_b(const Grid1D& grid, const SystemState& s);

bool all_finite(const GridField& f);

}  // namespace crossdiff
