#include "crossdiff/grid.hpp"

#include <cmath>

#include "crossdiff/errors.hpp"

namespace crossdiff {

Grid1D make_grid(double x_lo, double x_hi, int n_cells) {
    if (!(x_hi > x_lo)) throw ConfigError("grid: x_hi must exceed x_lo");
    if (n_cells < 4) throw ConfigError("grid: need at least 4 cells");
    return Grid1D{x_lo, x_hi, n_cells};
}

SystemState uniform_state(const Grid1D& grid, double r0, double b0) {
    SystemState s;
    s.r.assign(grid.n_nodes(), r0);
    s.b.assign(grid.n_nodes(), b0);
    return s;
}

double trapezoid(const Grid1D& grid, const GridField& f) {
    // Kahan-compensated sum; quadrature noise matters for entropy differences.
    double sum = 0.0, comp = 0.0;
    const int n = grid.n_nodes();
    for (int i = 0; i < n; ++i) {
        const double term = grid.weight(i) * f[i] - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

double l2_norm(const Grid1D& grid, const GridField& f) {
    double sum = 0.0, comp = 0.0;
    const int n = grid.n_nodes();
    for (int i = 0; i < n; ++i) {
        const double term = grid.weight(i) * f[i] * f[i] - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return std::sqrt(sum);
}

double l2_error(const Grid1D& grid, const GridField& f, const GridField& g) {
    double sum = 0.0;
    const int n = grid.n_nodes();
    for (int i = 0; i < n; ++i) {
        const double d = f[i] - g[i];
        sum += grid.weight(i) * d * d;
    }
    return std::sqrt(sum);
}

double linf_norm(const GridField& f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

double mass_r(const Grid1D& grid, const SystemState& s) { return trapezoid(grid, s.r); }
double mass_b(const Grid1D& grid, const SystemState& s) { return trapezoid(grid, s.b); }

bool all_finite(const GridField& f) {
    for (double x : f)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace crossdiff
