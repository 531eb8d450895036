#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace crossdiff {

// Dense 2x2 block, row major.
struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

    double det() const { return a11 * a22 - a12 * a21; }
    Mat2 inverse() const {
        const double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    std::array<double, 2> apply(double x, double y) const {
        return {a11 * x + a12 * y, a21 * x + a22 * y};
    }
    std::array<double, 2> solve(double f, double g) const {
        const double d = det();
        return {(a22 * f - a12 * g) / d, (a11 * g - a21 * f) / d};
    }
    // Eigenvalues of a symmetric block, ascending.
    std::array<double, 2> sym_eigenvalues() const {
        const double tr = a11 + a22;
        const double gap = std::sqrt((a11 - a22) * (a11 - a22) + 4.0 * a12 * a21);
        return {0.5 * (tr - gap), 0.5 * (tr + gap)};
    }
    // Lower-triangular Cholesky factor of an SPD block.
    Mat2 cholesky() const {
        const double l11 = std::sqrt(a11);
        const double l21 = a21 / l11;
        const double l22 = std::sqrt(a22 - l21 * l21);
        return {l11, 0.0, l21, l22};
    }
};

// Nodal 2x2 matrix field.
struct MatField {
    std::vector<double> m11, m12, m21, m22;
    std::size_t size() const { return m11.size(); }
    Mat2 at(std::size_t i) const { return {m11[i], m12[i], m21[i], m22[i]}; }
};

// Generic paired field (per-species values at nodes or faces).
struct PairField {
    std::vector<double> r, b;
    std::size_t size() const { return r.size(); }
};

}  // namespace crossdiff
