#include "crossdiff/stability.hpp"

#include <algorithm>
#include <cmath>

#include "crossdiff/errors.hpp"

namespace crossdiff {

namespace {

// Interleaved index of (node, species).
inline int idx(int node, int species) { return 2 * node + species; }

}  // namespace

DenseMatrix rhs_jacobian_dense(const System& sys, const SystemState& s, bool gf_form) {
    const int n = sys.grid.n_nodes();
    const int N = 2 * n;
    DenseMatrix J(N);
    std::vector<double> y(N), f0(N), fp(N), yp(N);
    for (int i = 0; i < n; ++i) {
        y[idx(i, 0)] = s.r[i];
        y[idx(i, 1)] = s.b[i];
    }
    SystemState scratch = s;
    auto eval = [&](const std::vector<double>& yy, std::vector<double>& ff) {
        for (int i = 0; i < n; ++i) {
            scratch.r[i] = yy[idx(i, 0)];
            scratch.b[i] = yy[idx(i, 1)];
        }
        rhs_into(sys, scratch, ff.data(), gf_form);
    };
    eval(y, f0);

    double yscale = 0.0;
    for (double v : y) yscale = std::max(yscale, std::abs(v));
    constexpr int kBandHalf = 3;
    constexpr int kColors = 2 * kBandHalf + 1;
    for (int color = 0; color < kColors; ++color) {
        yp = y;
        for (int j = color; j < N; j += kColors)
            yp[j] += 1.4901161193847656e-08 * (std::abs(y[j]) + 1e-3 * yscale + 1e-300);
        eval(yp, fp);
        for (int j = color; j < N; j += kColors) {
            const double delta =
                1.4901161193847656e-08 * (std::abs(y[j]) + 1e-3 * yscale + 1e-300);
            const int ilo = std::max(0, j - kBandHalf);
            const int ihi = std::min(N - 1, j + kBandHalf);
            for (int i = ilo; i <= ihi; ++i) J(i, j) = (fp[i] - f0[i]) / delta;
        }
    }
    return J;
}

LinearizedOperators assemble_linearization(const System& sys, const SystemState& stat,
                                           bool with_perturbation) {
    const Grid1D& g = sys.grid;
    const int n = g.n_nodes();
    const int N = 2 * n;
    const Coefficients& c = sys.coeffs;

    for (int i = 0; i < n; ++i)
        if (!(stat.r[i] > 0.0) || !(stat.b[i] > 0.0))
            throw DomainError("linearization requires an interior state (node " +
                              std::to_string(i) + ")");

    LinearizedOperators ops;
    ops.n_nodes = n;
    ops.eps_2d = c.eps_2d;

    // A: quadrature-weighted inverse of the nodal entropy Hessian.
    const EntropyKind ekind = c.symmetric ? EntropyKind{SymmetricEntropy{}}
                                          : EntropyKind{GeneralEntropy{}};
    const MatField hess = entropy_hessian(sys, stat, ekind);
    ops.A.resize(n);
    for (int i = 0; i < n; ++i) {
        const double w = g.weight(i);
        const Mat2 inv = hess.at(i).inverse();
        ops.A[i] = {w * inv.a11, w * inv.a12, w * inv.a21, w * inv.a22};
    }

    // B: - D^T (h M_f) D with the face-mean frozen mobility; symmetric
    // negative semidefinite with the two constant pair-fields in its kernel.
    const MobilityKind mkind =
        c.symmetric ? MobilityKind{SymmetricMobility{}} : MobilityKind{GeneralMobility{}};
    const MatField mob = mobility(stat, c, mkind);
    ops.B = DenseMatrix(N);
    const double inv_h = 1.0 / g.h();
    for (int f = 0; f < g.n_faces(); ++f) {
        const Mat2 mf{0.5 * (mob.m11[f] + mob.m11[f + 1]), 0.5 * (mob.m12[f] + mob.m12[f + 1]),
                      0.5 * (mob.m21[f] + mob.m21[f + 1]), 0.5 * (mob.m22[f] + mob.m22[f + 1])};
        // Quadratic-form contribution -h * (dz)^T M_f (dz); dz couples the two
        // adjacent nodes with +-1/h. Symmetrize the off-diagonal entries.
        const double m11 = mf.a11;
        const double m12 = 0.5 * (mf.a12 + mf.a21);
        const double m22 = mf.a22;
        const double scale = g.h() * inv_h * inv_h;  // 1/h
        const int iL = f, iR = f + 1;
        const double block[2][2] = {{m11, m12}, {m12, m22}};
        for (int a = 0; a < 2; ++a) {
            for (int bsp = 0; bsp < 2; ++bsp) {
                const double v = scale * block[a][bsp];
                ops.B(idx(iL, a), idx(iL, bsp)) -= v;
                ops.B(idx(iR, a), idx(iR, bsp)) -= v;
                ops.B(idx(iL, a), idx(iR, bsp)) += v;
                ops.B(idx(iR, a), idx(iL, bsp)) += v;
            }
        }
    }

    if (with_perturbation) {
        if (!(c.eps_2d > 0.0))
            throw ConfigError("perturbation block needs a nonzero reference diameter");
        // C = (J_full - J_gf) A_unweighted / eps^{2d}: the defect derivative in
        // dual variables, bounded as eps -> 0.
        const DenseMatrix Jfull = rhs_jacobian_dense(sys, stat, false);
        const DenseMatrix Jgf = rhs_jacobian_dense(sys, stat, true);
        ops.C = DenseMatrix(N);
        // Unweighted inverse Hessian blocks map dual perturbations to primal.
        std::vector<Mat2> Ainv(n);
        for (int i = 0; i < n; ++i) Ainv[i] = hess.at(i).inverse();
        for (int i = 0; i < N; ++i) {
            const int wi = i / 2;
            const double w = g.weight(wi);
            for (int jn = 0; jn < n; ++jn) {
                const Mat2& Aj = Ainv[jn];
                for (int sp = 0; sp < 2; ++sp) {
                    const int j = idx(jn, sp);
                    const double dfull = Jfull(i, idx(jn, 0)) * (sp == 0 ? Aj.a11 : Aj.a12) +
                                         Jfull(i, idx(jn, 1)) * (sp == 0 ? Aj.a21 : Aj.a22);
                    const double dgf = Jgf(i, idx(jn, 0)) * (sp == 0 ? Aj.a11 : Aj.a12) +
                                       Jgf(i, idx(jn, 1)) * (sp == 0 ? Aj.a21 : Aj.a22);
                    ops.C(i, j) = w * (dfull - dgf) / c.eps_2d;
                }
            }
        }
        ops.has_C = true;
    }
    return ops;
}

namespace {

// Congruence transform L^{-1} K L^{-T} with the block-diagonal Cholesky of A.
DenseMatrix whiten(const LinearizedOperators& ops, const DenseMatrix& K) {
    const int n = ops.n_nodes;
    const int N = 2 * n;
    std::vector<Mat2> L(n), Linv(n);
    for (int i = 0; i < n; ++i) {
        L[i] = ops.A[i].cholesky();
        // Inverse of a lower-triangular 2x2.
        const double l11 = L[i].a11, l21 = L[i].a21, l22 = L[i].a22;
        Linv[i] = {1.0 / l11, 0.0, -l21 / (l11 * l22), 1.0 / l22};
    }
    DenseMatrix out(N);
    // out = Linv * K * Linv^T, exploiting the block-diagonal structure.
    for (int bi = 0; bi < n; ++bi) {
        for (int bj = 0; bj < n; ++bj) {
            double k[2][2];
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) k[a][b] = K(idx(bi, a), idx(bj, b));
            // tmp = Linv_bi * k
            double tmp[2][2];
            tmp[0][0] = Linv[bi].a11 * k[0][0];
            tmp[0][1] = Linv[bi].a11 * k[0][1];
            tmp[1][0] = Linv[bi].a21 * k[0][0] + Linv[bi].a22 * k[1][0];
            tmp[1][1] = Linv[bi].a21 * k[0][1] + Linv[bi].a22 * k[1][1];
            // res = tmp * Linv_bj^T
            double res[2][2];
            res[0][0] = tmp[0][0] * Linv[bj].a11;
            res[0][1] = tmp[0][0] * Linv[bj].a21 + tmp[0][1] * Linv[bj].a22;
            res[1][0] = tmp[1][0] * Linv[bj].a11;
            res[1][1] = tmp[1][0] * Linv[bj].a21 + tmp[1][1] * Linv[bj].a22;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) out(idx(bi, a), idx(bj, b)) = res[a][b];
        }
    }
    return out;
}

}  // namespace

SpectrumSummary spectrum(const LinearizedOperators& ops, int k) {
    DenseMatrix S = whiten(ops, ops.B);
    // Enforce exact symmetry before the symmetric solve.
    for (int i = 0; i < S.n; ++i)
        for (int j = 0; j < i; ++j) {
            const double v = 0.5 * (S(i, j) + S(j, i));
            S(i, j) = v;
            S(j, i) = v;
        }
    std::vector<double> vals = sym_eigenvalues(S);
    std::sort(vals.begin(), vals.end(), std::greater<>());

    SpectrumSummary sum;
    sum.max_abs = 0.0;
    for (double v : vals) sum.max_abs = std::max(sum.max_abs, std::abs(v));
    const double null_tol = 1e-8 * sum.max_abs;
    for (double v : vals)
        if (std::abs(v) <= null_tol) ++sum.null_count;
    sum.leading_nonzero = 0.0;
    for (double v : vals) {
        if (std::abs(v) > null_tol) {
            sum.leading_nonzero = v;
            break;
        }
    }
    if (k > 0 && static_cast<int>(vals.size()) > k) vals.resize(k);
    sum.values = std::move(vals);
    return sum;
}

std::vector<std::complex<double>> spectrum_perturbed(const LinearizedOperators& ops) {
    if (!ops.has_C) throw ConfigError("perturbed spectrum requires the perturbation block");
    DenseMatrix K = ops.B;
    for (std::size_t i = 0; i < K.a.size(); ++i) K.a[i] += ops.eps_2d * ops.C.a[i];
    DenseMatrix S = whiten(ops, K);
    auto vals = eigenvalues(S);
    std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) {
        return a.real() > b.real();
    });
    return vals;
}

}  // namespace crossdiff
