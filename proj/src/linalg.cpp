#include "crossdiff/linalg.hpp"

#include <lapacke.h>

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "crossdiff/errors.hpp"

namespace crossdiff {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(ldab_) * n, 0.0), ipiv_(n) {}

void BandedMatrix::zero() {
    std::fill(ab_.begin(), ab_.end(), 0.0);
    factored_ = false;
}

double& BandedMatrix::at(int i, int j) {
    assert(j - i <= ku_ && i - j <= kl_);
    // LAPACK band storage: AB(kl + ku + i - j, j), column major.
    return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

double BandedMatrix::at(int i, int j) const {
    assert(j - i <= ku_ && i - j <= kl_);
    return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

void BandedMatrix::factor() {
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(),
                                           ldab_, ipiv_.data());
    if (info != 0)
        throw SolverError("banded LU factorization failed, info " + std::to_string(info));
    factored_ = true;
}

void BandedMatrix::solve(std::vector<double>& rhs) const {
    if (!factored_) throw SolverError("banded solve before factorization");
    const lapack_int info =
        LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ldab_,
                       ipiv_.data(), rhs.data(), n_);
    if (info != 0) throw SolverError("banded solve failed, info " + std::to_string(info));
}

std::vector<double> sym_eigenvalues(const DenseMatrix& m, DenseMatrix* vecs) {
    DenseMatrix work = m;
    std::vector<double> values(m.n);
    const lapack_int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, vecs ? 'V' : 'N', 'U', m.n,
                                          work.a.data(), m.n, values.data());
    if (info != 0)
        throw SolverError("symmetric eigensolve failed, info " + std::to_string(info));
    if (vecs) *vecs = work;
    return values;
}

std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m) {
    DenseMatrix work = m;
    std::vector<double> wr(m.n), wi(m.n);
    // Row-major LAPACKE validates the vector leading dimensions even with
    // jobv = 'N'; hand it real scratch space.
    std::vector<double> vl(static_cast<std::size_t>(m.n) * m.n);
    std::vector<double> vr(static_cast<std::size_t>(m.n) * m.n);
    const lapack_int info =
        LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'N', m.n, work.a.data(), m.n, wr.data(),
                      wi.data(), vl.data(), m.n, vr.data(), m.n);
    if (info != 0)
        throw SolverError("general eigensolve failed, info " + std::to_string(info));
    std::vector<std::complex<double>> out(m.n);
    for (int i = 0; i < m.n; ++i) out[i] = {wr[i], wi[i]};
    return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_slope: need matched samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace crossdiff
