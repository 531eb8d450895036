#pragma once

#include <complex>
#include <vector>

namespace crossdiff {

// Dense row-major square matrix.
struct DenseMatrix {
    int n = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    explicit DenseMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// General banded matrix in LAPACK storage (column major, with fill-in rows for
// the factorization). Entries with |i - j| > band are not representable.
class BandedMatrix {
  public:
    BandedMatrix(int n, int kl, int ku);

    void zero();
    double& at(int i, int j);
    double at(int i, int j) const;
    int n() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }

    // In-place LU with partial pivoting; subsequent solve() calls reuse it.
    void factor();
    void solve(std::vector<double>& rhs) const;  // overwrites rhs with the solution

  private:
    int n_, kl_, ku_, ldab_;
    std::vector<double> ab_;
    std::vector<int> ipiv_;
    bool factored_ = false;
};

// Eigenvalues of a symmetric matrix, ascending. Optionally fills eigenvectors
// (column j of vecs belongs to values[j]).
std::vector<double> sym_eigenvalues(const DenseMatrix& m, DenseMatrix* vecs = nullptr);

// Eigenvalues of a general matrix.
std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace crossdiff
