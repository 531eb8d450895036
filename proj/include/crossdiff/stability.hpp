#pragma once

#include <complex>

#include "crossdiff/linalg.hpp"
#include "crossdiff/stationary.hpp"

namespace crossdiff {

// Discrete pencil of the linearization in dual variables:
//   lambda A z = (B + eps^{2d} C) z.
// A is the node-diagonal, quadrature-weighted inverse entropy Hessian; B the
// frozen-mobility divergence form (symmetric negative semidefinite, constants
// in its null space); C the scaled defect perturbation.
struct LinearizedOperators {
    std::vector<Mat2> A;  // per-node SPD blocks
    DenseMatrix B;
    DenseMatrix C;  // empty unless assembled with the perturbation
    bool has_C = false;
    double eps_2d = 0.0;
    int n_nodes = 0;
};

// Operators about a stationary state. The entropy kind picks the Hessian
// (symmetric reduction vs species-specific). with_perturbation additionally
// finite-differences the full and gradient-flow right-hand sides to extract C.
LinearizedOperators assemble_linearization(const System& sys, const SystemState& stat,
                                           bool with_perturbation = false);

// Dense Jacobian of the semidiscrete rhs at a state (colored finite
// differences); gf_form selects the induced gradient-flow assembly.
DenseMatrix rhs_jacobian_dense(const System& sys, const SystemState& s, bool gf_form);

struct SpectrumSummary {
    std::vector<double> values;  // symmetric pencil, descending
    int null_count = 0;          // |lambda| <= 1e-8 max|lambda|
    double leading_nonzero = 0.0;
    double max_abs = 0.0;
};

// Eigenvalues of the symmetric pencil (B, A) via the block-Cholesky congruence
// and a dense symmetric solve; k <= 0 keeps all values.
SpectrumSummary spectrum(const LinearizedOperators& ops, int k = 0);

// Eigenvalues of the perturbed pencil (B + eps^{2d} C, A); complex in general.
std::vector<std::complex<double>> spectrum_perturbed(const LinearizedOperators& ops);

}  // namespace crossdiff
