#pragma once

#include <variant>

#include "crossdiff/mat2.hpp"
#include "crossdiff/system.hpp"

namespace crossdiff {

// E for equal sizes and diffusivities: r log r + b log b + r V_r + b V_b
// + (alpha_bar/2) (r + b)^2.
struct SymmetricEntropy {};

// E_eps with species-specific diameters: quadratic term
// (alpha/2)(eps_r^d r^2 + 2 eps_br^d r b + eps_b^d b^2).
struct GeneralEntropy {};

// Truncated expansion: order 0 keeps the size-free part only, order 1 adds
// the eps_ref^d correction (identical to GeneralEntropy).
struct ExpansionEntropy {
    int order = 1;
};

// Modified entropy of the implicit time-discrete scheme. Density uses the
// r(log r - 1) convention and carries the packing barrier
// tau (1 - gamma_bar rho)(log(1 - gamma_bar rho) - 1). Requires symmetric
// parameters.
struct RegularizedEntropy {
    double tau = 0.0;
};

using EntropyKind =
    std::variant<SymmetricEntropy, GeneralEntropy, ExpansionEntropy, RegularizedEntropy>;

struct EntropyVariables {
    GridField u, v;
    EntropyKind kind;
};

// Trapezoid quadrature of the entropy density. 0 log 0 evaluates to 0.
// RegularizedEntropy throws DomainError (with the node index) if
// gamma_bar * rho >= 1 anywhere.
double entropy_value(const System& sys, const SystemState& s, const EntropyKind& kind);

// Nodal dual variables. The quoted closed forms are implemented verbatim:
// no kind carries the additive constant from d(r log r)/dr, so the pairing
// with entropy_value is exact for RegularizedEntropy and offset by exactly 1
// per species for the r log r kinds. Throws DomainError on nonpositive
// densities (names the node).
EntropyVariables entropy_variables(const System& sys, const SystemState& s,
                                   const EntropyKind& kind);

// Nodal Hessian of the entropy density for the given kind; SPD on the
// interior of the admissible set.
MatField entropy_hessian(const System& sys, const SystemState& s, const EntropyKind& kind);

// Hessian of the regularized density (RegularizedEntropy{tau}).
MatField dual_hessian(const System& sys, const SystemState& s, double tau);

// Unique root z in (0, 1/gamma_bar) of z = sum_exp * (1 - gamma_bar z)^tau_gamma,
// by bisection. For gamma_bar == 0 or tau_gamma == 0 the closed form applies.
double solve_density_fixed_point(double sum_exp, double gamma_bar, double tau_gamma);

// Inverts the regularized entropy gradient at one point: finds (r, b) with
// grad = (u, v), given the nodal potential values. Fixed-point initialization
// (stripping the alpha_bar rho + V terms) followed by a damped Newton on the
// 2x2 system; residual tolerance 1e-12, at most 100 iterations, steps confined
// to the interior of the admissible set.
std::array<double, 2> invert_entropy_gradient_node(double u, double v, double Vr, double Vb,
                                                   double alpha_bar, double gamma_bar,
                                                   double tau);

// Nodal inversion over a whole field. Round-trips with entropy_variables
// (RegularizedEntropy{tau}) to solver tolerance.
SystemState invert_entropy_gradient(const System& sys, const EntropyVariables& vars, double tau);

}  // namespace crossdiff
