#pragma once

#include <cstdint>
#include <variant>

#include "crossdiff/mat2.hpp"
#include "crossdiff/model.hpp"

namespace crossdiff {

// M for equal sizes and diffusivities: [[r(1-gb), g r b], [g r b, b(1-gr)]]
// with g = gamma_bar.
struct SymmetricMobility {};
// Species-specific matrix with the D_i and gamma_i weights.
struct GeneralMobility {};
// Truncated expansion: order 0 is diag(D_r r, D_b b); order 1 adds the
// eps_ref^d block (identical to GeneralMobility).
struct ExpansionMobility {
    int order = 1;
};

using MobilityKind = std::variant<SymmetricMobility, GeneralMobility, ExpansionMobility>;

Mat2 mobility_at(double r, double b, const Coefficients& c, const MobilityKind& kind);
MatField mobility(const SystemState& s, const Coefficients& c, const MobilityKind& kind);

// {(r, b): r >= 0, b >= 0, r + b <= 1/gamma_bar}. For gamma_bar == 0 the
// packing bound is vacuous.
struct AdmissibleSet {
    double gamma_bar = 0.0;

    double margin(double r, double b) const { return 1.0 - gamma_bar * (r + b); }
    bool contains(double r, double b) const {
        return r >= 0.0 && b >= 0.0 && margin(r, b) >= 0.0;
    }
    bool strictly_interior(double r, double b) const {
        return r > 0.0 && b > 0.0 && margin(r, b) > 0.0;
    }
};

struct PositivityReport {
    std::vector<std::uint8_t> node_ok;
    GridField margin;  // 1 - gamma_bar rho per node
    bool all_ok = false;
};

// Nodal positive-definiteness flags with the packing margin.
PositivityReport is_positive_definite(const SystemState& s, const Coefficients& c);

// Defect vector of the flux decomposition, evaluated from co-located values
// and gradients (nodes or faces, caller's choice). Identically zero when
// theta_r = theta_b = 0.
PairField g_vector(const GridField& r, const GridField& b, const GridField& dr,
                   const GridField& db, const Coefficients& c);

struct Flux2 {
    double jr = 0, jb = 0;
};

// Pointwise flux of the full system (includes the D_i factors).
Flux2 flux_general_point(double r, double b, double dr, double db, double dVr, double dVb,
                         const Coefficients& c);
// Pointwise flux of the induced gradient-flow structure: M_eps times the
// chain-rule gradients of the dual variables. No defect term.
Flux2 flux_gradflow_point(double r, double b, double dr, double db, double dVr, double dVb,
                          const Coefficients& c);
// Defect at one point.
Flux2 g_vector_point(double r, double b, double dr, double db, const Coefficients& c);

struct AgfCheck {
    PairField residual;          // gradflow-form flux minus eps^{2d} defect minus full flux
    double max_rel = 0.0;        // max |residual| / scale over both species
};

// Verifies the flux decomposition pointwise: the full flux must equal the
// gradient-flow flux minus eps_ref^{2d} times the defect, to round-off.
AgfCheck agf_residual(const GridField& r, const GridField& b, const GridField& dr,
                      const GridField& db, double dVr, double dVb, const Coefficients& c);

}  // namespace crossdiff
