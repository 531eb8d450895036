#pragma once

#include "crossdiff/discretization.hpp"
#include "crossdiff/entropy.hpp"

// Plain serial implementations of the hot kernels, kept as oracles for the
// parallel versions and as the baseline of the kernel benchmark. Written as
// straightforward node/face loops, independent of the production code paths.
namespace crossdiff::ref {

FluxField assemble_fluxes(const System& sys, const SystemState& s);
FluxField assemble_symmetric_fluxes(const System& sys, const SystemState& s);
PairField rhs(const System& sys, const SystemState& s);
MatField mobility(const SystemState& s, const Coefficients& c, const MobilityKind& kind);
MatField entropy_hessian(const System& sys, const SystemState& s, const EntropyKind& kind);
EntropyVariables entropy_variables(const System& sys, const SystemState& s,
                                   const EntropyKind& kind);
SystemState invert_entropy_gradient(const System& sys, const EntropyVariables& vars,
                                    double tau);
PairField g_vector(const GridField& r, const GridField& b, const GridField& dr,
                   const GridField& db, const Coefficients& c);
double entropy_value(const System& sys, const SystemState& s, const EntropyKind& kind);
double dissipation_quadform(const System& sys, const SystemState& s, const EntropyKind& kind);

}  // namespace crossdiff::ref
