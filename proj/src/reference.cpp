#include "crossdiff/reference.hpp"

#include <cmath>

#include "crossdiff/errors.hpp"

// Straightforward single-threaded formula transcriptions. These deliberately
// avoid the shared kernel helpers so the tests compare two independent paths.
namespace crossdiff::ref {

namespace {

double face_r(const SystemState& s, int f) { return 0.5 * (s.r[f] + s.r[f + 1]); }
double face_b(const SystemState& s, int f) { return 0.5 * (s.b[f] + s.b[f + 1]); }

}  // namespace

FluxField assemble_fluxes(const System& sys, const SystemState& s) {
    const Grid1D& g = sys.grid;
    const Coefficients& c = sys.coeffs;
    FluxField out;
    out.jr.resize(g.n_faces());
    out.jb.resize(g.n_faces());
    for (int f = 0; f < g.n_faces(); ++f) {
        const double r = face_r(s, f), b = face_b(s, f);
        const double dr = (s.r[f + 1] - s.r[f]) / g.h();
        const double db = (s.b[f + 1] - s.b[f]) / g.h();
        out.jr[f] = c.D_r * ((1.0 + c.eps_rd * c.alpha * r) * dr + sys.dVr * r +
                             c.eps_brd * (c.beta_r * r * db - c.gamma_r * b * dr +
                                          (c.gamma_b * sys.dVb - c.gamma_r * sys.dVr) * r * b));
        out.jb[f] = c.D_b * ((1.0 + c.eps_bd * c.alpha * b) * db + sys.dVb * b +
                             c.eps_brd * (c.beta_b * b * dr - c.gamma_b * r * db +
                                          (c.gamma_r * sys.dVr - c.gamma_b * sys.dVb) * r * b));
    }
    return out;
}

FluxField assemble_symmetric_fluxes(const System& sys, const SystemState& s) {
    const Grid1D& g = sys.grid;
    const Coefficients& c = sys.coeffs;
    if (!c.symmetric) throw ConfigError("reference symmetric assembly: asymmetric parameters");
    FluxField out;
    out.jr.resize(g.n_faces());
    out.jb.resize(g.n_faces());
    for (int f = 0; f < g.n_faces(); ++f) {
        const double r = face_r(s, f), b = face_b(s, f);
        const double dr = (s.r[f + 1] - s.r[f]) / g.h();
        const double db = (s.b[f + 1] - s.b[f]) / g.h();
        const double rho = r + b, drho = dr + db;
        out.jr[f] = c.D_r * ((1.0 - c.gamma_bar * rho) * dr +
                             (c.alpha_bar + c.gamma_bar) * r * drho + r * sys.dVr +
                             c.gamma_bar * (sys.dVb - sys.dVr) * r * b);
        out.jb[f] = c.D_b * ((1.0 - c.gamma_bar * rho) * db +
                             (c.alpha_bar + c.gamma_bar) * b * drho + b * sys.dVb +
                             c.gamma_bar * (sys.dVr - sys.dVb) * r * b);
    }
    return out;
}

PairField rhs(const System& sys, const SystemState& s) {
    const Grid1D& g = sys.grid;
    const FluxField flux = ref::assemble_fluxes(sys, s);
    PairField out;
    out.r.assign(g.n_nodes(), 0.0);
    out.b.assign(g.n_nodes(), 0.0);
    for (int i = 0; i < g.n_nodes(); ++i) {
        const double jl_r = i > 0 ? flux.jr[i - 1] : 0.0;
        const double jl_b = i > 0 ? flux.jb[i - 1] : 0.0;
        const double jr_r = i < g.n_cells ? flux.jr[i] : 0.0;
        const double jr_b = i < g.n_cells ? flux.jb[i] : 0.0;
        out.r[i] = (jr_r - jl_r) / g.weight(i);
        out.b[i] = (jr_b - jl_b) / g.weight(i);
    }
    return out;
}

MatField mobility(const SystemState& s, const Coefficients& c, const MobilityKind& kind) {
    const std::size_t n = s.r.size();
    MatField m;
    m.m11.resize(n);
    m.m12.resize(n);
    m.m21.resize(n);
    m.m22.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.r[i], b = s.b[i];
        if (std::holds_alternative<SymmetricMobility>(kind)) {
            m.m11[i] = r * (1.0 - c.gamma_bar * b);
            m.m12[i] = c.gamma_bar * r * b;
            m.m21[i] = c.gamma_bar * r * b;
            m.m22[i] = b * (1.0 - c.gamma_bar * r);
        } else if (const auto* e = std::get_if<ExpansionMobility>(&kind);
                   e && e->order == 0) {
            m.m11[i] = c.D_r * r;
            m.m12[i] = 0.0;
            m.m21[i] = 0.0;
            m.m22[i] = c.D_b * b;
        } else {
            m.m11[i] = c.D_r * r * (1.0 - c.gamma_r * c.eps_brd * b);
            m.m12[i] = c.D_r * c.gamma_b * c.eps_brd * r * b;
            m.m21[i] = c.D_b * c.gamma_r * c.eps_brd * r * b;
            m.m22[i] = c.D_b * b * (1.0 - c.gamma_b * c.eps_brd * r);
        }
    }
    return m;
}

MatField entropy_hessian(const System& sys, const SystemState& s, const EntropyKind& kind) {
    const std::size_t n = s.r.size();
    const Coefficients& c = sys.coeffs;
    MatField h;
    h.m11.resize(n);
    h.m12.resize(n);
    h.m21.resize(n);
    h.m22.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.r[i], b = s.b[i];
        double crr, crb, cbb, barrier = 0.0;
        if (std::holds_alternative<GeneralEntropy>(kind)) {
            crr = c.alpha * c.eps_rd;
            crb = c.alpha * c.eps_brd;
            cbb = c.alpha * c.eps_bd;
        } else if (const auto* e = std::get_if<ExpansionEntropy>(&kind)) {
            crr = crb = cbb = e->order == 0 ? 0.0 : 0.0;
            if (e->order == 1) {
                crr = c.alpha * c.eps_rd;
                crb = c.alpha * c.eps_brd;
                cbb = c.alpha * c.eps_bd;
            }
        } else {
            crr = crb = cbb = c.alpha_bar;
            if (const auto* reg = std::get_if<RegularizedEntropy>(&kind))
                barrier = reg->tau * c.gamma_bar * c.gamma_bar /
                          (1.0 - c.gamma_bar * (r + b));
        }
        h.m11[i] = 1.0 / r + crr + barrier;
        h.m12[i] = crb + barrier;
        h.m21[i] = crb + barrier;
        h.m22[i] = 1.0 / b + cbb + barrier;
    }
    return h;
}

EntropyVariables entropy_variables(const System& sys, const SystemState& s,
                                   const EntropyKind& kind) {
    const std::size_t n = s.r.size();
    const Coefficients& c = sys.coeffs;
    EntropyVariables out;
    out.kind = kind;
    out.u.resize(n);
    out.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.r[i], b = s.b[i];
        double u, v;
        if (std::holds_alternative<GeneralEntropy>(kind) ||
            (std::holds_alternative<ExpansionEntropy>(kind) &&
             std::get<ExpansionEntropy>(kind).order == 1)) {
            u = std::log(r) + sys.Vr[i] + c.alpha * (c.eps_rd * r + c.eps_brd * b);
            v = std::log(b) + sys.Vb[i] + c.alpha * (c.eps_bd * b + c.eps_brd * r);
        } else if (std::holds_alternative<ExpansionEntropy>(kind)) {
            u = std::log(r) + sys.Vr[i];
            v = std::log(b) + sys.Vb[i];
        } else {
            const double rho = r + b;
            u = std::log(r) + c.alpha_bar * rho + sys.Vr[i];
            v = std::log(b) + c.alpha_bar * rho + sys.Vb[i];
            if (const auto* reg = std::get_if<RegularizedEntropy>(&kind)) {
                const double barrier =
                    -reg->tau * c.gamma_bar * std::log(1.0 - c.gamma_bar * rho);
                u += barrier;
                v += barrier;
            }
        }
        out.u[i] = u;
        out.v[i] = v;
    }
    return out;
}

SystemState invert_entropy_gradient(const System& sys, const EntropyVariables& vars,
                                    double tau) {
    // Reference inversion: per node, bisect on rho to close the coupled
    // system, then recover the species split.
    const std::size_t n = vars.u.size();
    const Coefficients& c = sys.coeffs;
    SystemState out;
    out.r.resize(n);
    out.b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = vars.u[i], v = vars.v[i];
        // For fixed rho the duals decouple: r = exp(u - V_r - abar rho + tau g log(1-g rho)).
        auto split = [&](double rho, double& r, double& b) {
            double barrier = 0.0;
            if (tau > 0.0 && c.gamma_bar > 0.0)
                barrier = tau * c.gamma_bar * std::log(1.0 - c.gamma_bar * rho);
            r = std::exp(u - sys.Vr[i] - c.alpha_bar * rho + barrier);
            b = std::exp(v - sys.Vb[i] - c.alpha_bar * rho + barrier);
        };
        double lo = 0.0;
        double hi;
        if (c.gamma_bar > 0.0 && tau > 0.0)
            hi = 1.0 / c.gamma_bar;
        else {
            hi = 1.0;
            double r, b;
            for (int grow = 0; grow < 400; ++grow) {
                split(hi, r, b);
                if (r + b < hi) break;
                hi *= 2.0;
            }
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            double r, b;
            split(mid, r, b);
            ((r + b > mid) ? lo : hi) = mid;
        }
        split(0.5 * (lo + hi), out.r[i], out.b[i]);
    }
    return out;
}

PairField g_vector(const GridField& r, const GridField& b, const GridField& dr,
                   const GridField& db, const Coefficients& c) {
    PairField out;
    out.r.resize(r.size());
    out.b.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double common = c.alpha * c.a_br * r[i] * b[i];
        out.r[i] = common * c.gamma_r * (c.theta_r * dr[i] - c.theta_b * db[i]);
        out.b[i] = common * c.gamma_b * (c.theta_b * db[i] - c.theta_r * dr[i]);
    }
    return out;
}

double entropy_value(const System& sys, const SystemState& s, const EntropyKind& kind) {
    const Grid1D& g = sys.grid;
    const Coefficients& c = sys.coeffs;
    double acc = 0.0;
    for (int i = 0; i < g.n_nodes(); ++i) {
        const double r = s.r[i], b = s.b[i];
        double val = 0.0;
        auto xlx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
        if (const auto* reg = std::get_if<RegularizedEntropy>(&kind)) {
            val = xlx(r) - r + xlx(b) - b + r * sys.Vr[i] + b * sys.Vb[i] +
                  0.5 * c.alpha_bar * (r + b) * (r + b);
            const double one_m = 1.0 - c.gamma_bar * (r + b);
            if (one_m <= 0.0) throw DomainError("reference entropy: packing bound");
            val += reg->tau * one_m * (std::log(one_m) - 1.0);
        } else if (std::holds_alternative<SymmetricEntropy>(kind)) {
            val = xlx(r) + xlx(b) + r * sys.Vr[i] + b * sys.Vb[i] +
                  0.5 * c.alpha_bar * (r + b) * (r + b);
        } else if (const auto* e = std::get_if<ExpansionEntropy>(&kind); e && e->order == 0) {
            val = xlx(r) + xlx(b) + r * sys.Vr[i] + b * sys.Vb[i];
        } else {
            val = xlx(r) + xlx(b) + r * sys.Vr[i] + b * sys.Vb[i] +
                  0.5 * c.alpha * (c.eps_rd * r * r + 2.0 * c.eps_brd * r * b +
                                   c.eps_bd * b * b);
        }
        acc += g.weight(i) * val;
    }
    return acc;
}

double dissipation_quadform(const System& sys, const SystemState& s,
                            const EntropyKind& kind) {
    const Grid1D& g = sys.grid;
    const EntropyVariables vars = ref::entropy_variables(sys, s, kind);
    const bool general = std::holds_alternative<GeneralEntropy>(kind) ||
                         std::holds_alternative<ExpansionEntropy>(kind);
    const MatField m = ref::mobility(s, sys.coeffs,
                                general ? MobilityKind{GeneralMobility{}}
                                        : MobilityKind{SymmetricMobility{}});
    double acc = 0.0;
    for (int f = 0; f < g.n_faces(); ++f) {
        const double du = (vars.u[f + 1] - vars.u[f]) / g.h();
        const double dv = (vars.v[f + 1] - vars.v[f]) / g.h();
        const double m11 = 0.5 * (m.m11[f] + m.m11[f + 1]);
        const double m12 = 0.5 * (m.m12[f] + m.m12[f + 1]);
        const double m21 = 0.5 * (m.m21[f] + m.m21[f + 1]);
        const double m22 = 0.5 * (m.m22[f] + m.m22[f + 1]);
        acc += g.h() * (m11 * du * du + (m12 + m21) * du * dv + m22 * dv * dv);
    }
    return acc;
}

}  // namespace crossdiff::ref
