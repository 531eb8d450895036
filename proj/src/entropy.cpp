#include "crossdiff/entropy.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "crossdiff/errors.hpp"

namespace crossdiff {

namespace {

constexpr int kParallelThreshold = 4096;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
double xlogx_m1(double x) { return x > 0.0 ? x * (std::log(x) - 1.0) : 0.0; }

struct QuadCoef {
    double crr, crb, cbb;  // entropy quadratic term (1/2)(crr r^2 + 2 crb r b + cbb b^2)
};

QuadCoef quad_coef(const Coefficients& c, const EntropyKind& kind) {
    if (std::holds_alternative<SymmetricEntropy>(kind) ||
        std::holds_alternative<RegularizedEntropy>(kind)) {
        if (!c.symmetric)
            throw ConfigError(
                "the scaled entropy forms require equal sizes and diffusivities");
        if (const auto* reg = std::get_if<RegularizedEntropy>(&kind); reg && reg->tau < 0.0)
            throw ConfigError("regularized entropy: tau must be nonnegative");
        return {c.alpha_bar, c.alpha_bar, c.alpha_bar};
    }
    if (const auto* e = std::get_if<ExpansionEntropy>(&kind); e && e->order == 0) {
        return {0.0, 0.0, 0.0};
    }
    return {c.alpha * c.eps_rd, c.alpha * c.eps_brd, c.alpha * c.eps_bd};
}

[[noreturn]] void domain_violation(const char* what, int node) {
    throw DomainError(std::string(what) + " at node " + std::to_string(node));
}

}  // namespace

double entropy_value(const System& sys, const SystemState& s, const EntropyKind& kind) {
    const Grid1D& g = sys.grid;
    const int n = g.n_nodes();
    const QuadCoef q = quad_coef(sys.coeffs, kind);
    const auto* reg = std::get_if<RegularizedEntropy>(&kind);
    const double gbar = sys.coeffs.gamma_bar;

    if (reg && gbar > 0.0) {
        for (int i = 0; i < n; ++i)
            if (1.0 - gbar * (s.r[i] + s.b[i]) <= 0.0)
                domain_violation("packing bound reached", i);
    }

    GridField density(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (int i = 0; i < n; ++i) {
        const double r = s.r[i], b = s.b[i];
        double val = reg ? xlogx_m1(r) + xlogx_m1(b) : xlogx(r) + xlogx(b);
        val += r * sys.Vr[i] + b * sys.Vb[i];
        val += 0.5 * (q.crr * r * r + 2.0 * q.crb * r * b + q.cbb * b * b);
        if (reg) {
            const double one_m = 1.0 - gbar * (r + b);
            val += reg->tau * one_m * (std::log(one_m) - 1.0);
        }
        density[i] = val;
    }
    return trapezoid(g, density);
}

EntropyVariables entropy_variables(const System& sys, const SystemState& s,
                                   const EntropyKind& kind) {
    const int n = sys.grid.n_nodes();
    const QuadCoef q = quad_coef(sys.coeffs, kind);
    const auto* reg = std::get_if<RegularizedEntropy>(&kind);
    const double gbar = sys.coeffs.gamma_bar;

    for (int i = 0; i < n; ++i) {
        if (s.r[i] <= 0.0 || s.b[i] <= 0.0) domain_violation("nonpositive density", i);
        if (reg && gbar > 0.0 && 1.0 - gbar * (s.r[i] + s.b[i]) <= 0.0)
            domain_violation("packing bound reached", i);
    }

    EntropyVariables out;
    out.kind = kind;
    out.u.resize(n);
    out.v.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (int i = 0; i < n; ++i) {
        const double r = s.r[i], b = s.b[i];
        double u = std::log(r) + q.crr * r + q.crb * b + sys.Vr[i];
        double v = std::log(b) + q.crb * r + q.cbb * b + sys.Vb[i];
        if (reg && gbar > 0.0) {
            const double barrier = -reg->tau * gbar * std::log(1.0 - gbar * (r + b));
            u += barrier;
            v += barrier;
        }
        out.u[i] = u;
        out.v[i] = v;
    }
    return out;
}

MatField entropy_hessian(const System& sys, const SystemState& s, const EntropyKind& kind) {
    const int n = sys.grid.n_nodes();
    const QuadCoef q = quad_coef(sys.coeffs, kind);
    const auto* reg = std::get_if<RegularizedEntropy>(&kind);
    const double gbar = sys.coeffs.gamma_bar;

    for (int i = 0; i < n; ++i) {
        if (s.r[i] <= 0.0 || s.b[i] <= 0.0) domain_violation("nonpositive density", i);
        if (reg && gbar > 0.0 && 1.0 - gbar * (s.r[i] + s.b[i]) <= 0.0)
            domain_violation("packing bound reached", i);
    }

    MatField h;
    h.m11.resize(n);
    h.m12.resize(n);
    h.m21.resize(n);
    h.m22.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (int i = 0; i < n; ++i) {
        const double r = s.r[i], b = s.b[i];
        double barrier = 0.0;
        if (reg && gbar > 0.0) barrier = reg->tau * gbar * gbar / (1.0 - gbar * (r + b));
        h.m11[i] = 1.0 / r + q.crr + barrier;
        h.m12[i] = q.crb + barrier;
        h.m21[i] = q.crb + barrier;
        h.m22[i] = 1.0 / b + q.cbb + barrier;
    }
    return h;
}

MatField dual_hessian(const System& sys, const SystemState& s, double tau) {
    return entropy_hessian(sys, s, RegularizedEntropy{tau});
}

double solve_density_fixed_point(double sum_exp, double gamma_bar, double tau_gamma) {
    if (gamma_bar <= 0.0 || tau_gamma == 0.0) return sum_exp;
    // F(z) = z - sum_exp (1 - gamma_bar z)^tau_gamma is increasing with
    // F(0) < 0 < F(1/gamma_bar); plain bisection is bit-stable. 48 halvings
    // put the bracket at ~4e-15 relative, beyond what the Newton polish of
    // the callers needs.
    double lo = 0.0, hi = 1.0 / gamma_bar;
    for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = mid - sum_exp * std::pow(1.0 - gamma_bar * mid, tau_gamma);
        (f < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct DualResidual {
    double fr, fb;
};

DualResidual dual_residual(double r, double b, double u, double v, double Vr, double Vb,
                           double abar, double gbar, double tau) {
    double barrier = 0.0;
    if (tau > 0.0 && gbar > 0.0) barrier = -tau * gbar * std::log(1.0 - gbar * (r + b));
    const double rho = r + b;
    return {std::log(r) + abar * rho + Vr + barrier - u,
            std::log(b) + abar * rho + Vb + barrier - v};
}

}  // namespace

std::array<double, 2> invert_entropy_gradient_node(double u, double v, double Vr, double Vb,
                                                   double alpha_bar, double gamma_bar,
                                                   double tau) {
    if (!std::isfinite(u) || !std::isfinite(v))
        throw DomainError("entropy gradient inversion: nonfinite dual values");
    const double tau_gamma = tau * gamma_bar;
    const bool barrier = tau > 0.0 && gamma_bar > 0.0;

    // Fixed-point warm start: strip the alpha_bar rho + V contributions, solve
    // the scalar packing equation for rho, rebuild (r, b).
    auto lift = [&](double z) { return barrier ? std::pow(1.0 - gamma_bar * z, tau_gamma) : 1.0; };
    double rho = 0.0, r = 0.0, b = 0.0;
    for (int pass = 0; pass < 8; ++pass) {
        const double x = std::min(u - Vr - alpha_bar * rho, 700.0);
        const double y = std::min(v - Vb - alpha_bar * rho, 700.0);
        const double z = solve_density_fixed_point(std::exp(x) + std::exp(y), gamma_bar, tau_gamma);
        const double f = lift(z);
        r = std::exp(x) * f;
        b = std::exp(y) * f;
        if (std::abs(z - rho) <= 1e-8 * (1.0 + z)) {
            rho = z;
            break;
        }
        rho = z;
    }

    // Damped Newton polish on the 2x2 system with the regularized Hessian.
    const double zmax = barrier ? 1.0 / gamma_bar : std::numeric_limits<double>::infinity();
    double res_norm = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
        const DualResidual res = dual_residual(r, b, u, v, Vr, Vb, alpha_bar, gamma_bar, tau);
        res_norm = std::max(std::abs(res.fr), std::abs(res.fb));
        if (res_norm <= 1e-12) return {r, b};

        double bar = 0.0;
        if (barrier) bar = tau * gamma_bar * gamma_bar / (1.0 - gamma_bar * (r + b));
        const Mat2 hess{1.0 / r + alpha_bar + bar, alpha_bar + bar, alpha_bar + bar,
                        1.0 / b + alpha_bar + bar};
        const auto step = hess.solve(-res.fr, -res.fb);

        double lam = 1.0;
        for (int halving = 0; halving < 60; ++halving) {
            const double rn = r + lam * step[0];
            const double bn = b + lam * step[1];
            if (rn > 0.0 && bn > 0.0 && rn + bn < zmax) {
                const DualResidual rs =
                    dual_residual(rn, bn, u, v, Vr, Vb, alpha_bar, gamma_bar, tau);
                if (std::max(std::abs(rs.fr), std::abs(rs.fb)) < res_norm) {
                    r = rn;
                    b = bn;
                    break;
                }
            }
            lam *= 0.5;
        }
    }
    const DualResidual res = dual_residual(r, b, u, v, Vr, Vb, alpha_bar, gamma_bar, tau);
    if (std::max(std::abs(res.fr), std::abs(res.fb)) <= 1e-10) return {r, b};
    throw SolverError("entropy gradient inversion stalled, residual " +
                      std::to_string(std::max(std::abs(res.fr), std::abs(res.fb))));
}

SystemState invert_entropy_gradient(const System& sys, const EntropyVariables& vars,
                                    double tau) {
    const int n = sys.grid.n_nodes();
    SystemState out;
    out.r.resize(n);
    out.b.resize(n);
    const double abar = sys.coeffs.alpha_bar;
    const double gbar = sys.coeffs.gamma_bar;
    int failed = -1;
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (int i = 0; i < n; ++i) {
        try {
            const auto rb = invert_entropy_gradient_node(vars.u[i], vars.v[i], sys.Vr[i],
                                                         sys.Vb[i], abar, gbar, tau);
            out.r[i] = rb[0];
            out.b[i] = rb[1];
        } catch (const std::exception&) {
#pragma omp critical
            failed = i;
            out.r[i] = out.b[i] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    if (failed >= 0)
        throw SolverError("entropy gradient inversion failed at node " + std::to_string(failed));
    return out;
}

}  // namespace crossdiff
