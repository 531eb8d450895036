#include "crossdiff/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crossdiff/errors.hpp"
#include "crossdiff/linalg.hpp"

namespace crossdiff {

namespace {

MobilityKind mobility_kind_for(const EntropyKind& kind) {
    if (std::holds_alternative<GeneralEntropy>(kind) ||
        std::holds_alternative<ExpansionEntropy>(kind))
        return MobilityKind{GeneralMobility{}};
    return MobilityKind{SymmetricMobility{}};
}

double entropy_tau(const EntropyKind& kind) {
    const auto* reg = std::get_if<RegularizedEntropy>(&kind);
    return reg ? reg->tau : 0.0;
}

// Face-mean of the nodal mobility entries (the flux-assembly convention).
Mat2 face_mean(const MatField& m, int f) {
    return {0.5 * (m.m11[f] + m.m11[f + 1]), 0.5 * (m.m12[f] + m.m12[f + 1]),
            0.5 * (m.m21[f] + m.m21[f + 1]), 0.5 * (m.m22[f] + m.m22[f + 1])};
}

double quad_form(const Mat2& m, double x, double y) {
    return m.a11 * x * x + (m.a12 + m.a21) * x * y + m.a22 * y * y;
}

}  // namespace

EntropyReport entropy_dissipation_report(const System& sys, const SystemState& s,
                                         const EntropyKind& kind) {
    const Grid1D& g = sys.grid;
    const int nf = g.n_faces();
    const double h = g.h();
    const double inv_h = 1.0 / h;
    const Coefficients& c = sys.coeffs;
    const double gbar = c.gamma_bar;
    const double tau = entropy_tau(kind);
    const bool general = std::holds_alternative<GeneralEntropy>(kind) ||
                         std::holds_alternative<ExpansionEntropy>(kind);

    EntropyReport rep;
    rep.E = entropy_value(sys, s, kind);
    EntropyVariables vars = entropy_variables(sys, s, kind);
    const MatField m = mobility(s, c, mobility_kind_for(kind));

    double diss = 0.0, diss_chain = 0.0;
    double d0_sr = 0.0, d0_sb = 0.0, d0_rho = 0.0, d0_tau = 0.0, pot = 0.0;
    for (int f = 0; f < nf; ++f) {
        const double du = (vars.u[f + 1] - vars.u[f]) * inv_h;
        const double dv = (vars.v[f + 1] - vars.v[f]) * inv_h;
        diss += h * quad_form(face_mean(m, f), du, dv);

        const double rm = 0.5 * (s.r[f] + s.r[f + 1]);
        const double bm = 0.5 * (s.b[f] + s.b[f + 1]);
        const double dr = (s.r[f + 1] - s.r[f]) * inv_h;
        const double db = (s.b[f + 1] - s.b[f]) * inv_h;
        const double rho = rm + bm;
        const double drho = dr + db;
        const double one_m = 1.0 - gbar * rho;

        // Chain-rule dual gradients at the face state; pointwise algebra makes
        // the dissipation inequality exact face by face.
        double du_c, dv_c;
        if (general) {
            du_c = dr / rm + sys.dVr + c.alpha * (c.eps_rd * dr + c.eps_brd * db);
            dv_c = db / bm + sys.dVb + c.alpha * (c.eps_bd * db + c.eps_brd * dr);
        } else {
            const double kappa =
                c.alpha_bar + (tau > 0.0 && gbar > 0.0 ? tau * gbar * gbar / one_m : 0.0);
            du_c = dr / rm + kappa * drho + sys.dVr;
            dv_c = db / bm + kappa * drho + sys.dVb;
        }
        const Mat2 mf = mobility_at(rm, bm, c, mobility_kind_for(kind));
        diss_chain += h * quad_form(mf, du_c, dv_c);

        d0_sr += h * 2.0 * one_m * dr * dr / (4.0 * rm);
        d0_sb += h * 2.0 * one_m * db * db / (4.0 * bm);
        d0_rho += h * 0.5 * gbar * drho * drho;
        if (tau > 0.0 && gbar > 0.0) {
            const double g5 = gbar * gbar * gbar * gbar * gbar;
            d0_tau += h * 0.5 * tau * tau * g5 * rho * rho / (one_m * one_m) * drho * drho;
        }
        pot += h * (one_m * (rm * sys.dVr * sys.dVr + bm * sys.dVb * sys.dVb) +
                    gbar * (rm * sys.dVr + bm * sys.dVb) * (rm * sys.dVr + bm * sys.dVb));
    }
    rep.dissipation = diss;
    rep.dissipation_chain = diss_chain;
    rep.d0_sqrt_r = d0_sr;
    rep.d0_sqrt_b = d0_sb;
    rep.d0_rho = d0_rho;
    rep.d0_tau = d0_tau;
    rep.d0 = d0_sr + d0_sb + d0_rho + d0_tau;
    rep.potential_bound = pot;
    rep.u = std::move(vars.u);
    rep.v = std::move(vars.v);
    return rep;
}

// ---------------------------------------------------------------------------
// Variable-step BDF1/BDF2 driver.
// ---------------------------------------------------------------------------

namespace {

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;
constexpr int kBandHalf = 3;  // interleaved two-species three-point stencil

class MolDriver {
  public:
    MolDriver(const System& sys, const SystemState& y0, double t_end, const MolOptions& opts)
        : sys_(sys), opts_(opts), n_(sys.grid.n_nodes()), N_(2 * n_),
          t_(y0.t), t_end_(t_end), W_(N_, kBandHalf, kBandHalf), scratch_(y0) {
        y_ = pack(y0);
        mass_r0_ = mass_r(sys.grid, y0);
        mass_b0_ = mass_b(sys.grid, y0);
        kind_ = sys.coeffs.symmetric ? EntropyKind{SymmetricEntropy{}}
                                     : EntropyKind{GeneralEntropy{}};
    }

    Trajectory run();

  private:
    std::vector<double> pack(const SystemState& s) const {
        std::vector<double> y(N_);
        for (int i = 0; i < n_; ++i) {
            y[2 * i] = s.r[i];
            y[2 * i + 1] = s.b[i];
        }
        return y;
    }
    SystemState& unpack(const std::vector<double>& y, double t) {
        scratch_.t = t;
        for (int i = 0; i < n_; ++i) {
            scratch_.r[i] = y[2 * i];
            scratch_.b[i] = y[2 * i + 1];
        }
        return scratch_;
    }

    void eval_rhs(const std::vector<double>& y, std::vector<double>& f) {
        rhs_into(sys_, unpack(y, t_), f.data());
        ++stats_.rhs_evaluations;
    }

    double wrms(const std::vector<double>& e, const std::vector<double>& yref) const {
        double acc = 0.0;
        for (int i = 0; i < N_; ++i) {
            const double w = opts_.atol + opts_.rtol * std::abs(yref[i]);
            const double q = e[i] / w;
            acc += q * q;
        }
        return std::sqrt(acc / N_);
    }

    double inf_norm(const std::vector<double>& v) const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }

    // W = I - h*beta*J at base point; colored finite differences, 7 colors.
    void build_matrix(const std::vector<double>& ybase, double hbeta) {
        std::vector<double> f0(N_), fp(N_), yp(N_);
        eval_rhs(ybase, f0);
        W_.zero();
        double yscale = inf_norm(ybase);
        const int ncolor = 2 * kBandHalf + 1;
        for (int color = 0; color < ncolor; ++color) {
            yp = ybase;
            for (int j = color; j < N_; j += ncolor)
                yp[j] += fd_delta(ybase[j], yscale);
            eval_rhs(yp, fp);
            for (int j = color; j < N_; j += ncolor) {
                const double delta = fd_delta(ybase[j], yscale);
                const int ilo = std::max(0, j - kBandHalf);
                const int ihi = std::min(N_ - 1, j + kBandHalf);
                for (int i = ilo; i <= ihi; ++i)
                    W_.at(i, j) = -hbeta * (fp[i] - f0[i]) / delta;
            }
        }
        for (int i = 0; i < N_; ++i) W_.at(i, i) += 1.0;
        W_.factor();
        ++stats_.jacobian_builds;
    }

    static double fd_delta(double yj, double yscale) {
        return 1.4901161193847656e-08 * (std::abs(yj) + 1e-3 * yscale + 1e-300);
    }

    // Solves Y - data = hbeta f(Y). Returns true on convergence.
    bool newton_solve(const std::vector<double>& data, double hbeta, std::vector<double>& Y) {
        std::vector<double> G(N_), f(N_);
        double prev_update = std::numeric_limits<double>::infinity();
        for (int rebuild = 0; rebuild < 2; ++rebuild) {
            for (int it = 0; it < 10; ++it) {
                eval_rhs(Y, f);
                for (int i = 0; i < N_; ++i) G[i] = -(Y[i] - data[i] - hbeta * f[i]);
                W_.solve(G);  // G becomes the update
                ++stats_.newton_iterations;
                double upd = wrms(G, Y);
                if (!std::isfinite(upd)) break;
                for (int i = 0; i < N_; ++i) Y[i] += G[i];
                if (upd <= 1e-6) return true;
                if (it > 3 && upd > 0.9 * prev_update) break;  // stalling
                prev_update = upd;
            }
            if (rebuild == 0) build_matrix(Y, hbeta);  // fresh Jacobian, retry
            prev_update = std::numeric_limits<double>::infinity();
        }
        return false;
    }

    void check_admissible(const std::vector<double>& y) const {
        const Coefficients& c = sys_.coeffs;
        for (int i = 0; i < n_; ++i) {
            const double r = y[2 * i], b = y[2 * i + 1];
            if (!(r > 0.0) || !(b > 0.0))
                throw SolverError("state left the admissible set (density <= 0 at node " +
                                  std::to_string(i) + ", t = " + std::to_string(t_) + ")");
            if (c.gamma_bar > 0.0 && 1.0 - c.gamma_bar * (r + b) <= 1e-12)
                throw SolverError("state left the admissible set (packing bound at node " +
                                  std::to_string(i) + ", t = " + std::to_string(t_) + ")");
        }
    }

    const System& sys_;
    MolOptions opts_;
    int n_, N_;
    double t_, t_end_;
    BandedMatrix W_;
    SystemState scratch_;
    std::vector<double> y_;
    double mass_r0_ = 0.0, mass_b0_ = 0.0;
    EntropyKind kind_{SymmetricEntropy{}};
    StepStats stats_;
};

Trajectory MolDriver::run() {
    Trajectory traj;
    if (!(t_end_ > t_)) throw ConfigError("integrate_mol: t_end must exceed the initial time");

    std::vector<double> f0(N_);
    eval_rhs(y_, f0);

    // History ring: order >= 1 needs (t_n, y_n); the second-order error
    // estimate needs two more levels.
    std::vector<double> y_nm1, y_nm2;
    double h_nm1 = 0.0, h_nm2 = 0.0;

    auto record = [&](double rhs_inf) {
        if (!opts_.record_trajectory) return;
        TrajectorySample sample;
        sample.t = t_;
        sample.state = unpack(y_, t_);
        sample.report = entropy_dissipation_report(sys_, sample.state, kind_);
        traj.samples.push_back(std::move(sample));
        traj.final_rhs_inf = rhs_inf;
    };
    record(inf_norm(f0));

    double h;
    if (opts_.fixed_dt > 0.0)
        h = opts_.fixed_dt;
    else if (opts_.dt_init > 0.0)
        h = opts_.dt_init;
    else {
        const double scale = std::max(inf_norm(y_), 1.0);
        h = 0.01 * scale / (inf_norm(f0) + 1e-30);
        h = std::min(h, 0.1 * (t_end_ - t_));
    }
    if (opts_.dt_max > 0.0) h = std::min(h, opts_.dt_max);

    double est_prev = 1.0;
    int rejects_in_row = 0;
    while (t_ < t_end_ && stats_.accepted < opts_.max_steps) {
        if (rejects_in_row > 40)
            throw SolverError("integrate_mol: persistent step rejections at t = " +
                              std::to_string(t_));
        h = std::min(h, t_end_ - t_);
        const int order = (stats_.accepted >= 2 && opts_.max_order >= 2) ? 2 : 1;

        // Predictor and BDF data for this attempt.
        std::vector<double> data(N_), pred(N_);
        double beta;
        if (order == 1) {
            data = y_;
            beta = 1.0;
            if (h_nm1 > 0.0) {
                const double rho = h / h_nm1;
                for (int i = 0; i < N_; ++i)
                    pred[i] = y_[i] + rho * (y_[i] - y_nm1[i]);
            } else {
                for (int i = 0; i < N_; ++i) pred[i] = y_[i] + h * f0[i];
            }
        } else {
            const double w = h / h_nm1;
            const double c1 = (1.0 + w) * (1.0 + w) / (1.0 + 2.0 * w);
            const double c2 = -w * w / (1.0 + 2.0 * w);
            beta = (1.0 + w) / (1.0 + 2.0 * w);
            for (int i = 0; i < N_; ++i) data[i] = c1 * y_[i] + c2 * y_nm1[i];
            // Quadratic extrapolation through the last three accepted states.
            const double t1 = h, t2 = h + h_nm1, t3 = h + h_nm1 + h_nm2;
            const double l1 = (t2 * t3) / ((t2 - t1) * (t3 - t1));
            const double l2 = (t1 * t3) / ((t1 - t2) * (t3 - t2));
            const double l3 = (t1 * t2) / ((t1 - t3) * (t2 - t3));
            for (int i = 0; i < N_; ++i)
                pred[i] = l1 * y_[i] + l2 * y_nm1[i] + l3 * y_nm2[i];
        }

        std::vector<double> Y = pred;
        build_matrix(pred, h * beta);
        bool converged = newton_solve(data, h * beta, Y);
        if (!converged) {
            ++stats_.rejected;
            ++rejects_in_row;
            h *= 0.25;
            if (h < opts_.dt_min)
                throw SolverError("time step underflow after Newton failures at t = " +
                                  std::to_string(t_));
            continue;
        }

        double est = 0.0;
        if (opts_.fixed_dt <= 0.0) {
            std::vector<double> T(N_);
            for (int i = 0; i < N_; ++i) T[i] = Y[i] - pred[i];
            double coef;
            if (order == 1) {
                coef = (h_nm1 > 0.0) ? h / (h + h_nm1) : 0.5;
            } else {
                const double w = h / h_nm1;
                coef = h * h * (1.0 + w) * (1.0 + w) /
                       (w * (1.0 + 2.0 * w) * (h + h_nm1) * (h + h_nm1 + h_nm2));
            }
            est = coef * wrms(T, y_);
            if (!(est <= 1.0)) {
                ++stats_.rejected;
                ++rejects_in_row;
                const double fac =
                    std::max(kFacMin, kSafety * std::pow(est, -1.0 / (order + 1)));
                h = std::max(h * fac, opts_.dt_min);
                continue;
            }
        }

        // Accept.
        rejects_in_row = 0;
        y_nm2 = std::move(y_nm1);
        h_nm2 = h_nm1;
        y_nm1 = y_;
        h_nm1 = h;
        y_ = Y;
        t_ += h;
        ++stats_.accepted;

        if (opts_.project_masses) {
            SystemState& s = unpack(y_, t_);
            const double mr = mass_r(sys_.grid, s);
            const double mb = mass_b(sys_.grid, s);
            if (mr > 0.0 && mb > 0.0) {
                const double cr = mass_r0_ / mr, cb = mass_b0_ / mb;
                for (int i = 0; i < n_; ++i) {
                    y_[2 * i] *= cr;
                    y_[2 * i + 1] *= cb;
                }
            }
        }

        check_admissible(y_);
        eval_rhs(y_, f0);
        const double rhs_inf = inf_norm(f0);
        record(rhs_inf);
        traj.final_rhs_inf = rhs_inf;

        if (opts_.stationary_rhs_inf > 0.0 && rhs_inf <= opts_.stationary_rhs_inf) {
            traj.reached_stationary = true;
            break;
        }

        if (opts_.fixed_dt <= 0.0) {
            const double k = order + 1;
            const double e = std::max(est, 1e-10);
            double fac = kSafety * std::pow(e, -0.7 / k) * std::pow(est_prev, 0.4 / k);
            fac = std::clamp(fac, kFacMin, kFacMax);
            est_prev = e;
            h *= fac;
            if (opts_.dt_max > 0.0) h = std::min(h, opts_.dt_max);
        }
    }

    if (!traj.reached_stationary && t_ < t_end_ && stats_.accepted >= opts_.max_steps)
        throw SolverError("integrate_mol: step budget exhausted at t = " + std::to_string(t_));

    traj.final_state = unpack(y_, t_);
    traj.stats = stats_;
    return traj;
}

}  // namespace

Trajectory integrate_mol(const System& sys, const SystemState& y0, double t_end,
                         const MolOptions& opts) {
    if (opts.max_order < 1 || opts.max_order > 2)
        throw ConfigError("integrate_mol: max_order must be 1 or 2");
    MolDriver driver(sys, y0, t_end, opts);
    return driver.run();
}

// ---------------------------------------------------------------------------
// Entropy-variable implicit Euler with tau-regularization.
// ---------------------------------------------------------------------------

SystemState step_regularized_euler(const System& sys, const SystemState& prev,
                                   const RegularizedStepConfig& cfg) {
    if (!sys.coeffs.symmetric)
        throw ConfigError("regularized step requires equal sizes and diffusivities");
    if (!(cfg.tau > 0.0)) throw ConfigError("regularized step: tau must be positive");

    const Grid1D& g = sys.grid;
    const int n = g.n_nodes();
    const int N = 2 * n;
    const double inv_h = 1.0 / g.h();

    // Residual in the dual unknowns; the state recovery keeps every iterate
    // interior to the admissible set.
    auto eval = [&](const std::vector<double>& z, std::vector<double>& res,
                    SystemState* state_out) {
        SystemState s;
        s.r.resize(n);
        s.b.resize(n);
        for (int i = 0; i < n; ++i) {
            const auto rb = invert_entropy_gradient_node(z[2 * i], z[2 * i + 1], sys.Vr[i],
                                                         sys.Vb[i], sys.coeffs.alpha_bar,
                                                         sys.coeffs.gamma_bar, cfg.tau);
            s.r[i] = rb[0];
            s.b[i] = rb[1];
        }
        const MatField m = mobility(s, sys.coeffs, SymmetricMobility{});
        res.assign(N, 0.0);
        for (int i = 0; i < n; ++i) {
            res[2 * i] = (s.r[i] - prev.r[i]) / cfg.tau + cfg.tau * z[2 * i];
            res[2 * i + 1] = (s.b[i] - prev.b[i]) / cfg.tau + cfg.tau * z[2 * i + 1];
        }
        // res_i -= (J_f(i) - J_f(i-1))/w_i: each face flux scatters with a
        // minus to its left node and a plus to its right node.
        for (int f = 0; f < g.n_faces(); ++f) {
            const double du = (z[2 * (f + 1)] - z[2 * f]) * inv_h;
            const double dv = (z[2 * (f + 1) + 1] - z[2 * f + 1]) * inv_h;
            const auto j = face_mean(m, f).apply(du, dv);
            const double jr = j[0] + cfg.tau * du;
            const double jb = j[1] + cfg.tau * dv;
            res[2 * f] -= jr / g.weight(f);
            res[2 * f + 1] -= jb / g.weight(f);
            res[2 * (f + 1)] += jr / g.weight(f + 1);
            res[2 * (f + 1) + 1] += jb / g.weight(f + 1);
        }
        if (state_out) *state_out = std::move(s);
    };

    std::vector<double> z(N);
    {
        const EntropyVariables vars =
            entropy_variables(sys, prev, RegularizedEntropy{cfg.tau});
        for (int i = 0; i < n; ++i) {
            z[2 * i] = vars.u[i];
            z[2 * i + 1] = vars.v[i];
        }
    }

    const double res_scale = 1.0 + linf_norm(prev.r) / cfg.tau + linf_norm(prev.b) / cfg.tau;
    std::vector<double> res(N), dz(N), ztrial(N), res_trial(N);
    eval(z, res, nullptr);
    double res_norm = linf_norm(res);

    BandedMatrix W(N, kBandHalf, kBandHalf);
    bool have_jacobian = false;
    bool fresh = false;  // Jacobian was built at the current iterate
    for (int it = 0; it < cfg.max_newton; ++it) {
        if (res_norm <= cfg.newton_tol * res_scale) break;

        if (!have_jacobian) {
            // Colored finite-difference Jacobian of the dual residual; reused
            // across iterations while full steps keep contracting.
            W.zero();
            const int ncolor = 2 * kBandHalf + 1;
            const double zscale = linf_norm(z);
            for (int color = 0; color < ncolor; ++color) {
                ztrial = z;
                for (int j = color; j < N; j += ncolor)
                    ztrial[j] +=
                        1.4901161193847656e-08 * (std::abs(z[j]) + 1e-3 * zscale + 1e-12);
                eval(ztrial, res_trial, nullptr);
                for (int j = color; j < N; j += ncolor) {
                    const double delta =
                        1.4901161193847656e-08 * (std::abs(z[j]) + 1e-3 * zscale + 1e-12);
                    const int ilo = std::max(0, j - kBandHalf);
                    const int ihi = std::min(N - 1, j + kBandHalf);
                    for (int i = ilo; i <= ihi; ++i)
                        W.at(i, j) = (res_trial[i] - res[i]) / delta;
                }
            }
            W.factor();
            have_jacobian = true;
            fresh = true;
        }
        dz = res;
        for (double& x : dz) x = -x;
        W.solve(dz);

        double lam = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving) {
            for (int i = 0; i < N; ++i) ztrial[i] = z[i] + lam * dz[i];
            eval(ztrial, res_trial, nullptr);
            const double trial_norm = linf_norm(res_trial);
            if (std::isfinite(trial_norm) && trial_norm < res_norm) {
                const bool slow = lam < 1.0 || trial_norm > 0.25 * res_norm;
                z = ztrial;
                res = res_trial;
                res_norm = trial_norm;
                improved = true;
                fresh = false;
                if (slow) have_jacobian = false;  // refresh next pass
                break;
            }
            lam *= 0.5;
        }
        if (!improved) {
            if (!fresh) {
                have_jacobian = false;  // stale Jacobian; rebuild and retry
                continue;
            }
            throw SolverError(
                "regularized step: Newton stalled (residual " + std::to_string(res_norm) +
                "); a smaller tau should help");
        }
    }
    if (!(res_norm <= cfg.newton_tol * res_scale))
        throw SolverError("regularized step: no convergence in " +
                          std::to_string(cfg.max_newton) + " iterations (residual " +
                          std::to_string(res_norm) + "); a smaller tau should help");

    SystemState next;
    eval(z, res, &next);
    next.t = prev.t + cfg.tau;
    return next;
}

RegularizedStepCheck check_regularized_step(const System& sys, const SystemState& prev,
                                            const SystemState& next,
                                            const RegularizedStepConfig& cfg) {
    const Grid1D& g = sys.grid;
    const double inv_h = 1.0 / g.h();
    const EntropyKind kind{RegularizedEntropy{cfg.tau}};

    RegularizedStepCheck chk;
    chk.h_prev = entropy_value(sys, prev, kind);
    chk.h_next = entropy_value(sys, next, kind);

    const EntropyVariables vars = entropy_variables(sys, next, kind);
    const MatField m = mobility(next, sys.coeffs, SymmetricMobility{});
    double quad = 0.0, grad_h1 = 0.0;
    for (int f = 0; f < g.n_faces(); ++f) {
        const double du = (vars.u[f + 1] - vars.u[f]) * inv_h;
        const double dv = (vars.v[f + 1] - vars.v[f]) * inv_h;
        quad += g.h() * quad_form(face_mean(m, f), du, dv);
        grad_h1 += g.h() * (du * du + dv * dv);
    }
    chk.quadform = quad;

    GridField usq(g.n_nodes()), vsq(g.n_nodes());
    for (int i = 0; i < g.n_nodes(); ++i) {
        usq[i] = vars.u[i] * vars.u[i];
        vsq[i] = vars.v[i] * vars.v[i];
    }
    chk.h1_term = trapezoid(g, usq) + trapezoid(g, vsq) + grad_h1;
    chk.mass_shift_r = -cfg.tau * cfg.tau * trapezoid(g, vars.u);
    chk.mass_shift_b = -cfg.tau * cfg.tau * trapezoid(g, vars.v);
    return chk;
}

}  // namespace crossdiff
