#include "crossdiff/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>

#include "crossdiff/errors.hpp"
#include "crossdiff/io.hpp"
#include "crossdiff/manifest.hpp"
#include "crossdiff/stability.hpp"

namespace crossdiff {

namespace {

System build_system(const RunConfig& cfg, double eps_ref_override = 0.0) {
    if (eps_ref_override > 0.0)
        return System::build(cfg.grid, cfg.model, eps_ref_override);
    return System::build(cfg.grid, cfg.model);
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw SolverError("cannot create output directory '" + dir + "'");
}

int run_guarded(const char* name, const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << name << ": configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << name << ": " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int cmd_equilibrium(const RunConfig& cfg, const CommandOptions& opts) {
    return run_guarded("equilibrium", [&] {
        const System sys = build_system(cfg, cfg.equilibrium.eps_ref);
        ManifestWriter manifest("equilibrium", opts.out_dir);
        manifest.set_config_echo(cfg.echo);
        manifest.set_tolerance("newton_tol", cfg.equilibrium.tol);

        const StationaryResult res =
            solve_entropy_stationary(sys, cfg.equilibrium.tol, cfg.equilibrium.max_iter);
        ensure_out_dir(opts.out_dir);

        SystemState s;
        s.r = res.r;
        s.b = res.b;
        write_state_csv(opts.out_dir + "/equilibrium.csv", sys, s);
        emit_profile_plot_script(opts.out_dir + "/plot_equilibrium.py", "equilibrium.csv");
        manifest.add_output("equilibrium.csv");
        manifest.add_output("plot_equilibrium.py");
        manifest.set_stat("newton_iterations", res.iterations);
        manifest.set_stat("residual_norm", res.residual_norm);
        manifest.set_stat("chi_r", res.chi_r);
        manifest.set_stat("chi_b", res.chi_b);
        manifest.set_stat("mass_r", trapezoid(sys.grid, res.r));
        manifest.set_stat("mass_b", trapezoid(sys.grid, res.b));
        manifest.write();
        std::cout << "equilibrium: converged in " << res.iterations
                  << " iterations, residual " << fmt17(res.residual_norm) << '\n';
    });
}

int cmd_evolve(const RunConfig& cfg, const CommandOptions& opts) {
    return run_guarded("evolve", [&] {
        const System sys = build_system(cfg);
        EvolveConfig ev = cfg.evolve;
        if (!opts.stepper_override.empty()) {
            if (opts.stepper_override != "mol" && opts.stepper_override != "regularized")
                throw ConfigError("evolve: --stepper must be 'mol' or 'regularized'");
            ev.stepper = opts.stepper_override;
        }

        SystemState initial = ev.initial == "uniform"
                                  ? uniform_state(sys.grid, sys.params.N_r / sys.grid.length(),
                                                  sys.params.N_b / sys.grid.length())
                                  : equilibrium_pointparticle(sys);

        ManifestWriter manifest("evolve", opts.out_dir);
        manifest.set_config_echo(cfg.echo);
        manifest.set_note("stepper", ev.stepper);
        ensure_out_dir(opts.out_dir);

        Trajectory traj;
        if (ev.stepper == "mol") {
            MolOptions mol;
            mol.rtol = ev.rtol;
            mol.atol = ev.atol;
            if (ev.stop_at_stationary)
                mol.stationary_rhs_inf =
                    1e-10 * std::max(sys.params.N_r, sys.params.N_b);
            manifest.set_tolerance("rtol", ev.rtol);
            manifest.set_tolerance("atol", ev.atol);
            traj = integrate_mol(sys, initial, ev.t_end, mol);
        } else {
            if (!sys.coeffs.symmetric)
                throw ConfigError(
                    "evolve: the regularized stepper needs equal sizes and diffusivities");
            RegularizedStepConfig rc;
            rc.tau = ev.tau;
            manifest.set_tolerance("tau", ev.tau);
            manifest.set_tolerance("newton_tol", rc.newton_tol);
            SystemState state = initial;
            const EntropyKind kind{RegularizedEntropy{ev.tau}};
            TrajectorySample s0;
            s0.t = state.t;
            s0.state = state;
            s0.report = entropy_dissipation_report(sys, state, kind);
            traj.samples.push_back(std::move(s0));
            for (int k = 0; k < ev.steps; ++k) {
                state = step_regularized_euler(sys, state, rc);
                TrajectorySample samp;
                samp.t = state.t;
                samp.state = state;
                samp.report = entropy_dissipation_report(sys, state, kind);
                traj.samples.push_back(std::move(samp));
            }
            traj.final_state = state;
            traj.final_rhs_inf = rhs_inf_norm(sys, state);
        }

        write_trajectory_csv(opts.out_dir + "/trajectory.csv", sys.grid, traj);
        write_state_csv(opts.out_dir + "/final_state.csv", sys, traj.final_state);
        emit_profile_plot_script(opts.out_dir + "/plot_final_state.py", "final_state.csv");
        manifest.add_output("trajectory.csv");
        manifest.add_output("final_state.csv");
        manifest.add_output("plot_final_state.py");

        if (ev.snapshot_stride > 0) {
            int count = 0;
            for (std::size_t i = 0; i < traj.samples.size();
                 i += static_cast<std::size_t>(ev.snapshot_stride)) {
                char name[64];
                std::snprintf(name, sizeof(name), "snapshot_%04d.csv", count++);
                write_state_csv(opts.out_dir + "/" + name, sys, traj.samples[i].state);
                manifest.add_output(name);
            }
        }

        manifest.set_stat("steps_accepted", traj.stats.accepted);
        manifest.set_stat("steps_rejected", traj.stats.rejected);
        manifest.set_stat("newton_iterations", traj.stats.newton_iterations);
        manifest.set_stat("final_rhs_inf", traj.final_rhs_inf);
        manifest.set_stat("reached_stationary", traj.reached_stationary ? 1.0 : 0.0);
        manifest.set_stat("mass_r_final", mass_r(sys.grid, traj.final_state));
        manifest.set_stat("mass_b_final", mass_b(sys.grid, traj.final_state));
        manifest.write();
        std::cout << "evolve: t = " << fmt17(traj.final_state.t) << ", ||rhs||_inf = "
                  << fmt17(traj.final_rhs_inf)
                  << (traj.reached_stationary ? " (stationary)" : "") << '\n';
    });
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opts) {
    return run_guarded("sweep", [&] {
        if (cfg.sweep.values.empty())
            throw ConfigError("sweep: [sweep] values must list at least one point");
        const SweepAxis axis =
            cfg.sweep.axis == "epsilon" ? SweepAxis::Epsilon : SweepAxis::ThetaR;

        SweepOptions so;
        so.newton_tol = cfg.sweep.newton_tol;
        so.newton_max_iter = cfg.sweep.newton_max_iter;
        so.longtime.t_max = cfg.sweep.t_max;
        so.jobs = opts.jobs;

        ManifestWriter manifest("sweep", opts.out_dir);
        manifest.set_config_echo(cfg.echo);
        manifest.set_tolerance("newton_tol", so.newton_tol);
        ensure_out_dir(opts.out_dir);

        const std::vector<SweepRecord> records =
            sweep(cfg.model, cfg.grid, axis, cfg.sweep.values, so);

        const bool loglog = axis == SweepAxis::Epsilon;
        write_sweep_csv(opts.out_dir + "/sweep.csv", cfg.sweep.axis, records);
        emit_sweep_plot_script(opts.out_dir + "/plot_sweep.py", "sweep.csv", loglog);
        manifest.add_output("sweep.csv");
        manifest.add_output("plot_sweep.py");

        int failures = 0;
        for (const SweepRecord& r : records)
            if (!r.ok) ++failures;
        manifest.set_stat("points", static_cast<double>(records.size()));
        manifest.set_stat("failed_points", failures);

        if (loglog) {
            std::vector<double> lx, ly;
            for (const SweepRecord& r : records)
                if (r.ok && r.abs_err_r > 0.0) {
                    lx.push_back(std::log(r.value));
                    ly.push_back(std::log(r.abs_err_r));
                }
            if (lx.size() >= 2) {
                const double slope = fit_slope(lx, ly);
                manifest.set_stat("abs_err_r_loglog_slope", slope);
                std::cout << "sweep: log-log slope of abs_err_r vs epsilon = "
                          << fmt17(slope) << '\n';
            }
        }
        manifest.write();
        std::cout << "sweep: " << records.size() - failures << "/" << records.size()
                  << " points completed\n";
        if (failures > 0) throw SolverError(std::to_string(failures) + " sweep points failed");
    });
}

int cmd_stability(const RunConfig& cfg, const CommandOptions& opts) {
    return run_guarded("stability", [&] {
        const System sys = build_system(cfg);
        ManifestWriter manifest("stability", opts.out_dir);
        manifest.set_config_echo(cfg.echo);
        ensure_out_dir(opts.out_dir);

        LongtimeOptions lt;
        const LongtimeResult lr = equilibrate_longtime(sys, lt);
        const LinearizedOperators ops =
            assemble_linearization(sys, lr.state, cfg.stability.perturbed);
        const SpectrumSummary sum = spectrum(ops, cfg.stability.k);

        write_spectrum_csv(opts.out_dir + "/spectrum.csv", sum.values);
        manifest.add_output("spectrum.csv");
        manifest.set_stat("null_count", sum.null_count);
        manifest.set_stat("leading_nonzero", sum.leading_nonzero);

        if (cfg.stability.perturbed) {
            const auto pvals = spectrum_perturbed(ops);
            double leading = 0.0;
            const double null_tol = 1e-8 * sum.max_abs;
            for (const auto& z : pvals)
                if (std::abs(z.real()) > null_tol) {
                    leading = z.real();
                    break;
                }
            manifest.set_stat("leading_nonzero_perturbed", leading);
        }

        if (!cfg.stability.eps_values.empty()) {
            std::vector<std::pair<double, double>> rows;
            for (double eps : cfg.stability.eps_values) {
                ModelParams p = apply_sweep_value(cfg.model, SweepAxis::Epsilon, eps);
                const System sys_eps = System::build(cfg.grid, p);
                const LongtimeResult lre = equilibrate_longtime(sys_eps, lt);
                const LinearizedOperators oe = assemble_linearization(sys_eps, lre.state, false);
                rows.emplace_back(eps, spectrum(oe, 0).leading_nonzero);
            }
            write_eigen_sweep_csv(opts.out_dir + "/leading_eigenvalue.csv", rows);
            manifest.add_output("leading_eigenvalue.csv");
        }

        const bool stable = sum.leading_nonzero < 0.0;
        manifest.set_note("verdict", stable ? "stable" : "unstable");
        manifest.write();
        std::cout << "stability: " << (stable ? "stable" : "unstable")
                  << " (leading nonzero eigenvalue " << fmt17(sum.leading_nonzero)
                  << ", null directions " << sum.null_count << ")\n";
    });
}

}  // namespace crossdiff
