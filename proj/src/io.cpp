#include "crossdiff/io.hpp"

#include <cstdio>
#include <fstream>

#include "crossdiff/errors.hpp"

namespace crossdiff {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SolverError("cannot write '" + path + "'");
    return out;
}

}  // namespace

void write_state_csv(const std::string& path, const System& sys, const SystemState& s) {
    std::ofstream out = open_out(path);
    const GridField phi = local_volume_density(sys.params, s);
    out << "x,r,b,rho,phi\n";
    for (int i = 0; i < sys.grid.n_nodes(); ++i) {
        out << fmt17(sys.grid.node(i)) << ',' << fmt17(s.r[i]) << ',' << fmt17(s.b[i]) << ','
            << fmt17(s.r[i] + s.b[i]) << ',' << fmt17(phi[i]) << '\n';
    }
}

void write_trajectory_csv(const std::string& path, const Grid1D& grid,
                          const Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << "t,mass_r,mass_b,E,dissipation\n";
    for (const TrajectorySample& s : traj.samples) {
        out << fmt17(s.t) << ',' << fmt17(mass_r(grid, s.state)) << ','
            << fmt17(mass_b(grid, s.state)) << ',' << fmt17(s.report.E) << ','
            << fmt17(s.report.dissipation) << '\n';
    }
}

void write_sweep_csv(const std::string& path, const std::string& axis_name,
                     const std::vector<SweepRecord>& records) {
    std::ofstream out = open_out(path);
    out << axis_name
        << ",abs_err_r,abs_err_b,rel_err_r,rel_err_b,newton_iterations,newton_residual,"
           "mol_steps,mol_rhs_inf,mass_err_rel,ok,note\n";
    for (const SweepRecord& r : records) {
        out << fmt17(r.value) << ',' << fmt17(r.abs_err_r) << ',' << fmt17(r.abs_err_b) << ','
            << fmt17(r.rel_err_r) << ',' << fmt17(r.rel_err_b) << ',' << r.newton_iterations
            << ',' << fmt17(r.newton_residual) << ',' << r.mol_steps << ','
            << fmt17(r.mol_rhs_inf) << ',' << fmt17(r.mass_err_rel) << ',' << (r.ok ? 1 : 0)
            << ',' << r.note << '\n';
    }
}

void write_spectrum_csv(const std::string& path, const std::vector<double>& values) {
    std::ofstream out = open_out(path);
    out << "index,eigenvalue\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << i << ',' << fmt17(values[i]) << '\n';
}

void write_eigen_sweep_csv(const std::string& path,
                           const std::vector<std::pair<double, double>>& rows) {
    std::ofstream out = open_out(path);
    out << "epsilon,leading_eigenvalue\n";
    for (const auto& [eps, lambda] : rows)
        out << fmt17(eps) << ',' << fmt17(lambda) << '\n';
}

void emit_sweep_plot_script(const std::string& path, const std::string& csv_name,
                            bool loglog) {
    std::ofstream out = open_out(path);
    out << "#!/usr/bin/env python3\n"
           "\"\"\"Plot the sweep errors from the CSV next to this script.\"\"\"\n"
           "import csv\n"
           "import os\n"
           "\n"
           "import matplotlib.pyplot as plt\n"
           "\n"
           "here = os.path.dirname(os.path.abspath(__file__))\n"
           "rows = list(csv.DictReader(open(os.path.join(here, '"
        << csv_name
        << "'))))\n"
           "axis = list(rows[0].keys())[0]\n"
           "x = [float(r[axis]) for r in rows]\n"
           "fig, (ax_abs, ax_rel) = plt.subplots(1, 2, figsize=(10, 4))\n"
           "for key, label in [('abs_err_r', 'r'), ('abs_err_b', 'b')]:\n"
           "    ax_abs.plot(x, [float(r[key]) for r in rows], 'o-', label=label)\n"
           "for key, label in [('rel_err_r', 'r'), ('rel_err_b', 'b')]:\n"
           "    ax_rel.plot(x, [float(r[key]) for r in rows], 'o-', label=label)\n";
    if (loglog) {
        out << "ref = [x_i ** 4 * float(rows[-1]['abs_err_r']) / x[-1] ** 4 for x_i in x]\n"
               "ax_abs.plot(x, ref, 'k--', label='slope 4')\n"
               "for ax in (ax_abs, ax_rel):\n"
               "    ax.set_xscale('log')\n"
               "    ax.set_yscale('log')\n";
    }
    out << "ax_abs.set_xlabel(axis)\n"
           "ax_rel.set_xlabel(axis)\n"
           "ax_abs.set_ylabel('abs. error')\n"
           "ax_rel.set_ylabel('rel. error')\n"
           "ax_abs.legend()\n"
           "ax_rel.legend()\n"
           "fig.tight_layout()\n"
           "fig.savefig(os.path.join(here, '"
        << csv_name
        << ".png'), dpi=150)\n"
           "print('wrote "
        << csv_name << ".png')\n";
}

void emit_profile_plot_script(const std::string& path, const std::string& csv_name) {
    std::ofstream out = open_out(path);
    out << "#!/usr/bin/env python3\n"
           "\"\"\"Plot the density profiles from the CSV next to this script.\"\"\"\n"
           "import csv\n"
           "import os\n"
           "\n"
           "import matplotlib.pyplot as plt\n"
           "\n"
           "here = os.path.dirname(os.path.abspath(__file__))\n"
           "rows = list(csv.DictReader(open(os.path.join(here, '"
        << csv_name
        << "'))))\n"
           "x = [float(r['x']) for r in rows]\n"
           "plt.plot(x, [float(r['r']) for r in rows], label='r')\n"
           "plt.plot(x, [float(r['b']) for r in rows], label='b')\n"
           "plt.xlabel('x')\n"
           "plt.ylabel('density')\n"
           "plt.legend()\n"
           "plt.tight_layout()\n"
           "plt.savefig(os.path.join(here, '"
        << csv_name
        << ".png'), dpi=150)\n"
           "print('wrote "
        << csv_name << ".png')\n";
}

}  // namespace crossdiff
