// Kernel benchmark: production kernels at one thread versus all threads, with
// the serial reference implementations as a baseline column.

#include <chrono>
#include <cstdio>
#include <random>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "crossdiff/discretization.hpp"
#include "crossdiff/reference.hpp"

using namespace crossdiff;

namespace {

double seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int k = 0; k < reps; ++k) {
        const double t0 = seconds();
        f();
        best = std::min(best, seconds() - t0);
    }
    return best;
}

void set_threads(int n) {
#if defined(_OPENMP)
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

SystemState random_state(const Grid1D& g, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(0.05, 0.45);
    SystemState s;
    s.r.resize(g.n_nodes());
    s.b.resize(g.n_nodes());
    for (int i = 0; i < g.n_nodes(); ++i) {
        s.r[i] = dist(rng);
        s.b[i] = dist(rng);
    }
    return s;
}

template <typename Ref, typename Prod>
void row(const char* name, int n, int reps, Ref&& ref_fn, Prod&& prod_fn) {
    const double t_ref = time_best_of(reps, ref_fn);
    set_threads(1);
    const double t_one = time_best_of(reps, prod_fn);
    int max_threads = 1;
#if defined(_OPENMP)
    max_threads = omp_get_num_procs();
#endif
    set_threads(max_threads);
    const double t_all = time_best_of(reps, prod_fn);
    std::printf("%-20s %9d %11.3f %11.3f %11.3f %8.2f\n", name, n, t_ref * 1e3, t_one * 1e3,
                t_all * 1e3, t_one / t_all);
}

}  // namespace

int main() {
#if defined(_OPENMP)
    std::printf("threads available: %d\n", omp_get_num_procs());
#else
    std::printf("threads available: 1 (compiled without OpenMP)\n");
#endif
    std::printf("%-20s %9s %11s %11s %11s %8s\n", "kernel", "n", "ref[ms]", "1 thr[ms]",
                "all[ms]", "scaling");

    std::mt19937 rng(7);
    for (int n : {1 << 14, 1 << 17, 1 << 20}) {
        ModelParams params;
        params.eps_r = params.eps_b = 0.01;
        params.D_r = 0.5;
        params.D_b = 1.0;
        params.N_r = params.N_b = 0.1;
        params.v_r = 2.0;
        params.v_b = 1.0;
        const Grid1D grid = make_grid(-0.5, 0.5, n);
        const System sys = System::build(grid, params);
        const SystemState s = random_state(grid, rng);
        const int reps = 5;

        row("assemble_fluxes", n, reps, [&] { ref::assemble_fluxes(sys, s); },
            [&] { assemble_fluxes(sys, s); });
        row("rhs", n, reps, [&] { ref::rhs(sys, s); }, [&] { rhs(sys, s); });
        const EntropyKind kind{RegularizedEntropy{0.05}};
        row("entropy_variables", n, reps, [&] { ref::entropy_variables(sys, s, kind); },
            [&] { entropy_variables(sys, s, kind); });
        const EntropyVariables vars = entropy_variables(sys, s, kind);
        row("invert_gradient", n, reps,
            [&] { ref::invert_entropy_gradient(sys, vars, 0.05); },
            [&] { invert_entropy_gradient(sys, vars, 0.05); });
        row("mobility", n, reps,
            [&] { ref::mobility(s, sys.coeffs, MobilityKind{GeneralMobility{}}); },
            [&] { mobility(s, sys.coeffs, MobilityKind{GeneralMobility{}}); });
    }
    return 0;
}
