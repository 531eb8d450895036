#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crossdiff/entropy.hpp"
#include "crossdiff/errors.hpp"

using namespace crossdiff;

namespace {
constexpr double kPi = 3.14159265358979323846;

System small_system(double eps = 0.01, double v_r = 0.0, double v_b = 0.0, int n = 16) {
    ModelParams p;
    p.d = 2;
    p.eps_r = p.eps_b = eps;
    p.v_r = v_r;
    p.v_b = v_b;
    p.N_r = p.N_b = 1;
    return System::build(make_grid(-0.5, 0.5, n), p);
}

// System with hand-set scaled coefficients, for worked examples quoted in
// those terms.
System system_with_bars(double alpha_bar, double gamma_bar, double v_r = 0.0,
                        double v_b = 0.0, int n = 16) {
    System sys = small_system(0.01, v_r, v_b, n);
    sys.coeffs.alpha_bar = alpha_bar;
    sys.coeffs.gamma_bar = gamma_bar;
    return sys;
}

SystemState random_interior(const System& sys, std::mt19937& rng) {
    // Interior of the admissible set: r, b > 0, gamma_bar (r + b) < 1.
    const double cap = sys.coeffs.gamma_bar > 0 ? 1.0 / sys.coeffs.gamma_bar : 2.0;
    std::uniform_real_distribution<double> dist(0.02, 0.45);
    SystemState s;
    s.r.resize(sys.grid.n_nodes());
    s.b.resize(sys.grid.n_nodes());
    for (int i = 0; i < sys.grid.n_nodes(); ++i) {
        s.r[i] = dist(rng) * cap;
        s.b[i] = dist(rng) * cap;
    }
    return s;
}
}  // namespace

TEST_CASE("entropy value basics") {
    SUBCASE("vacuum evaluates to zero") {
        System sys = system_with_bars(0.0, 0.0);
        const SystemState s = uniform_state(sys.grid, 0.0, 0.0);
        CHECK(entropy_value(sys, s, SymmetricEntropy{}) == 0.0);
    }
    SUBCASE("unit densities with no interaction") {
        System sys = system_with_bars(0.0, 0.0);
        const SystemState s = uniform_state(sys.grid, 1.0, 1.0);
        CHECK(entropy_value(sys, s, SymmetricEntropy{}) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("constant integrand quadrature") {
        const double abar = kPi * 1e-4;
        System sys = system_with_bars(abar, 0.0);
        const SystemState s = uniform_state(sys.grid, 1.0, 1.0);
        // Hand quadrature: density = abar/2 * (1 + 2 + 1) = 2 abar on |domain| = 1.
        CHECK(entropy_value(sys, s, SymmetricEntropy{}) ==
              doctest::Approx(2.0 * abar).epsilon(1e-14));
    }
    SUBCASE("packing violation names the node") {
        System sys = system_with_bars(0.0, 1.0);
        SystemState s = uniform_state(sys.grid, 0.3, 0.3);
        s.r[5] = 0.9;  // rho = 1.2 > 1/gamma_bar
        CHECK_THROWS_WITH_AS(entropy_value(sys, s, RegularizedEntropy{0.1}),
                             doctest::Contains("node 5"), DomainError);
    }
}

TEST_CASE("entropy variables") {
    SUBCASE("constant log") {
        System sys = system_with_bars(0.0, 0.0);
        const SystemState s = uniform_state(sys.grid, std::exp(-1.0), std::exp(-1.0));
        const EntropyVariables vars = entropy_variables(sys, s, RegularizedEntropy{0.0});
        for (double u : vars.u) CHECK(u == doctest::Approx(-1.0).epsilon(1e-15));
        for (double v : vars.v) CHECK(v == doctest::Approx(-1.0).epsilon(1e-15));
    }
    SUBCASE("size-free equilibrium has constant duals") {
        System sys = small_system(0.0, 2.0, 1.0, 32);
        SystemState s;
        s.r.resize(sys.grid.n_nodes());
        s.b.resize(sys.grid.n_nodes());
        for (int i = 0; i < sys.grid.n_nodes(); ++i) {
            s.r[i] = 0.7 * std::exp(-sys.Vr[i]);
            s.b[i] = 1.3 * std::exp(-sys.Vb[i]);
        }
        const EntropyVariables vars = entropy_variables(sys, s, ExpansionEntropy{0});
        for (double u : vars.u) CHECK(u == doctest::Approx(std::log(0.7)).epsilon(1e-13));
        for (double v : vars.v) CHECK(v == doctest::Approx(std::log(1.3)).epsilon(1e-13));
    }
    SUBCASE("nonpositive density names the node") {
        System sys = small_system();
        SystemState s = uniform_state(sys.grid, 0.2, 0.2);
        s.b[3] = 0.0;
        CHECK_THROWS_WITH_AS(entropy_variables(sys, s, SymmetricEntropy{}),
                             doctest::Contains("node 3"), DomainError);
    }
}

TEST_CASE("finite differences of the discrete entropy match the variables") {
    // Exact pairing for the regularized density; the r log r kinds differ by
    // exactly the additive constant 1 per species.
    std::mt19937 rng(7);
    System sys = system_with_bars(0.4, 0.8, 1.5, -0.5);
    SystemState s = random_interior(sys, rng);
    const double delta = 1e-7;

    auto fd_check = [&](const EntropyKind& kind, double expected_offset) {
        const EntropyVariables vars = entropy_variables(sys, s, kind);
        for (int i : {0, 3, sys.grid.n_cells}) {
            SystemState up = s, dn = s;
            up.r[i] += delta;
            dn.r[i] -= delta;
            const double fd = (entropy_value(sys, up, kind) - entropy_value(sys, dn, kind)) /
                              (2 * delta * sys.grid.weight(i));
            CHECK(fd - vars.u[i] == doctest::Approx(expected_offset).epsilon(1e-6));
            up = s;
            dn = s;
            up.b[i] += delta;
            dn.b[i] -= delta;
            const double fdb = (entropy_value(sys, up, kind) - entropy_value(sys, dn, kind)) /
                               (2 * delta * sys.grid.weight(i));
            CHECK(fdb - vars.v[i] == doctest::Approx(expected_offset).epsilon(1e-6));
        }
    };
    fd_check(RegularizedEntropy{0.3}, 0.0);
    fd_check(RegularizedEntropy{0.0}, 0.0);
    fd_check(SymmetricEntropy{}, 1.0);
}

TEST_CASE("expansion truncates exactly") {
    ModelParams p;
    p.d = 2;
    p.eps_r = 0.01;
    p.eps_b = 0.017;
    p.v_r = 2;
    p.v_b = 1;
    System sys = System::build(make_grid(-0.5, 0.5, 24), p);
    std::mt19937 rng(19);
    SystemState s = random_interior(sys, rng);
    const double full = entropy_value(sys, s, GeneralEntropy{});
    const double e0 = entropy_value(sys, s, ExpansionEntropy{0});
    const double e1_route = entropy_value(sys, s, ExpansionEntropy{1});
    CHECK(e1_route == doctest::Approx(full).epsilon(1e-14));
    CHECK(std::abs(full - e0) > 0.0);  // the correction is genuinely present
}

TEST_CASE("density fixed point") {
    SUBCASE("unit relaxation splits the interval") {
        // z = (1 - z) at tau * gamma_bar = 1, sum_exp = 1.
        CHECK(solve_density_fixed_point(1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("no barrier reduces to the plain sum") {
        CHECK(solve_density_fixed_point(0.37, 0.0, 0.5) == 0.37);
        CHECK(solve_density_fixed_point(0.37, 1.0, 0.0) == 0.37);
    }
    SUBCASE("residual vanishes at the root") {
        for (double sum_exp : {0.05, 0.2, 0.4}) {
            for (double tg : {0.5, 1.0, 2.0}) {
                const double z = solve_density_fixed_point(sum_exp, 2.0, tg);
                CHECK(z == doctest::Approx(sum_exp * std::pow(1.0 - 2.0 * z, tg))
                               .epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("entropy gradient inversion") {
    SUBCASE("pure log case") {
        const auto rb =
            invert_entropy_gradient_node(std::log(0.1), std::log(0.1), 0, 0, 0, 0, 0);
        CHECK(rb[0] == doctest::Approx(0.1).epsilon(1e-13));
        CHECK(rb[1] == doctest::Approx(0.1).epsilon(1e-13));
    }
    SUBCASE("worked round trip") {
        // Forward map at (r, b) = (0.2, 0.3), gamma_bar = 1, alpha_bar = 0.5,
        // tau = 0.1, V = 0: u = log r + 0.5 rho - 0.1 log(1 - rho).
        const double rho = 0.5;
        const double barrier = -0.1 * std::log(1.0 - rho);
        const double u = std::log(0.2) + 0.5 * rho + barrier;
        const double v = std::log(0.3) + 0.5 * rho + barrier;
        const auto rb = invert_entropy_gradient_node(u, v, 0, 0, 0.5, 1.0, 0.1);
        CHECK(rb[0] == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(rb[1] == doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("round trip over the interior") {
        std::mt19937 rng(23);
        System sys = system_with_bars(0.7, 1.3, 2.0, -1.0);
        for (double tau : {0.0, 0.05, 0.8}) {
            SystemState s = random_interior(sys, rng);
            const EntropyVariables vars = entropy_variables(sys, s, RegularizedEntropy{tau});
            const SystemState back = invert_entropy_gradient(sys, vars, tau);
            for (int i = 0; i < sys.grid.n_nodes(); ++i) {
                CHECK(back.r[i] == doctest::Approx(s.r[i]).epsilon(1e-10));
                CHECK(back.b[i] == doctest::Approx(s.b[i]).epsilon(1e-10));
            }
        }
    }
    SUBCASE("nonfinite input is rejected") {
        CHECK_THROWS_AS(invert_entropy_gradient_node(
                            std::numeric_limits<double>::quiet_NaN(), 0, 0, 0, 0, 0, 0),
                        DomainError);
    }
}

TEST_CASE("dual Hessian") {
    SUBCASE("bare log terms") {
        System sys = system_with_bars(0.0, 1.0);
        const SystemState s = uniform_state(sys.grid, 0.25, 0.25);
        const MatField h = dual_hessian(sys, s, 0.0);
        for (int i = 0; i < sys.grid.n_nodes(); ++i) {
            CHECK(h.m11[i] == doctest::Approx(4.0).epsilon(1e-15));
            CHECK(h.m22[i] == doctest::Approx(4.0).epsilon(1e-15));
            CHECK(h.m12[i] == 0.0);
        }
    }
    SUBCASE("positive definite over random interior samples") {
        std::mt19937 rng(5);
        System sys = system_with_bars(0.9, 1.1);
        for (int trial = 0; trial < 60; ++trial) {
            SystemState s = random_interior(sys, rng);
            const MatField h = dual_hessian(sys, s, 0.2);
            for (int i = 0; i < sys.grid.n_nodes(); ++i) {
                const auto eig = h.at(i).sym_eigenvalues();
                CHECK(eig[0] > 0.0);
            }
        }
    }
    SUBCASE("matches a central-difference Jacobian of the gradient") {
        std::mt19937 rng(29);
        System sys = system_with_bars(0.6, 0.9, 1.0, 0.5);
        SystemState s = random_interior(sys, rng);
        const double tau = 0.15;
        const MatField h = dual_hessian(sys, s, tau);
        const double delta = 1e-6;
        const EntropyKind kind{RegularizedEntropy{tau}};
        for (int i : {1, 7, 12}) {
            SystemState up = s, dn = s;
            up.r[i] += delta;
            dn.r[i] -= delta;
            const EntropyVariables vu = entropy_variables(sys, up, kind);
            const EntropyVariables vd = entropy_variables(sys, dn, kind);
            CHECK((vu.u[i] - vd.u[i]) / (2 * delta) ==
                  doctest::Approx(h.m11[i]).epsilon(1e-6));
            CHECK((vu.v[i] - vd.v[i]) / (2 * delta) ==
                  doctest::Approx(h.m21[i]).epsilon(1e-6));
        }
    }
}

TEST_CASE("regularized density is convex") {
    std::mt19937 rng(31);
    System sys = system_with_bars(0.8, 1.0, -1.0, 2.0);
    std::uniform_real_distribution<double> lam_dist(0.05, 0.95);
    for (int trial = 0; trial < 200; ++trial) {
        SystemState s1 = random_interior(sys, rng);
        SystemState s2 = random_interior(sys, rng);
        const double lam = lam_dist(rng);
        SystemState mix;
        mix.r.resize(s1.r.size());
        mix.b.resize(s1.b.size());
        for (std::size_t i = 0; i < s1.r.size(); ++i) {
            mix.r[i] = lam * s1.r[i] + (1 - lam) * s2.r[i];
            mix.b[i] = lam * s1.b[i] + (1 - lam) * s2.b[i];
        }
        const EntropyKind kind{RegularizedEntropy{0.4}};
        const double lhs = entropy_value(sys, mix, kind);
        const double rhs = lam * entropy_value(sys, s1, kind) +
                           (1 - lam) * entropy_value(sys, s2, kind);
        CHECK(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)));
    }
}
