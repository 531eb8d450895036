#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crossdiff/errors.hpp"
#include "crossdiff/model.hpp"
#include "crossdiff/system.hpp"

using namespace crossdiff;

namespace {
constexpr double kPi = 3.14159265358979323846;

ModelParams base_params() {
    ModelParams p;
    p.d = 2;
    p.eps_r = p.eps_b = 0.01;
    p.N_r = p.N_b = 200;
    p.v_r = 2;
    p.v_b = 1;
    return p;
}
}  // namespace

TEST_CASE("planar coefficients at equal diffusivities") {
    ModelParams p = base_params();
    const Coefficients c = compute_coefficients(p);
    CHECK(c.alpha == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(c.gamma_r == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(c.gamma_b == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(c.beta_r == doctest::Approx(3 * kPi / 2).epsilon(1e-15));
    CHECK(c.beta_b == doctest::Approx(3 * kPi / 2).epsilon(1e-15));
    CHECK(c.symmetric);
    CHECK(c.alpha_bar == doctest::Approx(1e-4 * kPi).epsilon(1e-14));
    CHECK(c.gamma_bar == doctest::Approx(1e-4 * kPi / 2).epsilon(1e-14));
}

TEST_CASE("slow red species reproduces the scaled defect magnitude") {
    ModelParams p = base_params();
    p.D_r = 0.2;
    const Coefficients c = compute_coefficients(p, 0.01);
    CHECK(c.a_r == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.a_b == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.a_br == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.theta_r == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(c.scaled_theta_r() == doctest::Approx(8e-5).epsilon(1e-12));
    CHECK_FALSE(c.symmetric);
}

TEST_CASE("three dimensions: direct beta evaluation equals alpha plus gamma") {
    ModelParams p = base_params();
    p.d = 3;
    const Coefficients c = compute_coefficients(p);
    CHECK(c.gamma_r == doctest::Approx(kPi / 3).epsilon(1e-15));
    // Independent route: beta formula evaluated by hand for D_r = D_b:
    // (2*pi/3) * (2 + 3)/2 = 5*pi/3; alpha + gamma = 4*pi/3 + pi/3.
    CHECK(c.beta_r == doctest::Approx(5 * kPi / 3).epsilon(1e-15));
    CHECK(c.beta_r == doctest::Approx(c.alpha + c.gamma_r).epsilon(1e-15));
}

TEST_CASE("coefficient identities over a random parameter grid") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> diff(0.05, 5.0);
    std::uniform_real_distribution<double> diam(0.0, 0.05);
    for (int trial = 0; trial < 300; ++trial) {
        ModelParams p = base_params();
        p.d = (trial % 2) ? 2 : 3;
        p.D_r = diff(rng);
        p.D_b = diff(rng);
        p.eps_r = diam(rng);
        p.eps_b = diam(rng);
        const double eps_ref = std::max({p.eps_r, p.eps_b, 0.01});
        const Coefficients c = compute_coefficients(p, eps_ref);

        CHECK(c.gamma_r + c.gamma_b == doctest::Approx(2 * kPi / p.d).epsilon(1e-15));
        CHECK(c.beta_r == doctest::Approx(c.alpha + c.gamma_b).epsilon(1e-14));
        CHECK(c.beta_b == doctest::Approx(c.alpha + c.gamma_r).epsilon(1e-14));
        // a_br^2 = a_r a_b forces equal diameters; with distinct diameters the
        // defect coefficients cannot both vanish.
        if (std::abs(p.eps_r - p.eps_b) > 1e-6 || std::abs(p.D_r - p.D_b) > 1e-6) {
            CHECK((std::abs(c.theta_r) > 1e-12 || std::abs(c.theta_b) > 1e-12));
        }
    }
}

TEST_CASE("equal sizes and diffusivities null the defect coefficients") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> diff(0.05, 5.0);
    std::uniform_real_distribution<double> diam(1e-4, 0.05);
    for (int trial = 0; trial < 100; ++trial) {
        ModelParams p = base_params();
        p.D_r = p.D_b = diff(rng);
        p.eps_r = p.eps_b = diam(rng);
        const Coefficients c = compute_coefficients(p);
        CHECK(std::abs(c.theta_r) <= 1e-13 * p.D_r);
        CHECK(std::abs(c.theta_b) <= 1e-13 * p.D_r);
        CHECK(std::abs(c.beta_r - c.alpha - c.gamma_r) <= 1e-14 * c.beta_r);
        CHECK(c.symmetric);
    }
}

TEST_CASE("volume fraction") {
    ModelParams p = base_params();
    SUBCASE("empty system") {
        // N must stay positive for validation; use the ball volume directly.
        CHECK(ball_volume(2, 0.0) == 0.0);
        p.eps_r = p.eps_b = 0.0;
        CHECK(volume_fraction(p) == 0.0);
    }
    SUBCASE("planar disks at the worked value") {
        // 400 * pi * 0.005^2
        CHECK(volume_fraction(p) == doctest::Approx(400 * kPi * 2.5e-5).epsilon(1e-14));
    }
    SUBCASE("total volume density relates to rho in the symmetric case") {
        const Grid1D grid = make_grid(-0.5, 0.5, 16);
        const System sys = System::build(grid, p);
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> dist(0.0, 300.0);
        SystemState s;
        s.r.resize(grid.n_nodes());
        s.b.resize(grid.n_nodes());
        for (int i = 0; i < grid.n_nodes(); ++i) {
            s.r[i] = dist(rng);
            s.b[i] = dist(rng);
        }
        const GridField phi = local_volume_density(p, s);
        for (int i = 0; i < grid.n_nodes(); ++i) {
            const double rho = s.r[i] + s.b[i];
            CHECK(rho == doctest::Approx(2.0 * phi[i] / sys.coeffs.gamma_bar).epsilon(1e-12));
        }
    }
}

TEST_CASE("parameter validation") {
    ModelParams p = base_params();
    SUBCASE("nonpositive diffusivity") {
        p.D_r = 0.0;
        CHECK_THROWS_AS(compute_coefficients(p), ConfigError);
    }
    SUBCASE("zero reference with finite diameters") {
        CHECK_THROWS_AS(compute_coefficients(p, 0.0), ConfigError);
    }
    SUBCASE("bad dimension") {
        p.d = 4;
        CHECK_THROWS_AS(compute_coefficients(p), ConfigError);
    }
    SUBCASE("reference defaults to the larger diameter") {
        p.eps_r = 0.02;
        p.eps_b = 0.01;
        const Coefficients c = compute_coefficients(p);
        CHECK(c.eps_ref == 0.02);
        CHECK(c.a_r == doctest::Approx(1.0));
        CHECK(c.a_b == doctest::Approx(0.25).epsilon(1e-14));
    }
}
