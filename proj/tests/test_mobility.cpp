#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crossdiff/discretization.hpp"
#include "crossdiff/mobility.hpp"
#include "crossdiff/system.hpp"

using namespace crossdiff;

namespace {

Coefficients coeffs_for(double D_r, double D_b, double eps_r, double eps_b) {
    ModelParams p;
    p.d = 2;
    p.D_r = D_r;
    p.D_b = D_b;
    p.eps_r = eps_r;
    p.eps_b = eps_b;
    return compute_coefficients(p);
}

}  // namespace

TEST_CASE("mobility entries") {
    SUBCASE("vacuum degenerates to zero") {
        Coefficients c = coeffs_for(1, 1, 0.01, 0.01);
        const Mat2 m = mobility_at(0.0, 0.0, c, SymmetricMobility{});
        CHECK(m.a11 == 0.0);
        CHECK(m.a12 == 0.0);
        CHECK(m.a22 == 0.0);
    }
    SUBCASE("worked symmetric block") {
        Coefficients c = coeffs_for(1, 1, 0.01, 0.01);
        c.gamma_bar = 0.5;
        const Mat2 m = mobility_at(0.1, 0.1, c, SymmetricMobility{});
        CHECK(m.a11 == doctest::Approx(0.095).epsilon(1e-15));
        CHECK(m.a12 == doctest::Approx(0.005).epsilon(1e-15));
        CHECK(m.a21 == doctest::Approx(0.005).epsilon(1e-15));
        CHECK(m.a22 == doctest::Approx(0.095).epsilon(1e-15));
        // Determinant identity r b (1 - gamma_bar rho) against the direct 2x2 value.
        CHECK(m.det() == doctest::Approx(0.01 * 0.9).epsilon(1e-14));
    }
    SUBCASE("determinant identity over random states") {
        Coefficients c = coeffs_for(1, 1, 0.02, 0.02);
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> dist(0.0, 0.5 / c.gamma_bar);
        for (int trial = 0; trial < 500; ++trial) {
            const double r = dist(rng), b = dist(rng);
            const Mat2 m = mobility_at(r, b, c, SymmetricMobility{});
            const double expected = r * b * (1.0 - c.gamma_bar * (r + b));
            CHECK(m.det() == doctest::Approx(expected).epsilon(1e-13));
        }
    }
    SUBCASE("symmetric kind equals the species-specific kind at symmetric parameters") {
        const Coefficients c = coeffs_for(1, 1, 0.01, 0.01);
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> dist(0.0, 900.0);
        for (int trial = 0; trial < 200; ++trial) {
            const double r = dist(rng), b = dist(rng);
            const Mat2 ms = mobility_at(r, b, c, SymmetricMobility{});
            const Mat2 mg = mobility_at(r, b, c, GeneralMobility{});
            CHECK(ms.a11 == doctest::Approx(mg.a11).epsilon(1e-14));
            CHECK(ms.a12 == doctest::Approx(mg.a12).epsilon(1e-14));
            CHECK(ms.a21 == doctest::Approx(mg.a21).epsilon(1e-14));
            CHECK(ms.a22 == doctest::Approx(mg.a22).epsilon(1e-14));
        }
    }
    SUBCASE("expansion truncates exactly") {
        const Coefficients c = coeffs_for(0.3, 1.7, 0.013, 0.024);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> dist(0.0, 500.0);
        for (int trial = 0; trial < 200; ++trial) {
            const double r = dist(rng), b = dist(rng);
            const Mat2 m0 = mobility_at(r, b, c, ExpansionMobility{0});
            const Mat2 mg = mobility_at(r, b, c, GeneralMobility{});
            const Mat2 m1 = mobility_at(r, b, c, ExpansionMobility{1});
            CHECK(m1.a11 == doctest::Approx(mg.a11).epsilon(1e-13));
            CHECK(m1.a12 == doctest::Approx(mg.a12).epsilon(1e-13));
            CHECK(m1.a22 == doctest::Approx(mg.a22).epsilon(1e-13));
            // First-order block reconstructed from the difference.
            const double d11 = (mg.a11 - m0.a11) / c.eps_ref_d;
            CHECK(d11 ==
                  doctest::Approx(-c.a_br * r * b * c.D_r * c.gamma_r).epsilon(1e-11));
            const double d12 = (mg.a12 - m0.a12) / c.eps_ref_d;
            CHECK(d12 == doctest::Approx(c.a_br * r * b * c.D_r * c.gamma_b).epsilon(1e-11));
        }
    }
}

TEST_CASE("positive definiteness report") {
    Coefficients c = coeffs_for(1, 1, 0.01, 0.01);
    c.gamma_bar = 2.0;
    SUBCASE("half filling") {
        SystemState s;
        s.r.assign(9, 0.125);
        s.b.assign(9, 0.125);  // rho = 0.25 = 0.5 / gamma_bar
        const PositivityReport rep = is_positive_definite(s, c);
        CHECK(rep.all_ok);
        for (double m : rep.margin) CHECK(m == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("degenerate node flagged") {
        SystemState s;
        s.r.assign(9, 0.1);
        s.b.assign(9, 0.1);
        s.r[4] = 0.4;  // rho = 0.5 = 1/gamma_bar exactly
        const PositivityReport rep = is_positive_definite(s, c);
        CHECK_FALSE(rep.all_ok);
        CHECK_FALSE(rep.node_ok[4]);
        CHECK(rep.node_ok[3]);
        CHECK(rep.margin[4] == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("interior samples have positive spectra") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> dist(0.01, 0.24);
        const Coefficients cg = coeffs_for(0.4, 1.3, 0.015, 0.022);
        for (int trial = 0; trial < 500; ++trial) {
            const double r = dist(rng) / cg.gamma_bar, b = dist(rng) / cg.gamma_bar;
            const Mat2 m = mobility_at(r, b, cg, GeneralMobility{});
            // Direct 2x2 eigenvalue oracle on the symmetrized part.
            const Mat2 sym{m.a11, 0.5 * (m.a12 + m.a21), 0.5 * (m.a12 + m.a21), m.a22};
            CHECK(sym.sym_eigenvalues()[0] > 0.0);
        }
    }
}

TEST_CASE("defect vector") {
    SUBCASE("symmetric parameters null it for arbitrary fields") {
        const Coefficients c = coeffs_for(1, 1, 0.01, 0.01);
        std::mt19937 rng(13);
        std::uniform_real_distribution<double> dist(-5.0, 5.0);
        GridField r(8), b(8), dr(8), db(8);
        for (int i = 0; i < 8; ++i) {
            r[i] = std::abs(dist(rng));
            b[i] = std::abs(dist(rng));
            dr[i] = dist(rng);
            db[i] = dist(rng);
        }
        const PairField g = g_vector(r, b, dr, db, c);
        for (int i = 0; i < 8; ++i) {
            CHECK(g.r[i] == 0.0);
            CHECK(g.b[i] == 0.0);
        }
    }
    SUBCASE("constant fields null it through the gradients") {
        const Coefficients c = coeffs_for(0.2, 1.0, 0.01, 0.01);
        GridField r(4, 3.0), b(4, 2.0), zero(4, 0.0);
        const PairField g = g_vector(r, b, zero, zero, c);
        for (int i = 0; i < 4; ++i) {
            CHECK(g.r[i] == 0.0);
            CHECK(g.b[i] == 0.0);
        }
    }
    SUBCASE("single point against the written formula") {
        const Coefficients c = coeffs_for(0.2, 1.0, 0.01, 0.01);
        GridField r(1, 1.0), b(1, 1.0), dr(1, 1.0), db(1, 0.0);
        const PairField g = g_vector(r, b, dr, db, c);
        CHECK(g.r[0] ==
              doctest::Approx(c.alpha * c.a_br * c.gamma_r * c.theta_r).epsilon(1e-14));
        CHECK(g.b[0] ==
              doctest::Approx(-c.alpha * c.a_br * c.gamma_b * c.theta_r).epsilon(1e-14));
    }
    SUBCASE("linear in the defect coefficients") {
        Coefficients c = coeffs_for(0.3, 1.0, 0.012, 0.018);
        GridField r(1, 2.0), b(1, 1.5), dr(1, 0.7), db(1, 0.0);
        const PairField g1 = g_vector(r, b, dr, db, c);
        c.theta_r *= 2.0;
        const PairField g2 = g_vector(r, b, dr, db, c);
        CHECK(g2.r[0] == doctest::Approx(2.0 * g1.r[0]).epsilon(1e-13));
        CHECK(g2.b[0] == doctest::Approx(2.0 * g1.b[0]).epsilon(1e-13));
    }
}

TEST_CASE("flux decomposition residual") {
    SUBCASE("hand expansion at one point") {
        // Independent transcription of both flux forms at a single state.
        const Coefficients c = coeffs_for(0.7, 1.4, 0.012, 0.02);
        const double r = 1.3, b = 0.8, dr = -0.4, db = 0.9, dVr = 2.0, dVb = -1.0;
        const double full_r =
            c.D_r * ((1.0 + c.eps_rd * c.alpha * r) * dr + dVr * r +
                     c.eps_brd * (c.beta_r * r * db - c.gamma_r * b * dr +
                                  (c.gamma_b * dVb - c.gamma_r * dVr) * r * b));
        const double du = dr / r + dVr + c.alpha * (c.eps_rd * dr + c.eps_brd * db);
        const double dv = db / b + dVb + c.alpha * (c.eps_bd * db + c.eps_brd * dr);
        const double gf_r = c.D_r * r * (1.0 - c.gamma_r * c.eps_brd * b) * du +
                            c.D_r * c.gamma_b * c.eps_brd * r * b * dv;
        const double defect_r =
            c.alpha * c.a_br * r * b * c.gamma_r * (c.theta_r * dr - c.theta_b * db);
        CHECK(gf_r - c.eps_2d * defect_r == doctest::Approx(full_r).epsilon(1e-13));

        const Flux2 full = flux_general_point(r, b, dr, db, dVr, dVb, c);
        CHECK(full.jr == doctest::Approx(full_r).epsilon(1e-15));
    }
    SUBCASE("point-particle limit is exact") {
        ModelParams p;
        p.d = 2;
        p.D_r = 0.5;
        p.D_b = 2.0;
        const Coefficients c = compute_coefficients(p);
        GridField r(3, 1.0), b(3, 2.0), dr(3, 0.3), db(3, -0.7);
        const AgfCheck chk = agf_residual(r, b, dr, db, 1.0, -1.0, c);
        CHECK(chk.max_rel <= 1e-15);
    }
    SUBCASE("random admissible states stay at round-off") {
        std::mt19937 rng(17);
        const Coefficients c = coeffs_for(0.2, 1.0, 0.01, 0.014);
        std::uniform_real_distribution<double> pos(0.01, 0.45);
        std::uniform_real_distribution<double> grad(-400.0, 400.0);
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 16;
            GridField r(n), b(n), dr(n), db(n);
            for (int i = 0; i < n; ++i) {
                r[i] = pos(rng) / c.gamma_bar;
                b[i] = pos(rng) / c.gamma_bar;
                dr[i] = grad(rng);
                db[i] = grad(rng);
            }
            const AgfCheck chk = agf_residual(r, b, dr, db, 2.0, 1.0, c);
            CHECK(chk.max_rel <= 1e-12);
        }
    }
    SUBCASE("symmetric parameters give an exact gradient flow") {
        const Coefficients c = coeffs_for(1, 1, 0.01, 0.01);
        GridField r(5, 120.0), b(5, 340.0), dr(5, -50.0), db(5, 80.0);
        const AgfCheck chk = agf_residual(r, b, dr, db, 2.0, 1.0, c);
        CHECK(chk.max_rel <= 1e-13);
        // And the defect itself vanishes, not only the combination.
        const PairField g = g_vector(r, b, dr, db, c);
        CHECK(linf_norm(g.r) == 0.0);
    }
}
