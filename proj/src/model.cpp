#include "crossdiff/model.hpp"

#include <cmath>

#include "crossdiff/errors.hpp"

namespace crossdiff {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= 1e-14 * (std::abs(a) + std::abs(b) + 1e-300);
}
}  // namespace

GridField LinearPotential::sample(const Grid1D& grid) const {
    GridField v(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) v[i] = value(grid.node(i));
    return v;
}

void ModelParams::validate() const {
    if (d != 2 && d != 3) throw ConfigError("model: dimension must be 2 or 3");
    if (!(D_r > 0.0) || !(D_b > 0.0)) throw ConfigError("model: diffusivities must be positive");
    if (eps_r < 0.0 || eps_b < 0.0) throw ConfigError("model: diameters must be nonnegative");
    if (!(N_r > 0.0) || !(N_b > 0.0)) throw ConfigError("model: particle numbers must be positive");
    if (!(x_hi > x_lo)) throw ConfigError("model: x_hi must exceed x_lo");
}

Coefficients compute_coefficients(const ModelParams& p, double eps_ref) {
    p.validate();
    if (eps_ref < 0.0) throw ConfigError("coefficients: eps_ref must be nonnegative");
    if (eps_ref == 0.0 && (p.eps_r > 0.0 || p.eps_b > 0.0))
        throw ConfigError("coefficients: eps_ref = 0 with nonzero diameters");

    Coefficients c;
    c.d = p.d;
    c.D_r = p.D_r;
    c.D_b = p.D_b;
    const double d = static_cast<double>(p.d);
    const double Dsum = p.D_r + p.D_b;

    c.alpha = 2.0 * (d - 1.0) * kPi / d;
    c.beta_r = (2.0 * kPi / d) * ((d - 1.0) * p.D_r + d * p.D_b) / Dsum;
    c.beta_b = (2.0 * kPi / d) * ((d - 1.0) * p.D_b + d * p.D_r) / Dsum;
    c.gamma_r = (2.0 * kPi / d) * p.D_r / Dsum;
    c.gamma_b = (2.0 * kPi / d) * p.D_b / Dsum;

    c.eps_ref = eps_ref;
    c.eps_ref_d = std::pow(eps_ref, d);
    c.eps_2d = c.eps_ref_d * c.eps_ref_d;
    if (eps_ref > 0.0) {
        c.a_r = std::pow(p.eps_r / eps_ref, d);
        c.a_b = std::pow(p.eps_b / eps_ref, d);
        c.a_br = std::pow(p.eps_br() / eps_ref, d);
    } else {
        // Point particles: all ratios coincide, every eps^d product vanishes.
        c.a_r = c.a_b = c.a_br = 1.0;
    }
    c.eps_rd = c.a_r * c.eps_ref_d;
    c.eps_bd = c.a_b * c.eps_ref_d;
    c.eps_brd = c.a_br * c.eps_ref_d;

    c.theta_r = p.D_b * c.a_br - p.D_r * c.a_r;
    c.theta_b = p.D_r * c.a_br - p.D_b * c.a_b;

    c.alpha_bar = c.eps_ref_d * c.alpha;
    c.gamma_bar = c.eps_ref_d * (kPi / d);  // equals eps_ref^d gamma_i at equal diffusivities
    c.symmetric = nearly_equal(p.eps_r, p.eps_b) && nearly_equal(p.D_r, p.D_b);
    return c;
}

Coefficients compute_coefficients(const ModelParams& p) {
    return compute_coefficients(p, std::max(p.eps_r, p.eps_b));
}

double ball_volume(int d, double diameter) {
    const double radius = 0.5 * diameter;
    return d == 2 ? kPi * radius * radius : (4.0 / 3.0) * kPi * radius * radius * radius;
}

double volume_fraction(const ModelParams& p) {
    return p.N_r * ball_volume(p.d, p.eps_r) + p.N_b * ball_volume(p.d, p.eps_b);
}

GridField local_volume_density(const ModelParams& p, const SystemState& s) {
    const double vr = ball_volume(p.d, p.eps_r);
    const double vb = ball_volume(p.d, p.eps_b);
    GridField phi(s.r.size());
    for (std::size_t i = 0; i < s.r.size(); ++i) phi[i] = vr * s.r[i] + vb * s.b[i];
    return phi;
}

}  // namespace crossdiff
