#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hypfield/bumps.hpp"
#include "hypfield/errors.hpp"
#include "hypfield/geometry.hpp"
#include "hypfield/quadrature.hpp"
#include "hypfield/verify.hpp"

using namespace hypfield;
using Eigen::ArrayXd;

namespace {

double rel(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Exponential-kernel configuration whose transform decays fast enough for a
// short spectral grid: much cheaper per evaluation than the default config,
// with the same code paths.
BumpConfig cheap_exponential() {
    BumpConfig cfg;
    cfg.kernel = RadialKernel::exponential(0.3);
    cfg.spectral = SpectralGrid::make(240.0, 1200);
    return cfg;
}

// Oscillating kernel, no external input, low threshold: the existence curve
// rises from zero to a single hump and falls, so two pulse widths coexist.
// The transform is essentially band-limited, so a tiny spectral grid suffices.
BumpConfig cheap_gabor() {
    BumpConfig cfg;
    cfg.kernel = RadialKernel::gabor(0.2);
    cfg.I0 = 0.0;
    cfg.kappa = 0.01;
    cfg.spectral = SpectralGrid::make(50.0, 500);
    return cfg;
}

// Number of sign changes in the sequence of successive differences; a single
// interior extremum gives exactly one.
int slope_sign_changes(const std::vector<CurvePoint>& curve) {
    int flips = 0;
    double prev = 0.0;
    for (std::size_t k = 1; k < curve.size(); ++k) {
        const double d = curve[k].N - curve[k - 1].N;
        if (d == 0.0) continue;
        if (prev != 0.0 && d * prev < 0.0) ++flips;
        prev = d;
    }
    return flips;
}

}  // namespace

TEST_CASE("ball mass: degenerate cases, batch consistency, input validation") {
    const BumpConfig cfg = cheap_exponential();

    CHECK(m_of_r_omega(cfg, 0.3, 0.0) == 0.0);
    ArrayXd rs(3);
    rs << 0.0, 0.2, 0.7;
    CHECK((m_of_r_omega(cfg, rs, 0.0) == 0.0).all());

    // The batch overload must agree with scalar evaluation entry by entry.
    const ArrayXd batch = m_of_r_omega(cfg, rs, 0.25);
    for (Eigen::Index i = 0; i < rs.size(); ++i)
        CHECK(rel(batch[i], m_of_r_omega(cfg, rs[i], 0.25)) < 1e-14);

    CHECK_THROWS_AS(m_of_r_omega(cfg, -0.1, 0.2), domain_error);
    CHECK_THROWS_AS(m_of_r_omega(cfg, 0.1, -0.2), domain_error);
    CHECK_THROWS_AS(m_r_slope(cfg, -1.0, 0.2), domain_error);
    CHECK_THROWS_AS(psi_lambda(1.0, -0.5), domain_error);
    CHECK_THROWS_AS(ring_distance(-0.2, 0.3), domain_error);
    CHECK_THROWS_AS(ring_cos_integral(cfg.kernel, 0.2, -1), domain_error);
}

TEST_CASE("spectral grid guard rejects a truncated kernel transform") {
    // The default kernel's transform decays only algebraically; a grid that is
    // fine enough for the wider kernel still truncates an active tail here.
    BumpConfig cfg;
    cfg.spectral = SpectralGrid::make(240.0, 1200);
    CHECK_THROWS_AS(m_of_r_omega(cfg, 0.1, 0.1), resolution_error);
    CHECK_THROWS_AS(m_r_slope(cfg, 0.1, 0.1), resolution_error);
    CHECK_THROWS_AS(existence_curve(cfg, ArrayXd::LinSpaced(3, 0.1, 0.3)), resolution_error);

    // The same grid is fine once the transform decays exponentially faster.
    CHECK_NOTHROW(m_of_r_omega(cheap_exponential(), 0.1, 0.1));
}

TEST_CASE("ball mass matches direct quadrature over the hyperbolic ball") {
    const BumpConfig cfg = cheap_exponential();
    const double pairs[][2] = {{0.2, 0.2}, {0.1, 0.18}, {0.5, 0.3}, {0.0, 0.4}};
    for (const auto& p : pairs) {
        const double spectral = m_of_r_omega(cfg, p[0], p[1]);
        const double direct = m_oracle(cfg.kernel, p[0], p[1], 2);
        CHECK(rel(spectral, direct) < 1e-5);
    }
}

TEST_CASE("ball mass over a shrinking ball recovers the kernel value") {
    // M(r, omega) / (pi sinh^2 omega) -> w(r) as omega -> 0: the ball average
    // degenerates to a point evaluation. The band-limited kernel keeps the
    // spectral truncation error out of the comparison.
    const BumpConfig cfg = cheap_gabor();
    const double omega = 1e-3;
    const double ball_area = std::numbers::pi * std::sinh(omega) * std::sinh(omega);
    for (double r : {0.0, 0.15, 0.3}) {
        const double mean = m_of_r_omega(cfg, r, omega) / ball_area;
        CHECK(rel(mean, cfg.kernel(r)) < 1e-3);
    }
}

TEST_CASE("eigenfunction ball integral: closed form against 2D quadrature") {
    CHECK(psi_lambda(2.0, 0.0) == 0.0);
    CHECK(rel(psi_lambda(3.0, 0.4), psi_lambda(-3.0, 0.4)) < 1e-14);

    // Psi_lambda(omega) is the integral of the boundary plane wave
    // e^{(i lambda + 1)<z, b>} over the ball; its real radial part in polar
    // coordinates is e^{-L/2} cos(lambda L / 2).
    for (double lambda : {0.0, 2.0, 5.0}) {
        for (double omega : {0.2, 0.5, 1.0}) {
            const auto spec =
                QuadratureSpec::tensor(QuadDomain::HyperbolicBall, omega, 96, 256);
            const double direct = disk_integral(
                [&](const DiskPoint<double>& z) {
                    const double rr = std::atanh(std::min(std::hypot(z.z1, z.z2), 1.0 - 1e-16));
                    const double th = std::atan2(z.z2, z.z1);
                    const double L =
                        std::log(std::cosh(2 * rr) - std::sinh(2 * rr) * std::cos(th));
                    return std::exp(-L / 2.0) * std::cos(lambda * L / 2.0);
                },
                spec);
            CHECK(rel(psi_lambda(lambda, omega), direct) < 1e-10);
        }
    }
}

TEST_CASE("radial slope of the ball mass: zeros, sign, finite-difference check") {
    const BumpConfig cfg = cheap_exponential();

    CHECK(m_r_slope(cfg, 0.0, 0.3) == 0.0);
    CHECK(m_r_slope(cfg, 0.3, 0.0) == 0.0);

    // A positive kernel pulls M down as the evaluation point leaves the ball,
    // in both argument orders.
    for (const auto& p : {std::pair{0.15, 0.3}, {0.3, 0.15}, {0.4, 0.4}})
        CHECK(m_r_slope(cfg, p.first, p.second) > 0.0);

    // -dM/dr from the spectral formula against central differences of M.
    const double r = 0.25, omega = 0.2, h = 1e-4;
    const double fd =
        (m_of_r_omega(cfg, r + h, omega) - m_of_r_omega(cfg, r - h, omega)) / (2.0 * h);
    CHECK(rel(-fd, m_r_slope(cfg, r, omega)) < 1e-3);
}

TEST_CASE("ring distance: closed form against the general disk distance") {
    // Antipodal points of the ring are 2 omega apart; coincident points at 0.
    CHECK(ring_distance(0.3, 0.0) == 0.0);
    CHECK(rel(ring_distance(0.3, std::numbers::pi / 2.0), 0.6) < 1e-13);
    CHECK(rel(ring_distance(0.3, 0.4), ring_distance(0.3, std::numbers::pi - 0.4)) < 1e-13);

    for (double omega : {0.1, 0.45, 1.2}) {
        for (double tp : {0.2, 0.7, 1.3}) {
            const double t = std::tanh(omega);
            const DiskPoint<double> p(t, 0.0);
            const DiskPoint<double> q(t * std::cos(2.0 * tp), t * std::sin(2.0 * tp));
            CHECK(rel(ring_distance(omega, tp), dist_disk(p, q)) < 1e-12);
        }
    }
}

TEST_CASE("ring integrals: symmetry kills the sine part, halves the full circle") {
    const RadialKernel kernels[] = {RadialKernel::exponential(0.3), RadialKernel::gabor(0.2)};
    const Quadrature full = gauss_legendre(512, 0.0, 2.0 * std::numbers::pi);
    for (const auto& kernel : kernels) {
        for (double omega : {0.1, 0.25}) {
            for (int n = 0; n <= 5; ++n) {
                CHECK(std::abs(ring_sin_residual(kernel, omega, n)) < 1e-12);
                // Over the full circle the angle difference is Delta = 2 theta';
                // the integrand is symmetric about theta' = pi, so the full
                // integral is exactly twice the reduced one.
                double whole = 0.0;
                for (Eigen::Index k = 0; k < full.x.size(); ++k)
                    whole += full.w[k] * kernel(ring_distance(omega, full.x[k] / 2.0)) *
                             std::cos(n * full.x[k]);
                CHECK(std::abs(whole / 2.0 - ring_cos_integral(kernel, omega, n)) < 1e-12);
            }
        }
        CHECK(rel(ring_w0(kernel, 0.25),
                  std::sinh(0.5) * ring_cos_integral(kernel, 0.25, 0)) < 1e-15);
    }
}

TEST_CASE("existence curve: additive split and single interior extremum") {
    const BumpConfig cfg = cheap_exponential();
    const auto curve = existence_curve(cfg, ArrayXd::LinSpaced(30, 0.02, 1.0));
    REQUIRE(curve.size() == 30);
    for (const auto& p : curve) {
        CHECK(p.I == cfg.input(p.omega));
        CHECK(p.N == p.M + p.I);
    }
    // Gaussian input dies off faster than the ball mass accumulates: the curve
    // falls to an interior minimum (shallow, close to the left edge), then
    // rises for good.
    CHECK(slope_sign_changes(curve) == 1);
    std::size_t idx_min = 0;
    for (std::size_t k = 1; k < curve.size(); ++k)
        if (curve[k].N < curve[idx_min].N) idx_min = k;
    CHECK(idx_min > 0);
    CHECK(idx_min + 1 < curve.size());
    CHECK(curve.back().N > curve.front().N);

    // Without input the oscillating kernel gives the opposite shape: a single
    // hump (rise to an interior maximum, then fall).
    const BumpConfig gab = cheap_gabor();
    const auto hump = existence_curve(gab, ArrayXd::LinSpaced(25, 0.02, 0.6));
    CHECK(slope_sign_changes(hump) == 1);
    double n_max = hump[0].N, om_at_max = hump[0].omega;
    for (const auto& p : hump)
        if (p.N > n_max) {
            n_max = p.N;
            om_at_max = p.omega;
        }
    CHECK(n_max > hump.front().N);
    CHECK(n_max > hump.back().N);
    CHECK(om_at_max > 0.04);
    CHECK(om_at_max < 0.1);
}

TEST_CASE("pulse width solver: root location, bracket validation, no-root error") {
    const BumpConfig cfg = cheap_exponential();
    const auto roots = solve_pulse_width(cfg, 0.05, 0.5, 40, 1e-8);
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0] - 0.144913) < 1e-4);
    const double n_at_root = m_of_r_omega(cfg, roots[0], roots[0]) + cfg.input(roots[0]);
    CHECK(std::abs(n_at_root - cfg.alpha * cfg.kappa) < 1e-6);

    CHECK_THROWS_AS(solve_pulse_width(cfg, -0.1, 0.5), domain_error);
    CHECK_THROWS_AS(solve_pulse_width(cfg, 0.5, 0.1), domain_error);
    CHECK_THROWS_AS(solve_pulse_width(cfg, 0.1, 0.5, 1), domain_error);
    CHECK_THROWS_AS(solve_pulse_width(cfg, 0.1, 0.5, 40, 0.0), domain_error);

    BumpConfig high = cheap_gabor();
    high.kappa = 10.0;  // level far above the hump: no admissible width
    CHECK_THROWS_AS(solve_pulse_width(high, 0.02, 0.6, 10), domain_error);
}

TEST_CASE("pulse profile and boundary stability at the threshold root") {
    const BumpConfig cfg = cheap_exponential();
    const auto roots = solve_pulse_width(cfg, 0.1, 0.2, 6, 1e-10);
    REQUIRE(roots.size() == 1);
    const double omega = roots[0];

    const BumpSolution sol = bump_profile(cfg, omega, 120);
    CHECK(sol.omega == omega);
    REQUIRE(sol.r.size() >= 100);
    // Grid is strictly increasing, starts at the center, contains the boundary.
    CHECK(sol.r[0] == 0.0);
    bool has_omega = false;
    for (Eigen::Index i = 1; i < sol.r.size(); ++i) {
        CHECK(sol.r[i] > sol.r[i - 1]);
        if (sol.r[i] == omega) has_omega = true;
    }
    CHECK(has_omega);
    // Monotone decay from the center for this kernel/input combination.
    for (Eigen::Index i = 1; i < sol.r.size(); ++i) CHECK(sol.V[i] < sol.V[i - 1] + 1e-12);

    // The attached boundary quantities satisfy their defining relations.
    CHECK(sol.D_omega == cfg.input_slope_abs(omega));
    CHECK(rel(sol.W0_omega, ring_w0(cfg.kernel, omega)) < 1e-15);
    CHECK(rel(sol.Mr, m_r_slope(cfg, omega, omega)) < 1e-15);
    CHECK(rel(sol.slope_abs, (sol.Mr + sol.D_omega) / cfg.alpha) < 1e-15);

    const StabilityReport rep = stability_check(cfg, sol);
    CHECK(rel(rep.n_prime_numeric, rep.n_prime_analytic) < 1e-3);
    // Root sits on the rising branch of the existence curve: unstable.
    CHECK(rep.n_prime_analytic > 0.0);
    CHECK_FALSE(rep.stable);
    CHECK_FALSE(rep.indeterminate);
    CHECK(rep.essential == -cfg.alpha);

    const ArrayXd beta = stability_spectrum(cfg, sol, 10);
    REQUIRE(beta.size() == 11);
    CHECK(rel(beta[0], rep.beta0) < 1e-14);
    CHECK(rep.beta0 > 0.0);  // the width mode grows
    // Positive kernel along the ring: the cosine weight can only lose mass.
    for (Eigen::Index n = 1; n < beta.size(); ++n) CHECK(beta[n] <= beta[0] + 1e-12);
    // Rearranged width-mode eigenvalue: (beta0 + alpha) |V'| = W0(omega).
    CHECK(rel((rep.beta0 + cfg.alpha) * sol.slope_abs, sol.W0_omega) < 1e-12);

    CHECK_THROWS_AS(bump_profile(cfg, 0.0, 120), domain_error);
    CHECK_THROWS_AS(bump_profile(cfg, omega, 10), domain_error);
    CHECK_THROWS_AS(stability_check(cfg, sol, 0.0), domain_error);
    CHECK_THROWS_AS(stability_check(cfg, sol, omega), domain_error);
    BumpSolution blank;
    CHECK_THROWS_AS(stability_spectrum(cfg, blank, 4), domain_error);
}

TEST_CASE("profile check rejects a width that solves nothing") {
    const BumpConfig cfg = cheap_gabor();
    CHECK_THROWS_AS(bump_profile(cfg, 0.3, 50), consistency_error);
}

TEST_CASE("coexisting widths of the input-free pulse carry opposite verdicts") {
    const BumpConfig cfg = cheap_gabor();
    const auto roots = solve_pulse_width(cfg, 0.02, 0.6, 80, 1e-9);
    REQUIRE(roots.size() == 2);
    CHECK(std::abs(roots[0] - 0.040512) < 1e-4);
    CHECK(std::abs(roots[1] - 0.110058) < 1e-4);

    const BumpSolution narrow = bump_profile(cfg, roots[0], 60);
    const BumpSolution wide = bump_profile(cfg, roots[1], 60);

    const StabilityReport rep_narrow = stability_check(cfg, narrow);
    CHECK(rep_narrow.n_prime_analytic > 0.0);
    CHECK_FALSE(rep_narrow.stable);
    CHECK(rel(rep_narrow.n_prime_numeric, rep_narrow.n_prime_analytic) < 1e-4);

    const StabilityReport rep_wide = stability_check(cfg, wide);
    CHECK(rep_wide.n_prime_analytic < 0.0);
    CHECK(rep_wide.stable);
    CHECK(rel(rep_wide.n_prime_numeric, rep_wide.n_prime_analytic) < 1e-4);

    // With no external input the problem is isometry-invariant, so sliding
    // the pulse costs nothing: the n = 1 mode is exactly neutral. This ties
    // the ring integral at n = 1 to the spectral M_r through
    // sinh(2 omega) C_1(omega) = M_r(omega).
    const ArrayXd beta_narrow = stability_spectrum(cfg, narrow, 6);
    const ArrayXd beta_wide = stability_spectrum(cfg, wide, 6);
    CHECK(std::abs(beta_narrow[1]) < 1e-6);
    CHECK(std::abs(beta_wide[1]) < 1e-6);

    // The stable pulse: every distortion mode decays except the neutral slide.
    CHECK(beta_wide[0] < 0.0);
    for (Eigen::Index n = 2; n < beta_wide.size(); ++n) CHECK(beta_wide[n] < 0.0);
    // The unstable one grows only through its width mode.
    CHECK(beta_narrow[0] > 0.0);
    for (Eigen::Index n = 2; n < beta_narrow.size(); ++n) CHECK(beta_narrow[n] < 0.0);
}

TEST_CASE("default configuration anchors: ball mass, width, boundary spectrum") {
    // Reference values computed once with lambda_max = 1920 and pinned; the
    // default grid reproduces them to the tolerances below.
    const BumpConfig cfg;
    CHECK(std::abs(m_of_r_omega(cfg, 0.18, 0.18) - 0.04047223) < 2e-6);

    // N(omega) crosses alpha kappa = 0.04 at omega ~ 0.1779.
    const double omega = 0.177939;
    const double n_here = m_of_r_omega(cfg, omega, omega) + cfg.input(omega);
    CHECK(std::abs(n_here - cfg.alpha * cfg.kappa) < 1e-5);

    // Boundary spectrum at that width: the width mode grows (the input is too
    // weak to pin this pulse), the slide mode is slightly damped by the input.
    const double mr = m_r_slope(cfg, omega, omega);
    const double d = cfg.input_slope_abs(omega);
    const double slope = (mr + d) / cfg.alpha;
    const double beta0 =
        -cfg.alpha + std::sinh(2.0 * omega) / slope * ring_cos_integral(cfg.kernel, omega, 0);
    const double beta1 =
        -cfg.alpha + std::sinh(2.0 * omega) / slope * ring_cos_integral(cfg.kernel, omega, 1);
    CHECK(std::abs(beta0 - 1.5393) < 5e-3);
    CHECK(std::abs(beta1 - (-0.0299)) < 2e-3);
    CHECK(beta0 > 0.0);
    CHECK(beta1 < 0.0);
}
