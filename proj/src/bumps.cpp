#include "hypfield/bumps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "hypfield/errors.hpp"
#include "hypfield/quadrature.hpp"

namespace hypfield {

namespace {

using Eigen::ArrayXd;

unsigned env_thread_count() {
    if (const char* s = std::getenv("HYPFIELD_THREADS")) {
        long v = std::strtol(s, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs fn(k) for k = 0..n-1, strided across threads. Every index writes its
// own output slot, so the result does not depend on the thread count.
void parallel_for(int n, const std::function<void(int)>& fn) {
    unsigned want = std::min<unsigned>(env_thread_count(), static_cast<unsigned>(n));
    if (want <= 1) {
        for (int k = 0; k < n; ++k) fn(k);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(want);
    for (unsigned t = 0; t < want; ++t)
        pool.emplace_back([&, t] {
            for (int k = static_cast<int>(t); k < n; k += static_cast<int>(want)) fn(k);
        });
    for (auto& th : pool) th.join();
}

// Kernel transform samples on the spectral grid plus the Plancherel weights,
// with a decay guard: if |W~(lambda)| lambda tanh(pi lambda/2) has not dropped
// three decades below its peak by the last 5% of nodes, the grid truncates a
// still-active tail and every spectral sum built from it is suspect.
struct SpectralCtx {
    ArrayXd wl;  // W~ at the nodes
    ArrayXd pl;  // GL weight * lambda * tanh(pi lambda / 2)
};

SpectralCtx spectral_context(const BumpConfig& cfg) {
    SpectralCtx ctx;
    ctx.wl = cfg.kernel.spectral_samples(cfg.spectral);
    ctx.pl = cfg.spectral.plancherel_weights();
    const ArrayXd& nodes = cfg.spectral.nodes;
    ArrayXd density =
        (ctx.wl * nodes * (std::numbers::pi / 2.0 * nodes).tanh()).abs();
    Eigen::Index n = density.size();
    Eigen::Index tail = std::max<Eigen::Index>(1, n / 20);
    double tail_max = density.tail(tail).maxCoeff();
    double global_max = density.maxCoeff();
    if (tail_max > 1e-3 * global_max)
        throw resolution_error(
            "spectral grid truncates an undecayed kernel transform; "
            "increase lambda_max");
    return ctx;
}

void check_radius(double r, const char* what) {
    if (!(r >= 0.0)) throw domain_error(std::string(what) + ": radius must be >= 0");
}

double n_of_omega(const BumpConfig& cfg, double omega) {
    return m_of_r_omega(cfg, omega, omega) + cfg.input(omega);
}

// Geometrically graded trig quadrature shared by the ring integrals.
const Quadrature& ring_rule() {
    static const Quadrature q = gauss_legendre(256, 0.0, std::numbers::pi);
    return q;
}

double ring_trig_integral(const RadialKernel& kernel, double omega, int n, bool sine) {
    check_radius(omega, "ring integral");
    if (n < 0) throw domain_error("ring integral: mode index must be >= 0");
    const Quadrature& q = ring_rule();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < q.x.size(); ++k) {
        double w = kernel(ring_distance(omega, q.x[k]));
        double trig = sine ? std::sin(2.0 * n * q.x[k]) : std::cos(2.0 * n * q.x[k]);
        acc += q.w[k] * w * trig;
    }
    return acc;
}

// Radial grid for the pulse profile: uniform backbone plus a geometric
// cluster straddling omega, where V crosses the threshold.
ArrayXd profile_grid(double omega, double rmax, int n) {
    int per_side = n / 5;
    int n_uniform = n - 2 * per_side - 1;
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n_uniform; ++i)
        pts.push_back(rmax * static_cast<double>(i) / (n_uniform - 1));
    double span = 0.9 * std::min(omega, rmax - omega);
    double dmin = 1e-6 * omega;
    double ratio = std::pow(dmin / span, 1.0 / (per_side - 1));
    double d = span;
    for (int j = 0; j < per_side; ++j, d *= ratio) {
        pts.push_back(omega - d);
        pts.push_back(omega + d);
    }
    pts.push_back(omega);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return Eigen::Map<const ArrayXd>(pts.data(), static_cast<Eigen::Index>(pts.size()));
}

}  // namespace

double BumpConfig::input(double r) const {
    return I0 * std::exp(-r * r / (2.0 * sigma * sigma));
}

double BumpConfig::input_slope_abs(double r) const {
    return I0 * (r / (sigma * sigma)) * std::exp(-r * r / (2.0 * sigma * sigma));
}

double m_of_r_omega(const BumpConfig& cfg, double r, double omega) {
    ArrayXd rs(1);
    rs[0] = r;
    return m_of_r_omega(cfg, rs, omega)[0];
}

Eigen::ArrayXd m_of_r_omega(const BumpConfig& cfg, const Eigen::ArrayXd& rs, double omega) {
    check_radius(omega, "m_of_r_omega");
    for (Eigen::Index i = 0; i < rs.size(); ++i) check_radius(rs[i], "m_of_r_omega");
    if (omega == 0.0) return ArrayXd::Zero(rs.size());

    SpectralCtx ctx = spectral_context(cfg);
    double sh = std::sinh(omega), ch = std::cosh(omega);
    double prefactor = 0.5 * sh * sh * ch * ch;  // (1/4) * 2 for the even integrand
    ArrayXd base = ctx.wl * ctx.pl * phi11_batch(cfg.spectral.nodes, omega);

    ArrayXd out(rs.size());
    parallel_for(static_cast<int>(rs.size()), [&](int k) {
        out[k] = prefactor * (phi00_batch(cfg.spectral.nodes, rs[k]) * base).sum();
    });
    return out;
}

double m_r_slope(const BumpConfig& cfg, double r, double omega) {
    check_radius(r, "m_r_slope");
    check_radius(omega, "m_r_slope");
    if (omega == 0.0 || r == 0.0) return 0.0;

    SpectralCtx ctx = spectral_context(cfg);
    const ArrayXd& nodes = cfg.spectral.nodes;
    double s2w = std::sinh(2.0 * omega);
    double prefactor = (1.0 / 32.0) * s2w * s2w * std::sinh(2.0 * r);  // (1/64) * 2
    ArrayXd integrand = ctx.wl * ctx.pl * (1.0 + nodes.square()) *
                        phi11_batch(nodes, r) * phi11_batch(nodes, omega);
    return prefactor * integrand.sum();
}

double psi_lambda(double lambda, double omega) {
    check_radius(omega, "psi_lambda");
    if (omega == 0.0) return 0.0;
    double sh = std::sinh(omega), ch = std::cosh(omega);
    return std::numbers::pi * sh * sh * ch * ch * spherical_phi_ab(lambda, 1, 1, omega);
}

double ring_distance(double omega, double theta_prime) {
    check_radius(omega, "ring_distance");
    double t = std::tanh(omega);
    double s = std::sin(theta_prime);
    double denom = std::hypot((1.0 - t * t), 2.0 * t * s);
    return std::atanh(2.0 * t * s / denom);
}

double ring_cos_integral(const RadialKernel& kernel, double omega, int n) {
    return ring_trig_integral(kernel, omega, n, false);
}

double ring_sin_residual(const RadialKernel& kernel, double omega, int n) {
    return ring_trig_integral(kernel, omega, n, true);
}

double ring_w0(const RadialKernel& kernel, double omega) {
    return std::sinh(2.0 * omega) * ring_cos_integral(kernel, omega, 0);
}

std::vector<CurvePoint> existence_curve(const BumpConfig& cfg, const Eigen::ArrayXd& omegas) {
    for (Eigen::Index i = 0; i < omegas.size(); ++i) check_radius(omegas[i], "existence_curve");
    std::vector<CurvePoint> out(static_cast<std::size_t>(omegas.size()));
    // Validate the spectral grid once up front so worker threads cannot throw.
    spectral_context(cfg);
    parallel_for(static_cast<int>(omegas.size()), [&](int k) {
        CurvePoint& p = out[static_cast<std::size_t>(k)];
        p.omega = omegas[k];
        p.M = m_of_r_omega(cfg, omegas[k], omegas[k]);
        p.I = cfg.input(omegas[k]);
        p.N = p.M + p.I;
    });
    return out;
}

std::vector<double> solve_pulse_width(const BumpConfig& cfg, double lo, double hi, int n_scan,
                                      double tol) {
    if (!(lo > 0.0) || !(hi > lo)) throw domain_error("solve_pulse_width: need 0 < lo < hi");
    if (n_scan < 2) throw domain_error("solve_pulse_width: need at least 2 scan samples");
    if (!(tol > 0.0)) throw domain_error("solve_pulse_width: tol must be > 0");

    const double level = cfg.alpha * cfg.kappa;
    auto curve = existence_curve(cfg, ArrayXd::LinSpaced(n_scan, lo, hi));

    std::vector<double> roots;
    for (int k = 0; k + 1 < n_scan; ++k) {
        double fa = curve[k].N - level, fb = curve[k + 1].N - level;
        if (fa == 0.0) {
            roots.push_back(curve[k].omega);
            continue;
        }
        if ((fa < 0.0) == (fb < 0.0)) continue;
        double a = curve[k].omega, b = curve[k + 1].omega;
        while (b - a > tol) {
            double mid = 0.5 * (a + b);
            double fm = n_of_omega(cfg, mid) - level;
            if (fm == 0.0) {
                a = b = mid;
                break;
            }
            if ((fa < 0.0) == (fm < 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        roots.push_back(0.5 * (a + b));
    }
    double fend = curve.back().N - level;
    if (fend == 0.0) roots.push_back(curve.back().omega);
    if (roots.empty())
        throw domain_error("solve_pulse_width: no sign change of N(omega) - alpha kappa "
                           "in the bracket");
    return roots;
}

BumpSolution bump_profile(const BumpConfig& cfg, double omega, int n_r) {
    if (!(omega > 0.0)) throw domain_error("bump_profile: omega must be > 0");
    if (n_r < 50) throw domain_error("bump_profile: need at least 50 radial points");

    BumpSolution sol;
    sol.omega = omega;
    double rmax = std::max(5.0 * omega, 3.0);
    sol.r = profile_grid(omega, rmax, n_r);
    sol.V = (m_of_r_omega(cfg, sol.r, omega) + sol.r.unaryExpr([&](double r) {
                 return cfg.input(r);
             })) /
            cfg.alpha;

    // Threshold-crossing structure: kappa is hit exactly at omega, from above.
    for (Eigen::Index i = 0; i < sol.r.size(); ++i) {
        if (sol.r[i] == omega) {
            if (std::abs(sol.V[i] - cfg.kappa) > 1e-6)
                throw consistency_error("bump_profile: V(omega) misses kappa; omega is "
                                        "not a width satisfying N(omega) = alpha kappa");
        } else if (sol.r[i] < omega) {
            if (!(sol.V[i] > cfg.kappa))
                throw consistency_error("bump_profile: V <= kappa inside the pulse");
        } else if (!(sol.V[i] < cfg.kappa)) {
            throw consistency_error("bump_profile: V >= kappa outside the pulse");
        }
    }
    double far = (m_of_r_omega(cfg, 5.0, omega) + cfg.input(5.0)) / cfg.alpha;
    if (std::abs(far) > 1e-4)
        throw consistency_error("bump_profile: V(5) has not decayed");

    sol.Mr = m_r_slope(cfg, omega, omega);
    sol.W0_omega = ring_w0(cfg.kernel, omega);
    sol.D_omega = cfg.input_slope_abs(omega);
    sol.slope_abs = (sol.Mr + sol.D_omega) / cfg.alpha;
    return sol;
}

Eigen::ArrayXd stability_spectrum(const BumpConfig& cfg, const BumpSolution& sol, int n_max) {
    if (!(sol.omega > 0.0)) throw domain_error("stability_spectrum: invalid solution");
    if (!(sol.slope_abs > 0.0))
        throw domain_error("stability_spectrum: |V'(omega)| must be positive");
    if (n_max < 0) throw domain_error("stability_spectrum: n_max must be >= 0");

    double scale = std::sinh(2.0 * sol.omega) / sol.slope_abs;
    ArrayXd beta(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        beta[n] = -cfg.alpha + scale * ring_cos_integral(cfg.kernel, sol.omega, n);
    return beta;
}

StabilityReport stability_check(const BumpConfig& cfg, const BumpSolution& sol, double h) {
    if (!(sol.omega > 0.0)) throw domain_error("stability_check: invalid solution");
    if (!(h > 0.0) || h >= sol.omega) throw domain_error("stability_check: bad step h");

    StabilityReport rep;
    rep.w0 = ring_w0(cfg.kernel, sol.omega);
    rep.mr = m_r_slope(cfg, sol.omega, sol.omega);
    rep.d = cfg.input_slope_abs(sol.omega);
    rep.n_prime_analytic = rep.w0 - rep.mr - rep.d;
    rep.n_prime_numeric =
        (n_of_omega(cfg, sol.omega + h) - n_of_omega(cfg, sol.omega - h)) / (2.0 * h);
    rep.stable = rep.d > rep.w0 - rep.mr;
    rep.essential = -cfg.alpha;
    double slope = (rep.mr + rep.d) / cfg.alpha;
    rep.beta0 = -cfg.alpha + std::sinh(2.0 * sol.omega) / slope *
                                 ring_cos_integral(cfg.kernel, sol.omega, 0);

    if (std::abs(rep.n_prime_numeric) < 1e-8) {
        rep.indeterminate = true;  // too close to a fold to trust the sign
    } else if ((rep.n_prime_numeric < 0.0) != (rep.n_prime_analytic < 0.0)) {
        throw consistency_error(
            "stability_check: numerical N'(omega) contradicts W0 - Mr - D");
    }
    return rep;
}

}  // namespace hypfield
