#include "hypfield/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "hypfield/bumps.hpp"
#include "hypfield/quadrature.hpp"
#include "hypfield/specfun.hpp"

namespace hypfield {

namespace {

constexpr double kPi = std::numbers::pi;

// Hyperbolic radius of the domain; HalfLine keeps its radius verbatim.
double domain_radius(const QuadratureSpec& spec) {
    if (!(spec.radius > 0.0)) throw domain_error("disk_integral: radius must be > 0");
    switch (spec.domain) {
        case QuadDomain::EuclideanBall:
            if (!(spec.radius < 1.0))
                throw domain_error("disk_integral: Euclidean ball radius must be < 1");
            return std::atanh(spec.radius);
        case QuadDomain::HyperbolicBall:
        case QuadDomain::HalfLine:
            return spec.radius;
    }
    throw domain_error("disk_integral: unknown domain");
}

// Points are materialized in disk coordinates, so the hyperbolic radius must
// stay below the range where tanh(r) rounds to 1.
void check_representable(double r) {
    if (r > 18.0)
        throw domain_error(
            "disk_integral: hyperbolic radius > 18 is not representable in disk coordinates");
}

double uniform01(std::mt19937_64& gen) { return (gen() >> 11) * 0x1.0p-53; }

std::mt19937_64 chunk_generator(std::uint64_t seed, std::uint32_t chunk) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     chunk};
    return std::mt19937_64(sq);
}

// Breakpoints on [lo, hi] whose panels shrink geometrically toward hi.
std::vector<double> graded_toward_end(double lo, double hi, double first, double ratio = 2.0) {
    std::vector<double> rev = graded_breakpoints(0.0, hi - lo, first, ratio);
    std::vector<double> pts(rev.size());
    for (std::size_t i = 0; i < rev.size(); ++i) pts[i] = hi - rev[rev.size() - 1 - i];
    return pts;
}

}  // namespace

QuadratureSpec QuadratureSpec::tensor(QuadDomain domain, double radius, int n_r, int n_theta) {
    if (n_r < 1 || n_theta < 1)
        throw domain_error("QuadratureSpec: node counts must be positive");
    QuadratureSpec s;
    s.scheme = QuadScheme::TensorGaussLegendre;
    s.domain = domain;
    s.radius = radius;
    s.n_r = n_r;
    s.n_theta = n_theta;
    return s;
}

QuadratureSpec QuadratureSpec::adaptive(QuadDomain domain, double radius, double tol) {
    if (!(tol > 0.0)) throw domain_error("QuadratureSpec: tolerance must be positive");
    QuadratureSpec s;
    s.scheme = QuadScheme::AdaptiveRadial;
    s.domain = domain;
    s.radius = radius;
    s.tol = tol;
    return s;
}

QuadratureSpec QuadratureSpec::monte_carlo(QuadDomain domain, double radius, long n_samples,
                                           std::uint64_t seed) {
    if (n_samples < 1) throw domain_error("QuadratureSpec: n_samples must be positive");
    QuadratureSpec s;
    s.scheme = QuadScheme::MonteCarlo;
    s.domain = domain;
    s.radius = radius;
    s.n_samples = n_samples;
    s.seed = seed;
    return s;
}

MonteCarloEstimate disk_integral_mc(const std::function<double(const DiskPoint<double>&)>& f,
                                    const QuadratureSpec& spec) {
    if (spec.scheme != QuadScheme::MonteCarlo)
        throw domain_error("disk_integral_mc: spec.scheme must be MonteCarlo");
    const double rmax = domain_radius(spec);
    check_representable(rmax);
    const bool half_line = spec.domain == QuadDomain::HalfLine;
    // Volume of the hyperbolic ball, or plain length for the half line.
    const double volume = half_line ? rmax : kPi * std::pow(std::sinh(rmax), 2);
    const double cosh_span = std::cosh(2.0 * rmax) - 1.0;

    const long n = spec.n_samples;
    const int n_chunks = static_cast<int>(std::min<long>(64, n));
    double sum = 0.0, sumsq = 0.0;
    long done = 0;
    for (int c = 0; c < n_chunks; ++c) {
        // Chunk boundaries are fixed by index, so the estimate is identical
        // whether chunks run serially or as parallel streams.
        const long lo = n * c / n_chunks, hi = n * (c + 1) / n_chunks;
        std::mt19937_64 gen = chunk_generator(spec.seed, static_cast<std::uint32_t>(c));
        for (long i = lo; i < hi; ++i) {
            double v;
            if (half_line) {
                v = f(from_polar(uniform01(gen) * rmax, 0.0));
            } else {
                // Inverse CDF of the radial density (1/2)sinh(2r):
                // P(r) = (cosh 2r - 1)/(cosh 2R - 1).
                const double r = 0.5 * std::acosh(1.0 + uniform01(gen) * cosh_span);
                const double theta = 2.0 * kPi * uniform01(gen);
                v = f(from_polar(r, theta));
            }
            sum += v;
            sumsq += v * v;
            ++done;
        }
    }
    MonteCarloEstimate est;
    est.n_samples = done;
    est.seed = spec.seed;
    const double mean = sum / static_cast<double>(done);
    est.value = volume * mean;
    if (done > 1) {
        const double var = std::max(0.0, sumsq / static_cast<double>(done) - mean * mean);
        est.std_error = volume * std::sqrt(var / static_cast<double>(done - 1));
    }
    return est;
}

double disk_integral(const std::function<double(const DiskPoint<double>&)>& f,
                     const QuadratureSpec& spec) {
    const double rmax = domain_radius(spec);
    check_representable(rmax);

    if (spec.domain == QuadDomain::HalfLine) {
        const auto g = [&](double r) { return f(from_polar(r, 0.0)); };
        switch (spec.scheme) {
            case QuadScheme::TensorGaussLegendre: {
                const Quadrature q = gauss_legendre(spec.n_r, 0.0, rmax);
                double s = 0.0;
                for (Eigen::Index i = 0; i < q.x.size(); ++i) s += q.w[i] * g(q.x[i]);
                return s;
            }
            case QuadScheme::AdaptiveRadial:
                return adaptive_integrate(g, 0.0, rmax, spec.tol);
            case QuadScheme::MonteCarlo:
                return disk_integral_mc(f, spec).value;
        }
        throw domain_error("disk_integral: unknown scheme");
    }

    // Ball domains in geodesic polar coordinates: dm = (1/2) sinh(2s) ds dtheta.
    const auto ring_mean = [&](double s, int n_theta) {
        return periodic_mean([&](double theta) { return f(from_polar(s, theta)); }, n_theta);
    };
    switch (spec.scheme) {
        case QuadScheme::TensorGaussLegendre: {
            const Quadrature q = gauss_legendre(spec.n_r, 0.0, rmax);
            double total = 0.0;
            for (Eigen::Index i = 0; i < q.x.size(); ++i)
                total += q.w[i] * 0.5 * std::sinh(2.0 * q.x[i]) * 2.0 * kPi *
                         ring_mean(q.x[i], spec.n_theta);
            return total;
        }
        case QuadScheme::AdaptiveRadial: {
            // Fixed angular resolution; the periodic midpoint rule is
            // spectrally accurate, so 512 nodes track the radial tolerance.
            const auto radial = [&](double s) {
                return 0.5 * std::sinh(2.0 * s) * 2.0 * kPi * ring_mean(s, 512);
            };
            return adaptive_integrate(radial, 0.0, rmax, spec.tol);
        }
        case QuadScheme::MonteCarlo:
            return disk_integral_mc(f, spec).value;
    }
    throw domain_error("disk_integral: unknown scheme");
}

double mexican_hat_log_factor(double sigma) {
    if (!(sigma > 0.0)) throw domain_error("mexican_hat_log_factor: sigma must be > 0");
    const double norm = 1.0 / std::sqrt(2.0 * kPi * sigma * sigma);
    const auto g = [&](double t) {
        const double u = std::log(t);
        return norm * std::exp(-u * u / (sigma * sigma)) / t;
    };
    // Integrate in the original variable (the reduction being verified is the
    // substitution u = log t); split at t = 1 where the integrand peaks.
    const double lo = std::exp(-10.0 * sigma), hi = std::exp(10.0 * sigma);
    return adaptive_integrate(g, lo, 1.0, 1e-12) + adaptive_integrate(g, 1.0, hi, 1e-12);
}

double mexican_hat_oracle(double sigma1, double sigma2, double amplitude) {
    if (!(sigma1 > 0.0) || !(sigma2 >= sigma1))
        throw domain_error("mexican_hat_oracle: need 0 < sigma1 <= sigma2");
    if (!(amplitude >= 0.0 && amplitude <= 1.0))
        throw domain_error("mexican_hat_oracle: amplitude must lie in [0, 1]");
    if (sigma2 > 2.0)
        throw domain_error(
            "mexican_hat_oracle: sigma > 2 rejected; the sinh(2x) growth pushes the "
            "integrand mass past the truncation radius");
    // Per lobe: sqrt(2) * pi * int_0^inf e^{-x^2/(2 sigma^2)} (1/2) sinh(2x) dx.
    // The integrand peaks at x = 2 sigma^2; fourteen widths past the peak the
    // Gaussian factor has won against e^{2x} by a margin of e^{-90} or better.
    const auto lobe = [](double sigma) {
        const double rmax = 2.0 * sigma * sigma + 14.0 * sigma;
        const auto g = [&](double x) {
            return std::exp(-x * x / (2.0 * sigma * sigma)) * 0.5 * std::sinh(2.0 * x);
        };
        return std::numbers::sqrt2 * kPi * adaptive_integrate(g, 0.0, rmax, 1e-13);
    };
    const double xi1 = lobe(sigma1);
    const double xi2 = (amplitude == 0.0) ? 0.0 : lobe(sigma2);
    return xi1 - amplitude * xi2;
}

double m_oracle(const RadialKernel& kernel, double r, double omega, int refine) {
    if (!(r >= 0.0)) throw domain_error("m_oracle: r must be >= 0");
    if (!(omega >= 0.0)) throw domain_error("m_oracle: omega must be >= 0");
    if (refine < 1) throw domain_error("m_oracle: refine must be >= 1");
    if (omega == 0.0) return 0.0;
    check_representable(std::max(r, omega));

    // Radial panels graded toward the kink of w(d(z, .)) at s = r (when the
    // kink lies inside the ball; otherwise graded toward the near edge).
    const double first_r = 0.02 / refine;
    std::vector<double> bps;
    if (r > 0.0 && r < omega) {
        bps = graded_toward_end(0.0, r, first_r);
        const std::vector<double> right = graded_breakpoints(r, omega, first_r);
        bps.insert(bps.end(), right.begin() + 1, right.end());
    } else if (r == 0.0) {
        bps = graded_breakpoints(0.0, omega, first_r);
    } else {
        bps = graded_toward_end(0.0, omega, first_r);
    }
    const Quadrature radial = composite_gauss_legendre(bps, 10);

    // Angular panels on [0, pi] (the integrand is even in the relative angle),
    // graded toward psi = 0 where the kink sits for s near r.
    const Quadrature angular =
        composite_gauss_legendre(graded_breakpoints(0.0, kPi, kPi / 128.0 / refine), 10);

    const DiskPoint<double> z = from_polar(r, 0.0);
    double total = 0.0;
    for (Eigen::Index i = 0; i < radial.x.size(); ++i) {
        const double s = radial.x[i];
        double ring = 0.0;
        for (Eigen::Index j = 0; j < angular.x.size(); ++j)
            ring += angular.w[j] * kernel(dist_disk(z, from_polar(s, angular.x[j])));
        total += radial.w[i] * 0.5 * std::sinh(2.0 * s) * 2.0 * ring;
    }
    return total;
}

double m_oracle(const RadialKernel& kernel, const DiskPoint<double>& z, double omega,
                int refine) {
    return m_oracle(kernel, to_polar(z).first, omega, refine);
}

double convolution_eigen_oracle(const RadialKernel& kernel, double lambda,
                                const std::vector<DiskPoint<double>>& testpoints,
                                int refine) {
    if (refine < 1) throw domain_error("convolution_eigen_oracle: refine must be >= 1");
    if (testpoints.empty()) return 0.0;
    const double rcut = kernel.r_max();
    const double wl = radial_fourier(kernel, lambda);

    // Geodesic polar quadrature about each test point: radial composite
    // Gauss-Legendre out to the kernel truncation radius, periodic midpoint
    // rule in the angle. refine shrinks the panels and adds angle nodes; the
    // refine = 1 base is deliberately coarse so convergence studies have room
    // before the roundoff floor.
    std::vector<double> bps = graded_breakpoints(0.0, std::min(2.0, rcut), 0.8 / refine, 1.0);
    if (rcut > 2.0) {
        const std::vector<double> far = graded_breakpoints(2.0, rcut, 2.0 / refine, 1.0);
        bps.insert(bps.end(), far.begin() + 1, far.end());
    }
    const Quadrature radial = composite_gauss_legendre(bps, 6);
    const int n_theta = 64 * refine;

    double worst = 0.0;
    for (const DiskPoint<double>& z : testpoints) {
        const std::complex<double> zc = z.c();
        double conv = 0.0;
        for (Eigen::Index i = 0; i < radial.x.size(); ++i) {
            const double s = radial.x[i];
            const double w_s = kernel(s);
            if (w_s == 0.0) continue;
            // Mobius translation taking 0 to z maps the circle of hyperbolic
            // radius s about the origin onto the geodesic circle about z.
            const double rho = std::tanh(s);
            const double ring = periodic_mean(
                [&](double theta) {
                    const std::complex<double> zeta = std::polar(rho, theta);
                    const std::complex<double> img = (zeta + zc) / (1.0 + std::conj(zc) * zeta);
                    return spherical_phi(lambda, std::atanh(std::abs(img)));
                },
                n_theta);
            conv += radial.w[i] * w_s * 0.5 * std::sinh(2.0 * s) * 2.0 * kPi * ring;
        }
        const double rhs = wl * spherical_phi(lambda, to_polar(z).first);
        double residual;
        if (std::abs(rhs) < 1e-250)
            residual = (std::abs(conv) < 1e-10) ? 0.0 : 1e300;
        else
            residual = std::abs(conv - rhs) / std::abs(rhs);
        worst = std::max(worst, residual);
    }
    return worst;
}

std::vector<OracleCheck> oracle_suite() {
    std::vector<OracleCheck> table;
    const auto push = [&](std::string name, double main_value, double oracle_value, double tol) {
        OracleCheck c;
        c.name = std::move(name);
        c.main_value = main_value;
        c.oracle_value = oracle_value;
        const double denom = std::abs(oracle_value) > 1e-30 ? std::abs(oracle_value) : 1.0;
        c.rel_err = std::abs(main_value - oracle_value) / denom;
        c.tol = tol;
        c.pass = c.rel_err <= tol;
        table.push_back(std::move(c));
    };

    const auto one = [](const DiskPoint<double>&) { return 1.0; };
    const double vol = kPi * std::pow(std::sinh(0.8), 2);
    push("ball_volume_tensor",
         disk_integral(one, QuadratureSpec::tensor(QuadDomain::HyperbolicBall, 0.8, 64, 64)),
         vol, 1e-12);
    push("ball_volume_adaptive",
         disk_integral(one, QuadratureSpec::adaptive(QuadDomain::HyperbolicBall, 0.8, 1e-10)),
         vol, 1e-10);
    {
        const MonteCarloEstimate mc = disk_integral_mc(
            one, QuadratureSpec::monte_carlo(QuadDomain::HyperbolicBall, 0.8, 100000, 20240811));
        // f == 1 has zero variance, so the estimate is exact.
        push("ball_volume_monte_carlo", mc.value, vol, 1e-12);
    }
    {
        const auto gaussian = [](const DiskPoint<double>& p) {
            const double d = to_polar(p).first;
            return std::exp(-d * d);
        };
        const double tensor = disk_integral(
            gaussian, QuadratureSpec::tensor(QuadDomain::HyperbolicBall, 1.5, 96, 16));
        const MonteCarloEstimate mc = disk_integral_mc(
            gaussian,
            QuadratureSpec::monte_carlo(QuadDomain::HyperbolicBall, 1.5, 2000000, 20240811));
        push("gaussian_tensor_vs_monte_carlo", tensor, mc.value,
             3.0 * mc.std_error / std::abs(mc.value));
    }
    push("log_factor_reduction", 1.0 / std::numbers::sqrt2, mexican_hat_log_factor(0.3), 1e-8);
    push("mexican_hat_mass(0.1,0.2,1)", mexican_hat_wbar(0.1, 0.2, 1.0),
         mexican_hat_oracle(0.1, 0.2, 1.0), 1e-4);
    push("mexican_hat_mass_cancellation", mexican_hat_wbar(0.15, 0.15, 1.0),
         mexican_hat_oracle(0.15, 0.15, 1.0), 1e-12);
    {
        const RadialKernel exp02 = RadialKernel::exponential(0.2);
        const auto absw = [&](const DiskPoint<double>& p) {
            return std::abs(exp02(to_polar(p).first));
        };
        push("l1_norm_exponential(0.2)", exp02.l1_norm(),
             disk_integral(absw, QuadratureSpec::tensor(QuadDomain::HyperbolicBall,
                                                        exp02.r_max(), 400, 8)),
             1e-8);
        std::vector<DiskPoint<double>> pts;
        pts.emplace_back(0.0, 0.0);
        pts.emplace_back(0.3, 0.0);
        pts.emplace_back(-0.2, 0.35);
        pts.emplace_back(0.1, -0.45);
        pts.emplace_back(-0.5, -0.1);
        push("convolution_eigenrelation(exp 0.2, lambda 0.7)",
             convolution_eigen_oracle(exp02, 0.7, pts), 0.0, 1e-3);
    }
    {
        const RadialKernel dog = RadialKernel::diff_gaussians(0.1, 0.2, 1.0);
        push("xi_invariance(diff_gaussians)", xi_invariance(dog, DiskPoint<double>(0.0, 0.0)),
             xi_invariance(dog, DiskPoint<double>(0.3, 0.2)), 1e-3);
    }
    push("spherical_series_vs_boundary(2,1)",
         spherical_phi(2.0, 1.0, SphericalEvalMethod::SeriesHypergeometric),
         spherical_phi(2.0, 1.0, SphericalEvalMethod::BoundaryIntegral), 1e-8);
    {
        BumpConfig cfg;
        cfg.kernel = RadialKernel::exponential(0.3);
        cfg.spectral = SpectralGrid::make(240.0, 1200);
        push("ball_mass_spectral_vs_quadrature(0.1,0.18)", m_of_r_omega(cfg, 0.1, 0.18),
             m_oracle(cfg.kernel, 0.1, 0.18, 2), 1e-3);
    }
    return table;
}

}  // namespace hypfield
