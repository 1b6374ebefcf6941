#include "hypfield/specfun.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace hypfield {

namespace detail {

std::complex<double> lgamma_complex(std::complex<double> z) {
    // Lanczos, g = 7, 9 coefficients; valid for Re z >= 0.5, extended by the
    // recurrence Gamma(z) = Gamma(z + n) / (z (z+1) ... (z+n-1)).
    static const double kCoef[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,       -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

    std::complex<double> shift(0.0, 0.0);
    while (z.real() < 0.5) {
        shift += std::log(z);
        z += 1.0;
    }
    std::complex<double> acc(kCoef[0], 0.0);
    for (int k = 1; k < 9; ++k) acc += kCoef[k] / (z - 1.0 + static_cast<double>(k));
    const std::complex<double> t = z + 6.5;
    return 0.5 * std::log(2.0 * M_PI) + (z - 0.5) * std::log(t) - t + std::log(acc) -
           shift;
}

namespace {

constexpr int kMaxTerms = 200000;
constexpr double kOverflowGuard = 1e250;

// Direct series for F(a, conj(a); c; x): every coefficient
// |.(a)_n|^2 / ((c)_n n!) is a positive real, so only x's sign alternates.
Hyp2F1Result series_conjugate(double a_re, double a_im, double c, double x) {
    double term = 1.0, sum = 1.0, max_abs = 1.0;
    for (int n = 0; n < kMaxTerms; ++n) {
        const double num = (a_re + n) * (a_re + n) + a_im * a_im;
        term *= num / ((c + n) * (n + 1.0)) * x;
        sum += term;
        max_abs = std::max(max_abs, std::abs(term));
        if (std::abs(term) > kOverflowGuard)
            throw convergence_error("hyp2f1: series terms overflow");
        if (std::abs(term) < 1e-17 * std::max(std::abs(sum), 1e-300) && n > 4) {
            Hyp2F1Result out;
            out.value = sum;
            out.rel_err_est = 2.2e-16 * max_abs / std::max(std::abs(sum), 1e-300);
            out.degraded = out.rel_err_est > 1e-9;
            return out;
        }
    }
    throw convergence_error("hyp2f1: conjugate series did not converge");
}

// Generic complex Gauss series F(p, q; r; y).
struct ComplexSeries {
    std::complex<double> value;
    double rel_err_est;
};

ComplexSeries series_complex(std::complex<double> p, std::complex<double> q,
                             std::complex<double> r, std::complex<double> y) {
    std::complex<double> term(1.0, 0.0), sum(1.0, 0.0);
    double max_abs = 1.0;
    for (int n = 0; n < kMaxTerms; ++n) {
        const double dn = static_cast<double>(n);
        term *= (p + dn) * (q + dn) / ((r + dn) * (dn + 1.0)) * y;
        sum += term;
        max_abs = std::max(max_abs, std::abs(term));
        if (std::abs(term) > kOverflowGuard)
            throw convergence_error("hyp2f1: series terms overflow");
        if (std::abs(term) < 1e-17 * std::max(std::abs(sum), 1e-300) && n > 4)
            return {sum, 2.2e-16 * max_abs / std::max(std::abs(sum), 1e-300)};
    }
    throw convergence_error("hyp2f1: complex series did not converge");
}

// 1/x connection formula, valid for a_im != 0: with a = a_re + i a_im and
// b = conj(a), F(a, b; c; x) = 2 Re[ G (-x)^{-a} F(a, a-c+1; a-b+1; 1/x) ],
// G = Gamma(c) Gamma(b-a) / (Gamma(b) Gamma(c-a)).
Hyp2F1Result connection_large_x(double a_re, double a_im, double c, double x) {
    const std::complex<double> a(a_re, a_im), b(a_re, -a_im), cc(c, 0.0);
    const std::complex<double> lg = lgamma_complex(cc) + lgamma_complex(b - a) -
                                    lgamma_complex(b) - lgamma_complex(cc - a);
    const ComplexSeries f = series_complex(a, a - cc + 1.0, a - b + 1.0, 1.0 / x);
    const std::complex<double> t =
        std::exp(lg - a * std::log(-x)) * f.value;
    Hyp2F1Result out;
    out.value = 2.0 * t.real();
    const double scale = 2.0 * std::abs(t) / std::max(std::abs(out.value), 1e-300);
    out.rel_err_est = scale * (f.rel_err_est + 1e-14);
    out.degraded = out.rel_err_est > 1e-9;
    return out;
}

Hyp2F1Result eval_branches(double a_re, double a_im, double c, double x);

// Near a_im = 0 the connection formula has a removable 0/0; F is even in
// a_im, so interpolate quadratically in a_im^2 from three safe offsets.
Hyp2F1Result interp_small_imag(double a_re, double a_im, double c, double x) {
    const double h[3] = {5e-4, 1e-3, 1.5e-3};
    double f[3], t[3];
    double err = 0.0;
    for (int k = 0; k < 3; ++k) {
        Hyp2F1Result rk = connection_large_x(a_re, h[k], c, x);
        f[k] = rk.value;
        t[k] = h[k] * h[k];
        err = std::max(err, rk.rel_err_est);
    }
    const double t0 = a_im * a_im;
    double val = 0.0;
    for (int k = 0; k < 3; ++k) {
        double lk = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != k) lk *= (t0 - t[j]) / (t[k] - t[j]);
        val += lk * f[k];
    }
    Hyp2F1Result out;
    out.value = val;
    out.rel_err_est = err + 1e-10;  // interpolation residual bound
    out.degraded = out.rel_err_est > 1e-8;
    return out;
}

Hyp2F1Result eval_branches(double a_re, double a_im, double c, double x) {
    if (x == 0.0) return {1.0, 0.0, false};
    if (x >= -0.5) return series_conjugate(a_re, a_im, c, x);
    if (x >= -2.0) {
        // Pfaff: F(a, b; c; x) = (1-x)^{-a} F(a, c-b; c; x/(x-1)), argument in [1/3, 2/3].
        const std::complex<double> a(a_re, a_im), cc(c, 0.0);
        const std::complex<double> cb(c - a_re, a_im);  // c - conj(a)
        const ComplexSeries f = series_complex(a, cb, cc, x / (x - 1.0));
        const std::complex<double> t = std::exp(-a * std::log1p(-x)) * f.value;
        Hyp2F1Result out;
        out.value = t.real();
        out.rel_err_est =
            std::abs(t) / std::max(std::abs(t.real()), 1e-300) * (f.rel_err_est + 1e-15);
        out.degraded = out.rel_err_est > 1e-9;
        return out;
    }
    if (std::abs(a_im) >= 5e-4) return connection_large_x(a_re, a_im, c, x);
    return interp_small_imag(a_re, a_im, c, x);
}

// Node count for the boundary integral: the phase lambda/2 * log(...) sweeps
// O(lambda * r) cycles, and the integrand concentrates near theta = 0 in a
// spike of width ~ e^{-2r} which the midpoint rule must resolve. (Beyond
// r ~ 4.5 the cap bites, but there the series route has no cancellation and
// Auto never reaches the boundary integral.)
int boundary_nodes(double lambda_max_abs, double r) {
    const double osc = 48.0 * (lambda_max_abs + 6.0) * (r + 1.0) / 4.0;
    const double spike = 8.0 * M_PI * std::exp(2.0 * r);
    const double want = std::max(osc, spike);
    int n = 1024;
    while (n < want && n < (1 << 17)) n <<= 1;
    return n;
}

}  // namespace
}  // namespace detail

Hyp2F1Result hyp2f1_conjugate_ex(double a_re, double a_im, double c, double x) {
    if (!(x <= 0.0)) throw domain_error("hyp2f1_conjugate: requires x <= 0");
    if (c <= 0.0 && c == std::floor(c))
        throw domain_error("hyp2f1_conjugate: c must not be a non-positive integer");
    return detail::eval_branches(a_re, std::abs(a_im), c, x);
}

double hyp2f1_conjugate(double a_re, double a_im, double c, double x) {
    return hyp2f1_conjugate_ex(a_re, a_im, c, x).value;
}

namespace {

// Shared theta sweep for the boundary integrals at radius r: returns midpoint
// samples of L = log(cosh 2r - sinh 2r cos theta) and lets callers combine
// them with their own lambda-dependent phase e^{-i lambda L / 2}.
struct BoundarySweep {
    Eigen::ArrayXd log_base;   // L(theta_k)
    Eigen::ArrayXd cos_theta;  // cos(theta_k)
    double inv_n;
};

BoundarySweep boundary_sweep(double r, double lambda_max_abs) {
    const int n = hypfield::detail::boundary_nodes(lambda_max_abs, r);
    BoundarySweep s;
    s.log_base.resize(n);
    s.cos_theta.resize(n);
    s.inv_n = 1.0 / n;
    const double c2 = std::cosh(2.0 * r), s2 = std::sinh(2.0 * r);
    for (int k = 0; k < n; ++k) {
        const double theta = (k + 0.5) * (2.0 * M_PI / n);
        const double ct = std::cos(theta);
        s.cos_theta[k] = ct;
        s.log_base[k] = std::log(c2 - s2 * ct);
    }
    return s;
}

}  // namespace

Eigen::ArrayXd phi00_batch(const Eigen::ArrayXd& lambdas, double r) {
    if (r < 0.0) throw domain_error("phi00_batch: radius must be nonnegative");
    const int nl = static_cast<int>(lambdas.size());
    Eigen::ArrayXd out(nl);
    if (r < 1e-14) {
        out.setOnes();
        return out;
    }
    // Phi_lambda = (1/2pi) int (cosh 2r - sinh 2r cos th)^{-(1+i lambda)/2} dth
    //            = mean_k e^{-L_k/2} cos(lambda L_k / 2).
    const BoundarySweep s = boundary_sweep(r, lambdas.abs().maxCoeff());
    const Eigen::ArrayXd amp = (-0.5 * s.log_base).exp();
    for (int j = 0; j < nl; ++j) {
        const double half_l = 0.5 * lambdas[j];
        double acc = 0.0;
        for (Eigen::Index k = 0; k < s.log_base.size(); ++k)
            acc += amp[k] * std::cos(half_l * s.log_base[k]);
        out[j] = acc * s.inv_n;
    }
    return out;
}

Eigen::ArrayXd phi11_batch(const Eigen::ArrayXd& lambdas, double omega) {
    if (omega < 0.0) throw domain_error("phi11_batch: radius must be nonnegative");
    const int nl = static_cast<int>(lambdas.size());
    Eigen::ArrayXd out(nl);
    if (omega < 1e-6) {
        // Series is cheap and stable here (|x| <= omega^2).
        const double x = -std::pow(std::sinh(omega), 2);
        for (int j = 0; j < nl; ++j)
            out[j] = hyp2f1_conjugate(1.5, 0.5 * lambdas[j], 2.0, x);
        return out;
    }
    // Differentiate the boundary integral in r:
    //   d/dr Phi = -(1+i lambda)/(2pi) int (sinh 2r - cosh 2r cos th) B^{-(3+i lambda)/2} dth,
    // and d/dr Phi = -(1/4) sinh(2r) (1 + lambda^2) Phi^{(1,1)} (contiguous relation
    // for F with the conjugate parameters), so divide out the prefactor.
    const BoundarySweep s = boundary_sweep(omega, lambdas.abs().maxCoeff());
    const double c2 = std::cosh(2.0 * omega), s2 = std::sinh(2.0 * omega);
    const Eigen::ArrayXd pre =
        (s2 - c2 * s.cos_theta) * (-1.5 * s.log_base).exp();
    for (int j = 0; j < nl; ++j) {
        const double half_l = 0.5 * lambdas[j];
        double re = 0.0, im = 0.0;
        for (Eigen::Index k = 0; k < s.log_base.size(); ++k) {
            const double ph = half_l * s.log_base[k];
            re += pre[k] * std::cos(ph);
            im -= pre[k] * std::sin(ph);
        }
        re *= s.inv_n;
        im *= s.inv_n;
        // dPhi = -(1 + i lambda) (re + i im); real part = -(re - lambda * im).
        const double dphi_re = -(re - lambdas[j] * im);
        out[j] = -dphi_re / (0.25 * s2 * (1.0 + lambdas[j] * lambdas[j]));
    }
    return out;
}

double spherical_phi(double lambda, double r, SphericalEvalMethod method) {
    return spherical_phi_ab(lambda, 0, 0, r, method);
}

double spherical_phi_ab(double lambda, int alpha, int beta, double omega,
                        SphericalEvalMethod method) {
    if (omega < 0.0) throw domain_error("spherical_phi: radius must be nonnegative");
    if (alpha < 0 || beta < 0) throw domain_error("spherical_phi: indices must be >= 0");
    if (omega == 0.0) return 1.0;

    const double rho = alpha + beta + 1.0;
    const double x = -std::pow(std::sinh(omega), 2);
    const bool boundary_supported =
        (alpha == 0 && beta == 0) || (alpha == 1 && beta == 1);

    auto by_boundary = [&]() -> double {
        Eigen::ArrayXd one(1);
        one[0] = lambda;
        return alpha == 0 ? phi00_batch(one, omega)[0] : phi11_batch(one, omega)[0];
    };

    switch (method) {
        case SphericalEvalMethod::SeriesHypergeometric:
            return hyp2f1_conjugate(0.5 * rho, 0.5 * lambda, alpha + 1.0, x);
        case SphericalEvalMethod::BoundaryIntegral:
            if (!boundary_supported)
                throw domain_error(
                    "spherical_phi: boundary integral implemented for (0,0) and (1,1) only");
            return by_boundary();
        case SphericalEvalMethod::Auto:
        default: {
            try {
                Hyp2F1Result res =
                    hyp2f1_conjugate_ex(0.5 * rho, 0.5 * lambda, alpha + 1.0, x);
                if (!res.degraded) return res.value;
            } catch (const convergence_error&) {
                if (!boundary_supported) throw;
            }
            if (!boundary_supported)
                throw convergence_error(
                    "spherical_phi: series degraded and no boundary fallback for these indices");
            return by_boundary();
        }
    }
}

SpectralGrid SpectralGrid::make(double lambda_max, int n_lambda) {
    if (!(lambda_max > 0.0)) throw domain_error("SpectralGrid: lambda_max must be positive");
    if (n_lambda < 8) throw domain_error("SpectralGrid: need at least 8 nodes");
    SpectralGrid g;
    g.lambda_max = lambda_max;
    g.n_lambda = n_lambda;
    Quadrature q = gauss_legendre(n_lambda, 0.0, lambda_max);
    g.nodes = q.x;
    g.weights = q.w;
    return g;
}

Eigen::ArrayXd SpectralGrid::plancherel_weights() const {
    return weights * nodes * (M_PI / 2.0 * nodes).tanh();
}

double radial_fourier_profile(const std::function<double(double)>& w, double rmax,
                              double lambda) {
    if (!(rmax > 0.0)) throw domain_error("radial_fourier: rmax must be positive");
    // pi int_0^rmax w(r) Phi_lambda(tanh r) sinh(2r) dr, with panels sized to
    // resolve Phi's oscillation (wavelength ~ 2pi/lambda in r).
    const int panels = std::max(
        8, static_cast<int>(std::ceil(rmax * std::max(std::abs(lambda), 1.0) / 2.0)));
    Quadrature q = composite_gauss_legendre(
        Eigen::ArrayXd::LinSpaced(panels + 1, 0.0, rmax), 12);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < q.x.size(); ++k) {
        const double r = q.x[k];
        acc += q.w[k] * w(r) * spherical_phi(lambda, r) * std::sinh(2.0 * r);
    }
    return M_PI * acc;
}

Eigen::ArrayXd radial_fourier_abel(const std::function<double(double)>& w, double rmax,
                                   const Eigen::ArrayXd& lambdas) {
    if (!(rmax > 0.0)) throw domain_error("radial_fourier: rmax must be positive");
    const double lam_max = lambdas.size() ? std::max(lambdas.abs().maxCoeff(), 1.0) : 1.0;

    // A(y) = 2 int_0^{umax} w(acosh sqrt(cosh^2 y + u^2)) du; the distance from
    // the origin to n_u a_y . O is acosh sqrt(cosh^2 y + u^2), so w vanishes
    // once that exceeds rmax, i.e. beyond umax = sqrt(cosh^2 rmax - cosh^2 y).
    const double cosh_rmax = std::cosh(rmax);
    auto abel = [&](double y) -> double {
        const double cy = std::cosh(y);
        const double head = cosh_rmax * cosh_rmax - cy * cy;
        if (head <= 0.0) return 0.0;
        const double umax = std::sqrt(head);
        // Graded panels in u. Two scales to resolve: the kernel's own width
        // (the grading passes through it), and the corner of
        // d = acosh sqrt(cosh^2 y + u^2) ~ sqrt(y^2 + u^2) at u ~ y, which
        // sharpens as y -> 0, so the first panel shrinks with y.
        const double first =
            std::min(std::max(1e-4, std::min(0.02, 0.5 * y)), umax);
        Quadrature q =
            composite_gauss_legendre(graded_breakpoints(0.0, umax, first), 16);
        double acc = 0.0;
        for (Eigen::Index k = 0; k < q.x.size(); ++k) {
            const double u = q.x[k];
            acc += q.w[k] * w(std::acosh(std::sqrt(cy * cy + u * u)));
        }
        return 2.0 * acc;
    };

    // W~(lambda) = 2 int_0^rmax A(y) cos(lambda y) dy. Panels at most a half
    // wavelength wide, plus graded refinement toward the weak log-type kink
    // of A at y = 0.
    const double width = std::min({M_PI / (2.0 * lam_max), 0.25, rmax});
    std::vector<double> bp = graded_breakpoints(0.0, width, width / 64.0);
    for (double x = width + width; x < rmax; x += width) bp.push_back(x);
    bp.push_back(rmax);
    Quadrature q = composite_gauss_legendre(bp, 12);
    Eigen::ArrayXd ay(q.x.size());
    for (Eigen::Index k = 0; k < q.x.size(); ++k) ay[k] = abel(q.x[k]);
    const Eigen::ArrayXd wa = q.w * ay;

    Eigen::ArrayXd out(lambdas.size());
    for (Eigen::Index j = 0; j < lambdas.size(); ++j)
        out[j] = 2.0 * (wa * (lambdas[j] * q.x).cos()).sum();
    return out;
}

double radial_fourier_invert(const SpectralGrid& grid, const Eigen::ArrayXd& samples,
                             double r) {
    if (samples.size() != grid.nodes.size())
        throw domain_error("radial_fourier_invert: sample count does not match grid");
    // (1/4pi) int_R W~ Phi lambda tanh(pi lambda/2) dlambda; integrand even.
    const Eigen::ArrayXd phi = phi00_batch(grid.nodes, r);
    return 2.0 * (grid.plancherel_weights() * samples * phi).sum() / (4.0 * M_PI);
}

}  // namespace hypfield
