#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "hypfield/errors.hpp"

// 1D quadrature building blocks shared by the spectral transforms and the
// brute-force verification oracles: Gauss-Legendre rules of arbitrary order,
// panel composition, an accuracy-driven adaptive integrator, and the uniform
// midpoint rule for periodic integrands.

namespace hypfield {

struct Quadrature {
    Eigen::ArrayXd x, w;

    template <typename F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
        return s;
    }
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n, using the
// Chebyshev-like initial guess; accurate to machine precision for n  up to
// at least several thousand.
inline Quadrature gauss_legendre(int n) {
    if (n < 1) throw domain_error("gauss_legendre: n must be >= 1");
    Quadrature q{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.x[k] = -x;
        q.x[n - 1 - k] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.w[k] = w;
        q.w[n - 1 - k] = w;
    }
    if (n % 2 == 1) q.x[n / 2] = 0.0;
    return q;
}

inline Quadrature gauss_legendre(int n, double a, double b) {
    Quadrature q = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    q.x = mid + half * q.x;
    q.w *= half;
    return q;
}

// Composite rule over consecutive panels [pts[0], pts[1]], [pts[1], pts[2]], ...
inline Quadrature composite_gauss_legendre(const std::vector<double>& pts, int per_panel) {
    if (pts.size() < 2) throw domain_error("composite_gauss_legendre: need >= 2 breakpoints");
    const Quadrature base = gauss_legendre(per_panel);
    const int np = static_cast<int>(pts.size()) - 1;
    Quadrature q{Eigen::ArrayXd(np * per_panel), Eigen::ArrayXd(np * per_panel)};
    for (int p = 0; p < np; ++p) {
        const double mid = 0.5 * (pts[p] + pts[p + 1]), half = 0.5 * (pts[p + 1] - pts[p]);
        q.x.segment(p * per_panel, per_panel) = mid + half * base.x;
        q.w.segment(p * per_panel, per_panel) = half * base.w;
    }
    return q;
}

// Breakpoints (a, ..., b) whose spacing grows geometrically away from a;
// used where integrands have a sharp feature or reduced smoothness at a.
inline Quadrature composite_gauss_legendre(const Eigen::ArrayXd& pts, int per_panel) {
    return composite_gauss_legendre(
        std::vector<double>(pts.data(), pts.data() + pts.size()), per_panel);
}

inline std::vector<double> graded_breakpoints(double a, double b, double first, double ratio = 2.0) {
    std::vector<double> pts{a};
    double step = first;
    while (pts.back() + step < b) {
        pts.push_back(pts.back() + step);
        step *= ratio;
    }
    pts.push_back(b);
    return pts;
}

// Adaptive integrator: compares a 12-point and a 25-point Gauss rule per
// interval and bisects until the difference meets the tolerance. A few levels
// of unconditional subdivision guard against narrow features that both rules
// would otherwise step over in lockstep.
inline double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                 double tol, int max_depth = 40, int min_depth = 4) {
    static const Quadrature lo = gauss_legendre(12), hi = gauss_legendre(25);
    struct Rec {
        static double go(const std::function<double(double)>& f, double a, double b, double tol,
                         int depth, int force) {
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            if (force > 0)
                return go(f, a, mid, tol, depth - 1, force - 1) +
                       go(f, mid, b, tol, depth - 1, force - 1);
            double slo = 0.0, shi = 0.0;
            for (Eigen::Index i = 0; i < lo.x.size(); ++i)
                slo += half * lo.w[i] * f(mid + half * lo.x[i]);
            for (Eigen::Index i = 0; i < hi.x.size(); ++i)
                shi += half * hi.w[i] * f(mid + half * hi.x[i]);
            if (std::abs(shi - slo) <= tol * std::max(1.0, std::abs(shi)) || depth <= 0)
                return shi;
            return go(f, a, mid, tol, depth - 1, 0) + go(f, mid, b, tol, depth - 1, 0);
        }
    };
    if (!(b > a)) return 0.0;
    return Rec::go(f, a, b, tol, max_depth, min_depth);
}

// Uniform midpoint rule for 2pi-periodic integrands (spectrally accurate for
// analytic ones); returns the average, i.e. (1/2pi) * integral.
template <typename F>
double periodic_mean(F&& f, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f((i + 0.5) * 2.0 * std::numbers::pi / n);
    return s / n;
}

}  // namespace hypfield
