#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "hypfield/errors.hpp"

// Explicit embedded Runge-Kutta (4,5) integration (Dormand-Prince pair) with
// proportional-integral step-size control, plus a fixed-step mode for
// convergence studies. The state is a plain Eigen array; the right-hand side
// writes its result in place so large fields avoid temporaries.

namespace hypfield {

using OdeRhs = std::function<void(double, const Eigen::ArrayXd&, Eigen::ArrayXd&)>;

struct OdeOptions {
    double atol = 1e-8;
    double rtol = 1e-6;
    double dt_init = 0.0;   // 0 -> chosen from the initial derivative scale
    double dt_min = 1e-12;  // below this the step controller gives up
    double safety = 0.9;
    double min_factor = 0.2;
    double max_factor = 5.0;
    double fixed_dt = 0.0;  // > 0 -> fixed-step mode, no error control
};

struct OdeStats {
    long steps = 0;
    long rejected = 0;
    long evals = 0;
    double last_dt = 0.0;
};

namespace detail {

// Dormand-Prince 5(4) tableau. The fifth-order weights coincide with the
// last stage row (FSAL), which saves one evaluation per accepted step.
inline constexpr double kA21 = 1.0 / 5;
inline constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
inline constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
inline constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                        kA54 = -212.0 / 729;
inline constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                        kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
inline constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                        kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
inline constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
// Difference between the 5th- and embedded 4th-order weights.
inline constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                        kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

}  // namespace detail

// Advances y in place from t0 to t1. The per-step error estimate is kept
// below atol + rtol*|y| in the RMS sense; on failure the step is retried with
// a smaller dt, and dt < dt_min raises convergence_error. Non-finite states
// are detected after every stage evaluation.
inline OdeStats integrate_rk45(const OdeRhs& f, double t0, double t1, Eigen::ArrayXd& y,
                               const OdeOptions& opt = {}) {
    using namespace detail;
    if (!(t1 >= t0)) throw domain_error("integrate_rk45: t1 must be >= t0");
    OdeStats stats;
    if (t1 == t0) return stats;

    const Eigen::Index n = y.size();
    Eigen::ArrayXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

    const auto eval = [&](double t, const Eigen::ArrayXd& yy, Eigen::ArrayXd& out) {
        f(t, yy, out);
        ++stats.evals;
        if (!out.allFinite())
            throw convergence_error("integrate_rk45: non-finite right-hand side at t=" +
                                    std::to_string(t));
    };

    double t = t0;
    eval(t, y, k1);

    const bool fixed = opt.fixed_dt > 0.0;
    double dt;
    if (fixed) {
        dt = opt.fixed_dt;
    } else if (opt.dt_init > 0.0) {
        dt = opt.dt_init;
    } else {
        // Conservative first step from the derivative scale.
        const double dnorm = std::sqrt((k1 * k1).mean());
        const double ynorm = std::sqrt((y * y).mean());
        dt = 0.01 * (opt.atol + opt.rtol * ynorm) / std::max(dnorm * opt.rtol + 1e-300, 1e-300);
        dt = std::min(std::max(dt, 1e-6), (t1 - t0) * 0.1 + 1e-300);
    }

    double prev_err_norm = 1.0;
    while (t < t1) {
        dt = std::min(dt, t1 - t);
        if (!fixed && dt < opt.dt_min)
            throw convergence_error("integrate_rk45: step size underflow at t=" +
                                    std::to_string(t));

        ytmp = y + dt * kA21 * k1;
        eval(t + kC2 * dt, ytmp, k2);
        ytmp = y + dt * (kA31 * k1 + kA32 * k2);
        eval(t + kC3 * dt, ytmp, k3);
        ytmp = y + dt * (kA41 * k1 + kA42 * k2 + kA43 * k3);
        eval(t + kC4 * dt, ytmp, k4);
        ytmp = y + dt * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
        eval(t + kC5 * dt, ytmp, k5);
        ytmp = y + dt * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
        eval(t + dt, ytmp, k6);
        ynew = y + dt * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
        eval(t + dt, ynew, k7);

        if (fixed) {
            y.swap(ynew);
            k1.swap(k7);
            t += dt;
            ++stats.steps;
            stats.last_dt = dt;
            continue;
        }

        err = dt * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
        const Eigen::ArrayXd scale =
            opt.atol + opt.rtol * y.abs().max(ynew.abs());
        const double err_norm = std::sqrt((err / scale).square().mean());

        if (err_norm <= 1.0) {
            t += dt;
            y.swap(ynew);
            k1.swap(k7);  // first-same-as-last
            ++stats.steps;
            stats.last_dt = dt;
            // PI controller (Hairer's beta = 0.04 flavor).
            const double fac = opt.safety * std::pow(err_norm + 1e-30, -0.7 / 5.0) *
                               std::pow(prev_err_norm, 0.4 / 5.0);
            dt *= std::min(opt.max_factor, std::max(opt.min_factor, fac));
            prev_err_norm = std::max(err_norm, 1e-4);
        } else {
            ++stats.rejected;
            const double fac = opt.safety * std::pow(err_norm, -1.0 / 5.0);
            dt *= std::max(opt.min_factor, fac);
        }
    }
    return stats;
}

}  // namespace hypfield
