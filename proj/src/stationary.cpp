#include "hypfield/stationary.hpp"

#include <algorithm>
#include <cmath>

#include "hypfield/errors.hpp"

namespace hypfield {

namespace {

ContractionCertificate make_certificate(double mu, const FiringRate& S, double w0,
                                        double alpha) {
    if (!(mu >= 0.0)) throw domain_error("contraction_certificate: mu must be >= 0");
    if (!(alpha > 0.0)) throw domain_error("contraction_certificate: alpha must be > 0");
    ContractionCertificate cert;
    cert.mu = mu;
    cert.s_prime_max = S.slope_max();
    cert.w0 = w0;
    cert.alpha = alpha;
    // Avoid 0 * inf = NaN for the Heaviside slope when mu or w0 vanishes.
    double lipschitz = (mu == 0.0 || w0 == 0.0) ? 0.0 : mu * cert.s_prime_max * w0;
    cert.margin = alpha - lipschitz;
    return cert;
}

}  // namespace

ContractionCertificate contraction_certificate(double mu, const FiringRate& S,
                                               const RadialKernel& kernel, double alpha) {
    return make_certificate(mu, S, kernel.l1_norm(), alpha);
}

ContractionCertificate contraction_certificate(double mu, const FiringRate& S,
                                               const KernelMatrix& K, double alpha) {
    return make_certificate(mu, S, K.op_norm_inf(), alpha);
}

ScalarTrajectory solve_homogeneous(double alpha, double wbar, const FiringRate& S,
                                   const std::function<double(double)>& input, double v0,
                                   double T, int n_samples, const OdeOptions& opt) {
    if (!std::isfinite(wbar)) throw domain_error("solve_homogeneous: wbar must be finite");
    if (!(alpha > 0.0)) throw domain_error("solve_homogeneous: alpha must be > 0");
    if (!(T >= 0.0)) throw domain_error("solve_homogeneous: T must be >= 0");
    if (n_samples < 1) throw domain_error("solve_homogeneous: n_samples must be >= 1");

    ScalarTrajectory out;
    out.t = Eigen::ArrayXd::LinSpaced(n_samples + 1, 0.0, T);
    out.v.resize(n_samples + 1);
    out.v[0] = v0;

    auto rhs = [&](double t, const Eigen::ArrayXd& y, Eigen::ArrayXd& dy) {
        dy.resize(1);
        dy[0] = -alpha * y[0] + wbar * S(y[0]) + input(t);
    };

    Eigen::ArrayXd y(1);
    y[0] = v0;
    for (int k = 1; k <= n_samples; ++k) {
        OdeStats seg = integrate_rk45(rhs, out.t[k - 1], out.t[k], y, opt);
        out.stats.steps += seg.steps;
        out.stats.rejected += seg.rejected;
        out.stats.evals += seg.evals;
        out.stats.last_dt = seg.last_dt;
        out.v[k] = y[0];
    }
    return out;
}

double scalar_stationary_root(double alpha, double wbar, const FiringRate& S, double input,
                              double tol) {
    if (!(alpha > 0.0)) throw domain_error("scalar_stationary_root: alpha must be > 0");
    if (!std::isfinite(wbar) || !std::isfinite(input))
        throw domain_error("scalar_stationary_root: wbar and input must be finite");

    auto f = [&](double v) { return alpha * v - wbar * S(v) - input; };
    // Any root satisfies |V| <= (|wbar| sup|S| + |input|)/alpha; pad the
    // bracket so f has opposite signs at the ends (f -> +-inf linearly).
    double radius = (std::abs(wbar) * S.sup_abs() + std::abs(input)) / alpha + 1.0;
    double lo = -radius, hi = radius;
    double flo = f(lo);
    if (flo == 0.0) return lo;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((flo < 0.0) == (fmid < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if (hi - lo <= tol * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

PicardResult picard_stationary(const KernelMatrix& K, const FiringRate& S, double mu,
                               double alpha, const Eigen::ArrayXd& input, double tol,
                               int max_iter, const Eigen::ArrayXd& start) {
    const Eigen::Index n = K.W.rows();
    if (input.size() != n)
        throw domain_error("picard_stationary: input size does not match the kernel matrix");
    if (!(alpha > 0.0)) throw domain_error("picard_stationary: alpha must be > 0");
    if (!(tol > 0.0)) throw domain_error("picard_stationary: tol must be > 0");
    if (max_iter < 1) throw domain_error("picard_stationary: max_iter must be >= 1");
    if (start.size() != 0 && start.size() != n)
        throw domain_error("picard_stationary: start size does not match the kernel matrix");

    PicardResult res;
    res.certified = contraction_certificate(mu, S, K, alpha).contraction();
    res.V = start.size() ? start : Eigen::ArrayXd::Zero(n);
    res.residual_history.reserve(64);

    auto sweep = [&](const Eigen::ArrayXd& v) -> Eigen::ArrayXd {
        Eigen::ArrayXd fired = S(mu * v);
        return (K.h1h2 * (K.W * fired.matrix()).array() + input) / alpha;
    };

    int growing = 0;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        Eigen::ArrayXd next = sweep(res.V);
        // alpha (next - V) = G(V) + I - alpha V, the residual at the current iterate.
        double r = alpha * (next - res.V).abs().maxCoeff();
        res.residual_history.push_back(r);
        res.V.swap(next);
        res.iterations = it + 1;
        if (r < tol) {
            res.converged = true;
            break;
        }
        if (!std::isfinite(r)) throw convergence_error("picard_stationary: iterate blew up");
        growing = (r > prev) ? growing + 1 : 0;
        if (growing >= 10)
            throw convergence_error(
                "picard_stationary: residual grew for 10 consecutive iterations "
                "(outside the contraction regime?)");
        prev = r;
    }

    // Residual of the returned iterate, one extra sweep.
    res.residual = alpha * (sweep(res.V) - res.V).abs().maxCoeff();
    return res;
}

StabilityRateReport verify_stability_rate(const Trajectory& traj,
                                          const Eigen::ArrayXd& stationary,
                                          const ContractionCertificate& cert, double slack,
                                          double abs_floor) {
    if (traj.times.empty()) throw domain_error("verify_stability_rate: empty trajectory");
    for (const auto& st : traj.states)
        if (st.size() != stationary.size())
            throw domain_error("verify_stability_rate: state size mismatch");

    StabilityRateReport rep;
    rep.margin = cert.margin;
    rep.ok = true;

    const double t0 = traj.times.front();
    const double x0 = (traj.states.front() - stationary).abs().maxCoeff();

    double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        double t = traj.times[k];
        double x = (traj.states[k] - stationary).abs().maxCoeff();
        double envelope = std::exp(-cert.margin * (t - t0)) * x0;
        double excess = x - envelope * (1.0 + slack) - abs_floor;
        if (excess > rep.worst_excess) {
            rep.worst_excess = excess;
            rep.worst_time = t;
            rep.ok = false;
        }
        if (x > abs_floor) {
            double y = std::log(x);
            sum_t += t;
            sum_y += y;
            sum_tt += t * t;
            sum_ty += t * y;
            ++rep.n_fitted;
        }
    }

    if (rep.n_fitted >= 2) {
        double denom = rep.n_fitted * sum_tt - sum_t * sum_t;
        if (denom > 0.0) rep.fitted_rate = (rep.n_fitted * sum_ty - sum_t * sum_y) / denom;
    }
    return rep;
}

}  // namespace hypfield
