#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "hypfield/field.hpp"
#include "hypfield/kernels.hpp"
#include "hypfield/ode.hpp"

// Stationary-solution machinery: the spatially homogeneous scalar equation,
// Picard iteration for the full grid fixed point, and the contraction
// certificate that guarantees both uniqueness of the fixed point and an
// exponential decay envelope for perturbations around it.

namespace hypfield {

// Certifies that the fixed-point map V -> (G(V) + I)/alpha is a contraction:
// margin = alpha - mu * s_prime_max * w0 > 0. `mu` is an explicit extra gain
// applied inside the firing rate (pass 1 when the gain already lives in S, so
// both conventions produce the same composite slope mu * sup|S'|). `w0` is the
// kernel mass: the L1 norm against the hyperbolic measure for the continuum
// statement, or the discrete operator infinity-norm for the grid iteration.
struct ContractionCertificate {
    double mu = 1.0;
    double s_prime_max = 0.0;
    double w0 = 0.0;
    double alpha = 0.0;
    double margin = 0.0;

    bool contraction() const { return margin > 0.0; }
    // Lipschitz bound of one Picard sweep; residuals shrink at least this fast.
    double contraction_factor() const {
        return (mu == 0.0 || w0 == 0.0) ? 0.0 : mu * s_prime_max * w0 / alpha;
    }
};

// Continuum certificate: w0 = kernel L1 norm on the whole disk.
ContractionCertificate contraction_certificate(double mu, const FiringRate& S,
                                               const RadialKernel& kernel, double alpha);
// Discrete certificate: w0 = operator infinity-norm of the assembled matrix.
// This is the constant that actually governs the grid iteration (the truncated
// domain carries less mass than the full disk, so it is typically sharper).
ContractionCertificate contraction_certificate(double mu, const FiringRate& S,
                                               const KernelMatrix& K, double alpha);

// Dense samples of the scalar initial value problem
//   dV/dt = -alpha V + wbar S(V) + I(t),   V(0) = v0,
// on n_samples + 1 uniform times covering [0, T].
struct ScalarTrajectory {
    Eigen::ArrayXd t;
    Eigen::ArrayXd v;
    OdeStats stats;
};

ScalarTrajectory solve_homogeneous(double alpha, double wbar, const FiringRate& S,
                                   const std::function<double(double)>& input, double v0,
                                   double T, int n_samples = 256, const OdeOptions& opt = {});

// Root of alpha V = wbar S(V) + input by bisection on a bracket derived from
// the bound |V| <= (|wbar| sup|S| + |input|)/alpha. In the contraction regime
// the root is unique; outside it, bisection still returns some root.
double scalar_stationary_root(double alpha, double wbar, const FiringRate& S, double input,
                              double tol = 1e-13);

struct PicardResult {
    Eigen::ArrayXd V;   // fixed point candidate on the grid
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;  // residual < tol before max_iter
    bool certified = false;  // discrete contraction margin was > 0 at entry
    // Sup-norm residual ||alpha V_k - G(V_k) - I|| per iterate, starting at V_0.
    std::vector<double> residual_history;
};

// Plain fixed-point iteration V <- (h1 h2 W S(mu V) + I)/alpha from V = 0
// (or `start` if nonempty). Residuals decrease geometrically in the certified
// regime; ten consecutive residual increases raise convergence_error.
PicardResult picard_stationary(const KernelMatrix& K, const FiringRate& S, double mu,
                               double alpha, const Eigen::ArrayXd& input, double tol = 1e-10,
                               int max_iter = 10000,
                               const Eigen::ArrayXd& start = Eigen::ArrayXd());

// Per-snapshot check of the decay envelope
//   ||V(t) - V*||_inf <= e^{-margin (t - t0)} ||V(t0) - V*||_inf
// together with a least-squares fit of the empirical decay rate on the
// snapshots whose deviation exceeds abs_floor (below that, solver noise
// dominates and the envelope is enforced only up to the floor).
struct StabilityRateReport {
    bool ok = false;
    double margin = 0.0;
    double worst_excess = 0.0;  // max over snapshots of ||X|| - envelope*(1+slack) - floor
    double worst_time = 0.0;
    double fitted_rate = 0.0;   // slope of log ||X(t)||; negative when decaying
    int n_fitted = 0;           // snapshots entering the fit
};

StabilityRateReport verify_stability_rate(const Trajectory& traj,
                                          const Eigen::ArrayXd& stationary,
                                          const ContractionCertificate& cert,
                                          double slack = 1e-3, double abs_floor = 1e-8);

}  // namespace hypfield
