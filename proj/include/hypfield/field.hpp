#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hypfield/errors.hpp"
#include "hypfield/geometry.hpp"
#include "hypfield/kernels.hpp"
#include "hypfield/ode.hpp"

// The discretized neural field on the Euclidean ball B(0, a): polar grid with
// rectangular quadrature, firing-rate nonlinearities, external inputs, the
// dense kernel matrix, right-hand-side evaluation, and the simulation driver.
//
// The grid keeps both angular endpoints theta = 0 and theta = 2*pi as separate
// nodes and the quadrature sums over all of them with full weight, exactly as
// the classical rectangular-rule scheme is usually written. The duplicated
// column therefore carries double weight -- an O(h2) endpoint bias that is
// kept deliberately (refining the grid shrinks it); helpers that construct
// initial data keep the duplicated column in sync with theta = 0.

namespace hypfield {

enum class FiringRateKind { Sigmoid, ShiftedSigmoid, Heaviside };

class FiringRate {
public:
    // S(x) = 1/(1 + e^{-mu x}), values in (0, 1), S(0) = 1/2.
    static FiringRate sigmoid(double mu);
    // S(x) - 1/2, values in (-1/2, 1/2), zero at the origin.
    static FiringRate shifted_sigmoid(double mu);
    // H(x - kappa) with H(0) = 1; the high-gain limit of the sigmoid.
    static FiringRate heaviside(double kappa);

    double operator()(double x) const;
    Eigen::ArrayXd operator()(const Eigen::ArrayXd& x) const;

    FiringRateKind kind() const { return kind_; }
    double mu() const { return mu_; }
    double kappa() const { return kappa_; }
    // sup |S| over the real line (the S^m of the boundedness estimates).
    double sup_abs() const;
    // sup |S'|: mu/4 for both sigmoids, +infinity for the Heaviside step.
    double slope_max() const;

private:
    FiringRateKind kind_ = FiringRateKind::Sigmoid;
    double mu_ = 0.0;
    double kappa_ = 0.0;
};

// Polar grid on B(0, a): r_i = i*h1 (h1 = a/N, i = 0..N) and theta_j = j*h2
// (h2 = 2*pi/M, j = 0..M, so j = M repeats theta = 0). Node (i, j) lives at
// flat index i*(M+1) + j. q holds the rectangular quadrature factor
// r/(1 - r^2)^2 of the hyperbolic measure; the center row carries q = 0.
struct FieldGrid {
    double a = 0.5;
    int N = 40;
    int M = 40;
    Eigen::ArrayXd r;      // per-node Euclidean radius, size (N+1)(M+1)
    Eigen::ArrayXd theta;  // per-node angle in [0, 2*pi]
    Eigen::ArrayXd q;      // per-node measure factor r/(1-r^2)^2

    int nodes() const { return (N + 1) * (M + 1); }
    int index(int i, int j) const { return i * (M + 1) + j; }
    double h1() const { return a / N; }
    double h2() const { return 2.0 * std::numbers::pi / M; }
};

FieldGrid build_grid(double a, int N, int M);

enum class GaussianDenom { SigmaSq, TwoSigmaSq };

class ExternalInput {
public:
    static ExternalInput zero();
    // I(z) = I0 exp(-d(z,0)^2 / denom), denom = sigma^2 or 2 sigma^2 with the
    // hyperbolic distance d; both conventions appear in the literature, so the
    // choice is explicit per experiment.
    static ExternalInput gaussian_bump(double I0, double sigma,
                                       GaussianDenom denom = GaussianDenom::SigmaSq);
    // I(z, t) = I0 exp(-d(z, z0(t))^2 / sigma^2), z0(t) = r0 e^{i(Omega0 t + phase0)}.
    // Omega0 = 0 with a phase gives a static off-center bump.
    static ExternalInput rotating_bump(double I0, double sigma, double r0, double Omega0,
                                       double phase0 = 0.0);

    bool time_dependent() const;
    bool zero_input() const;
    double sup_norm() const { return I0_; }  // max over z and t
    // Fills out (resized to grid.nodes()) with node values at time t.
    void eval(const FieldGrid& grid, double t, Eigen::ArrayXd& out) const;

private:
    enum class Kind { Zero, Gaussian, Rotating } kind_ = Kind::Zero;
    double I0_ = 0.0, sigma_ = 1.0, r0_ = 0.0, omega0_ = 0.0, phase0_ = 0.0;
    GaussianDenom denom_ = GaussianDenom::SigmaSq;
};

// Dense quadrature matrix: entry(row ij, col kl) = w(d(node_ij, node_kl)) * q_kl.
// The h1*h2 rectangular weight is kept separate so the matrix itself matches
// the textbook definition.
struct KernelMatrix {
    Eigen::MatrixXd W;
    double h1h2 = 0.0;
    // Operator infinity-norm of the discrete integral operator
    // (max absolute row sum including the h1*h2 weight); stands in for the
    // kernel L1 norm in bounds when the continuum norm does not exist.
    double op_norm_inf() const;
};

// Assembles the matrix, exploiting that entries depend on (i, k, (j-l) mod M)
// only. Grids above max_nodes total nodes are rejected (the dense matrix grows
// quadratically). Row blocks are assembled in parallel (HYPFIELD_THREADS or
// hardware concurrency); entries are written disjointly, so the result is
// bitwise independent of the thread count.
KernelMatrix assemble_kernel_matrix(const FieldGrid& grid, const RadialKernel& kernel,
                                    int max_nodes = 16384);

// Everything fixed over one simulation. rhs evaluates
//   dV/dt = -alpha V + h1 h2 * (W S(V)) + I(t)
// into out without allocating.
struct FieldProblem {
    FieldGrid grid;
    KernelMatrix K;
    FiringRate S = FiringRate::sigmoid(1.0);
    ExternalInput input = ExternalInput::zero();
    double alpha = 0.1;

    void rhs(double t, const Eigen::ArrayXd& V, Eigen::ArrayXd& out) const;
};

struct SimulationConfig {
    double T = 100.0;
    std::vector<double> snapshot_times;  // empty -> {0, T/4, T/2, 3T/4, T}
    OdeOptions ode;
    Eigen::ArrayXd V0;  // empty -> start from zero
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::ArrayXd> states;
    OdeStats stats;
};

Trajectory simulate(const FieldProblem& problem, const SimulationConfig& config);

// Uniform noise in [-amp, amp] sampled once per physical node (the duplicated
// theta = 2*pi column copies theta = 0), reproducible across platforms: the
// generator's raw 64-bit output is mapped to [0, 1) by taking the top 53 bits.
Eigen::ArrayXd noise_initial_condition(const FieldGrid& grid, double amp, std::uint64_t seed);

// Rotates a state by `steps` angular grid cells (positive = +theta direction)
// and re-syncs the duplicated column. Used by the equivariance checks.
Eigen::ArrayXd rotate_state(const FieldGrid& grid, const Eigen::ArrayXd& V, int steps);

// a-priori sup-norm envelope: |V(t)| <= e^{-alpha t} |V0| + (gain/alpha)(1 - e^{-alpha t})
// with gain = sup|S| * W0 + sup|I|. W0 is the kernel L1 norm when it exists,
// else the discrete operator norm.
double norm_envelope(double t, double v0_norm, double alpha, double gain);

// Radius of the attracting ball and the guaranteed entry time for states
// starting outside it: rho = 2*gain/alpha, T <= (1/alpha) log((2|V0| - rho)/rho).
double attracting_radius(double alpha, double gain);
double entry_time_bound(double alpha, double v0_norm, double rho);

// Checks the envelope at every snapshot of a trajectory with the given slack;
// returns the worst violation (<= slack means pass).
struct BoundReport {
    bool ok = true;
    double worst_excess = 0.0;  // max over snapshots of |V| - envelope
    double worst_time = 0.0;
};
BoundReport check_norm_bound(const Trajectory& traj, double alpha, double gain, double slack);

}  // namespace hypfield
