#include "hypfield/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

namespace hypfield {

namespace {

int env_thread_count() {
    if (const char* env = std::getenv("HYPFIELD_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

FiringRate FiringRate::sigmoid(double mu) {
    if (!(mu > 0.0)) throw domain_error("FiringRate: mu must be > 0");
    FiringRate s;
    s.kind_ = FiringRateKind::Sigmoid;
    s.mu_ = mu;
    return s;
}

FiringRate FiringRate::shifted_sigmoid(double mu) {
    FiringRate s = sigmoid(mu);
    s.kind_ = FiringRateKind::ShiftedSigmoid;
    return s;
}

FiringRate FiringRate::heaviside(double kappa) {
    if (!(kappa > 0.0)) throw domain_error("FiringRate: kappa must be > 0");
    FiringRate s;
    s.kind_ = FiringRateKind::Heaviside;
    s.kappa_ = kappa;
    return s;
}

double FiringRate::operator()(double x) const {
    switch (kind_) {
        case FiringRateKind::Sigmoid:
            return 1.0 / (1.0 + std::exp(-mu_ * x));
        case FiringRateKind::ShiftedSigmoid:
            return 1.0 / (1.0 + std::exp(-mu_ * x)) - 0.5;
        case FiringRateKind::Heaviside:
            return x >= kappa_ ? 1.0 : 0.0;
    }
    return 0.0;
}

Eigen::ArrayXd FiringRate::operator()(const Eigen::ArrayXd& x) const {
    switch (kind_) {
        case FiringRateKind::Sigmoid:
            return 1.0 / (1.0 + (-mu_ * x).exp());
        case FiringRateKind::ShiftedSigmoid:
            return 1.0 / (1.0 + (-mu_ * x).exp()) - 0.5;
        case FiringRateKind::Heaviside:
            return (x >= kappa_).cast<double>();
    }
    return Eigen::ArrayXd::Zero(x.size());
}

double FiringRate::sup_abs() const {
    return kind_ == FiringRateKind::ShiftedSigmoid ? 0.5 : 1.0;
}

double FiringRate::slope_max() const {
    if (kind_ == FiringRateKind::Heaviside) return std::numeric_limits<double>::infinity();
    return mu_ / 4.0;
}

FieldGrid build_grid(double a, int N, int M) {
    if (!(a > 0.0 && a < 1.0)) throw domain_error("build_grid: need 0 < a < 1");
    if (N < 2 || M < 2) throw domain_error("build_grid: need N, M >= 2");
    FieldGrid g;
    g.a = a;
    g.N = N;
    g.M = M;
    const int n = g.nodes();
    g.r.resize(n);
    g.theta.resize(n);
    g.q.resize(n);
    const double h1 = g.h1(), h2 = g.h2();
    for (int i = 0; i <= N; ++i) {
        const double r = i * h1;
        const double q = r / std::pow(1.0 - r * r, 2);
        for (int j = 0; j <= M; ++j) {
            const int k = g.index(i, j);
            g.r[k] = r;
            g.theta[k] = j * h2;
            g.q[k] = q;
        }
    }
    return g;
}

ExternalInput ExternalInput::zero() { return ExternalInput(); }

ExternalInput ExternalInput::gaussian_bump(double I0, double sigma, GaussianDenom denom) {
    if (!(I0 >= 0.0)) throw domain_error("ExternalInput: I0 must be >= 0");
    if (!(sigma > 0.0)) throw domain_error("ExternalInput: sigma must be > 0");
    ExternalInput in;
    in.kind_ = Kind::Gaussian;
    in.I0_ = I0;
    in.sigma_ = sigma;
    in.denom_ = denom;
    return in;
}

ExternalInput ExternalInput::rotating_bump(double I0, double sigma, double r0, double Omega0,
                                           double phase0) {
    if (!(I0 >= 0.0)) throw domain_error("ExternalInput: I0 must be >= 0");
    if (!(sigma > 0.0)) throw domain_error("ExternalInput: sigma must be > 0");
    if (!(r0 >= 0.0 && r0 < 1.0))
        throw domain_error("ExternalInput: rotating center must stay inside the disk");
    ExternalInput in;
    in.kind_ = Kind::Rotating;
    in.I0_ = I0;
    in.sigma_ = sigma;
    in.r0_ = r0;
    in.omega0_ = Omega0;
    in.phase0_ = phase0;
    return in;
}

bool ExternalInput::time_dependent() const { return kind_ == Kind::Rotating && omega0_ != 0.0; }

bool ExternalInput::zero_input() const { return kind_ == Kind::Zero || I0_ == 0.0; }

void ExternalInput::eval(const FieldGrid& grid, double t, Eigen::ArrayXd& out) const {
    const int n = grid.nodes();
    out.resize(n);
    switch (kind_) {
        case Kind::Zero:
            out.setZero();
            return;
        case Kind::Gaussian: {
            const double denom =
                (denom_ == GaussianDenom::SigmaSq ? 1.0 : 2.0) * sigma_ * sigma_;
            out = I0_ * (-grid.r.atanh().square() / denom).exp();
            return;
        }
        case Kind::Rotating: {
            const std::complex<double> z0 = std::polar(r0_, omega0_ * t + phase0_);
            const double denom = sigma_ * sigma_;
            for (int k = 0; k < n; ++k) {
                const std::complex<double> z = std::polar(grid.r[k], grid.theta[k]);
                const double ratio = std::abs(z - z0) / std::abs(1.0 - std::conj(z0) * z);
                const double d = std::atanh(std::min(ratio, 1.0 - 1e-16));
                out[k] = I0_ * std::exp(-d * d / denom);
            }
            return;
        }
    }
}

double KernelMatrix::op_norm_inf() const {
    if (W.size() == 0) return 0.0;
    return h1h2 * W.cwiseAbs().rowwise().sum().maxCoeff();
}

KernelMatrix assemble_kernel_matrix(const FieldGrid& grid, const RadialKernel& kernel,
                                    int max_nodes) {
    const int n = grid.nodes();
    if (n > max_nodes)
        throw resolution_error("assemble_kernel_matrix: " + std::to_string(n) +
                               " nodes exceed the configured cap of " +
                               std::to_string(max_nodes) +
                               " (the dense matrix grows quadratically)");
    const int N = grid.N, M = grid.M;

    // Distances depend only on the radius indices and the angle difference
    // modulo M, so the kernel is evaluated on an (N+1) x (N+1) x M table and
    // broadcast into the dense matrix.
    Eigen::ArrayXd table((N + 1) * (N + 1) * M);
    const double h1 = grid.h1(), h2 = grid.h2();
    for (int i = 0; i <= N; ++i) {
        const double ri = i * h1;
        for (int k = 0; k <= N; ++k) {
            const double rk = k * h1;
            for (int m = 0; m < M; ++m) {
                const DiskPoint<double> zi(ri, 0.0);
                const DiskPoint<double> zk(std::polar(rk, m * h2));
                table[(i * (N + 1) + k) * M + m] = kernel(dist_disk(zi, zk));
            }
        }
    }

    KernelMatrix km;
    km.h1h2 = h1 * h2;
    km.W.resize(n, n);
    Eigen::ArrayXd qr(N + 1);
    for (int k = 0; k <= N; ++k) qr[k] = grid.q[grid.index(k, 0)];

    const auto fill_rows = [&](int row_begin, int row_end) {
        for (int row = row_begin; row < row_end; ++row) {
            const int i = row / (M + 1), j = row % (M + 1);
            for (int k = 0; k <= N; ++k) {
                const double* trow = &table[(i * (N + 1) + k) * M];
                const double qk = qr[k];
                for (int l = 0; l <= M; ++l) {
                    const int dm = ((j - l) % M + M) % M;
                    km.W(row, k * (M + 1) + l) = trow[dm] * qk;
                }
            }
        }
    };

    const int threads = std::min(env_thread_count(), std::max(1, n / 256));
    if (threads <= 1) {
        fill_rows(0, n);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) {
            const int lo = n * t / threads, hi = n * (t + 1) / threads;
            pool.emplace_back(fill_rows, lo, hi);
        }
        for (std::thread& th : pool) th.join();
    }
    return km;
}

void FieldProblem::rhs(double t, const Eigen::ArrayXd& V, Eigen::ArrayXd& out) const {
    const Eigen::ArrayXd sv = S(V);
    out.resize(V.size());
    out.matrix().noalias() = K.h1h2 * (K.W * sv.matrix());
    out -= alpha * V;
    static thread_local Eigen::ArrayXd input_values;
    input.eval(grid, t, input_values);
    out += input_values;
}

Trajectory simulate(const FieldProblem& problem, const SimulationConfig& config) {
    if (!(config.T >= 0.0)) throw domain_error("simulate: T must be >= 0");
    std::vector<double> snaps = config.snapshot_times;
    if (snaps.empty())
        snaps = {0.0, config.T / 4, config.T / 2, 3 * config.T / 4, config.T};
    if (!std::is_sorted(snaps.begin(), snaps.end()))
        throw domain_error("simulate: snapshot times must be sorted");
    if (snaps.front() < 0.0 || snaps.back() > config.T)
        throw domain_error("simulate: snapshot times must lie in [0, T]");

    const int n = problem.grid.nodes();
    Eigen::ArrayXd V;
    if (config.V0.size() == 0) {
        V = Eigen::ArrayXd::Zero(n);
    } else if (config.V0.size() == n) {
        V = config.V0;
    } else {
        throw domain_error("simulate: V0 size does not match the grid");
    }

    const OdeRhs f = [&problem](double t, const Eigen::ArrayXd& y, Eigen::ArrayXd& dy) {
        problem.rhs(t, y, dy);
    };

    Trajectory traj;
    double t = 0.0;
    for (const double ts : snaps) {
        if (ts > t) {
            const OdeStats s = integrate_rk45(f, t, ts, V, config.ode);
            traj.stats.steps += s.steps;
            traj.stats.rejected += s.rejected;
            traj.stats.evals += s.evals;
            traj.stats.last_dt = s.last_dt;
            t = ts;
        }
        traj.times.push_back(ts);
        traj.states.push_back(V);
    }
    return traj;
}

Eigen::ArrayXd noise_initial_condition(const FieldGrid& grid, double amp, std::uint64_t seed) {
    if (!(amp >= 0.0)) throw domain_error("noise_initial_condition: amp must be >= 0");
    std::mt19937_64 gen(seed);
    Eigen::ArrayXd v(grid.nodes());
    for (int i = 0; i <= grid.N; ++i) {
        for (int j = 0; j < grid.M; ++j) {
            const double u = (gen() >> 11) * 0x1.0p-53;  // top 53 bits -> [0, 1)
            v[grid.index(i, j)] = amp * (2.0 * u - 1.0);
        }
        v[grid.index(i, grid.M)] = v[grid.index(i, 0)];
    }
    return v;
}

Eigen::ArrayXd rotate_state(const FieldGrid& grid, const Eigen::ArrayXd& V, int steps) {
    if (V.size() != grid.nodes()) throw domain_error("rotate_state: size mismatch");
    const int M = grid.M;
    Eigen::ArrayXd out(V.size());
    for (int i = 0; i <= grid.N; ++i) {
        for (int j = 0; j < M; ++j) {
            const int src = ((j - steps) % M + M) % M;
            out[grid.index(i, j)] = V[grid.index(i, src)];
        }
        out[grid.index(i, M)] = out[grid.index(i, 0)];
    }
    return out;
}

double norm_envelope(double t, double v0_norm, double alpha, double gain) {
    const double decay = std::exp(-alpha * t);
    return decay * v0_norm + gain / alpha * (1.0 - decay);
}

double attracting_radius(double alpha, double gain) { return 2.0 * gain / alpha; }

double entry_time_bound(double alpha, double v0_norm, double rho) {
    if (v0_norm <= rho) return 0.0;
    return std::log((2.0 * v0_norm - rho) / rho) / alpha;
}

BoundReport check_norm_bound(const Trajectory& traj, double alpha, double gain, double slack) {
    BoundReport rep;
    if (traj.states.empty()) return rep;
    const double t0 = traj.times.front();
    const double v0 = traj.states.front().abs().maxCoeff();
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const double bound = norm_envelope(traj.times[k] - t0, v0, alpha, gain);
        const double excess = traj.states[k].abs().maxCoeff() - bound;
        if (excess > rep.worst_excess) {
            rep.worst_excess = excess;
            rep.worst_time = traj.times[k];
        }
    }
    rep.ok = rep.worst_excess <= slack;
    return rep;
}

}  // namespace hypfield
