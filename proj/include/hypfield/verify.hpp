#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hypfield/errors.hpp"
#include "hypfield/geometry.hpp"
#include "hypfield/kernels.hpp"

// Brute-force reference integrals that the closed forms elsewhere in the
// library are checked against. Everything here is deliberately implemented
// with a *different* algorithm than the primary code path (direct nested
// quadrature or Monte-Carlo sampling instead of spectral formulas), so that
// agreement between the two is evidence rather than tautology.

namespace hypfield {

enum class QuadScheme {
    TensorGaussLegendre,  // composite Gauss-Legendre in r times periodic rule in theta
    AdaptiveRadial,       // adaptive bisection in r, fixed periodic rule in theta
    MonteCarlo,           // inverse-CDF radial sampling, uniform angles
};

enum class QuadDomain {
    EuclideanBall,   // |z| <= a           (radius is the Euclidean a)
    HyperbolicBall,  // d(0, z) <= omega   (radius is the hyperbolic omega)
    HalfLine,        // plain 1D Lebesgue integral of r -> f(tanh r, 0) on [0, r_max]
};

struct QuadratureSpec {
    QuadScheme scheme = QuadScheme::TensorGaussLegendre;
    QuadDomain domain = QuadDomain::HyperbolicBall;
    double radius = 1.0;  // a, omega, or r_max depending on the domain
    // TensorGaussLegendre
    int n_r = 64;
    int n_theta = 256;
    // AdaptiveRadial
    double tol = 1e-10;
    // MonteCarlo
    long n_samples = 1000000;
    std::uint64_t seed = 0;

    static QuadratureSpec tensor(QuadDomain domain, double radius, int n_r = 64,
                                 int n_theta = 256);
    static QuadratureSpec adaptive(QuadDomain domain, double radius, double tol = 1e-10);
    static QuadratureSpec monte_carlo(QuadDomain domain, double radius, long n_samples,
                                      std::uint64_t seed);
};

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;  // one standard error of the mean, scaled by the volume
    long n_samples = 0;
    std::uint64_t seed = 0;
};

// Integral of f against the hyperbolic area measure dm = dz1 dz2 / (1-|z|^2)^2
// over the requested domain (for HalfLine, a plain 1D integral of the radial
// restriction -- the measure factor, if wanted, belongs to f itself).
double disk_integral(const std::function<double(const DiskPoint<double>&)>& f,
                     const QuadratureSpec& spec);

// Monte-Carlo variant reporting the standard error. Radial sampling uses the
// inverse CDF of the density (1/2)sinh(2r) on [0, omega], i.e.
// r = arccosh(1 + u (cosh 2*omega - 1)) / 2 with u uniform; angles are uniform.
// The estimate is deterministic for a given seed: the sample budget is split
// into fixed chunks whose generators are derived from (seed, chunk index), so
// the chunks could be evaluated as independent parallel streams.
MonteCarloEstimate disk_integral_mc(const std::function<double(const DiskPoint<double>&)>& f,
                                    const QuadratureSpec& spec);

// Reference value for mexican_hat_wbar, computed by 1D quadrature of the
// reduced integral sqrt(2) * pi * int_0^inf e^{-x^2/(2 sigma_i^2)} (1/2)sinh(2x) dx
// per lobe, independently of the erf closed form. sigma above 2 is rejected:
// the e^{2x} area growth pushes the integrand mass past any reasonable
// truncation radius.
double mexican_hat_oracle(double sigma1, double sigma2, double amplitude);

// The log-variable Gaussian factor that reduces the 3D integral to the disk:
// int_0^inf (1/sqrt(2 pi sigma^2)) e^{-(log t)^2 / sigma^2} dt/t, which equals
// 1/sqrt(2) for every sigma. Exposed so the reduction step is itself testable.
double mexican_hat_log_factor(double sigma);

// Direct 2D quadrature of M(r, omega) = int_{B_h(0, omega)} w(d(z, z')) dm(z')
// with z at hyperbolic radius r. Polar coordinates about the origin; the
// radial panels are graded toward s = r where the integrand has a kink
// (d(z, z') -> 0), and the angular panels are graded toward psi = 0 for the
// same reason. refine >= 1 scales panel density for convergence studies.
double m_oracle(const RadialKernel& kernel, double r, double omega, int refine = 1);
// Same integral with z given as a point; only d(0, z) enters (the construction
// integrates the relative angle, so rotation invariance is exact).
double m_oracle(const RadialKernel& kernel, const DiskPoint<double>& z, double omega,
                int refine = 1);

// Max relative residual of the convolution eigenrelation
// (w * Phi_lambda)(z) = W~(lambda) Phi_lambda(z) over the test points. The
// convolution is computed by direct quadrature in geodesic polar coordinates
// about each z (Mobius change of variables), never through the transform.
// refine >= 1 sharpens the quadrature; the residual should shrink with it.
double convolution_eigen_oracle(const RadialKernel& kernel, double lambda,
                                const std::vector<DiskPoint<double>>& testpoints,
                                int refine = 4);

// One row of the oracle table emitted by the command-line `verify` run.
struct OracleCheck {
    std::string name;
    double main_value = 0.0;
    double oracle_value = 0.0;
    double rel_err = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// The full suite: every closed form against its brute-force counterpart.
// Cheap enough to run routinely (a few seconds).
std::vector<OracleCheck> oracle_suite();

}  // namespace hypfield
