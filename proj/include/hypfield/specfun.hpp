#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "hypfield/errors.hpp"
#include "hypfield/quadrature.hpp"

// Special functions for hyperbolic harmonic analysis on the disk:
//  - the Gauss hypergeometric function F(a, conj(a); c; x) for x <= 0, which
//    is real-valued and underlies the spherical functions,
//  - spherical functions Phi_lambda^{(alpha,beta)} by series and by boundary
//    integral (the latter also in batched form over many lambda),
//  - the radial Helgason Fourier transform, a fast equivalent sampler based
//    on the horocyclic (Abel) reduction, and the inversion formula with its
//    Plancherel weight lambda * tanh(pi lambda / 2).

namespace hypfield {

// Error function, 2/sqrt(pi) int_0^x e^{-u^2} du.
inline double erf(double x) { return std::erf(x); }

enum class SphericalEvalMethod { Auto, SeriesHypergeometric, BoundaryIntegral };

struct Hyp2F1Result {
    double value = 0.0;
    double rel_err_est = 0.0;  // estimated relative rounding error
    bool degraded = false;     // true when cancellation ate the target accuracy
};

// F(a, conj(a); c; x) for real c and x <= 0 (real-valued by conjugate
// symmetry). a = a_re + i a_im. Branches: direct series for |x| <= 1/2,
// the Pfaff transformation for -2 <= x < -1/2, and the 1/x connection
// formula beyond; a quadratic interpolation in a_im^2 covers the
// connection formula's removable singularity at a_im = 0.
Hyp2F1Result hyp2f1_conjugate_ex(double a_re, double a_im, double c, double x);
double hyp2f1_conjugate(double a_re, double a_im, double c, double x);

// Spherical function Phi_lambda(tanh r) = F((1+i lambda)/2, (1-i lambda)/2; 1; -sinh^2 r),
// equivalently the boundary integral of e^{(i lambda + 1)<z, b>} db.
double spherical_phi(double lambda, double r,
                     SphericalEvalMethod method = SphericalEvalMethod::Auto);

// Phi_lambda^{(alpha,beta)}(omega) = F((rho+i lambda)/2, (rho-i lambda)/2; alpha+1; -sinh^2 omega)
// with rho = alpha + beta + 1. The boundary-integral method is implemented
// for (0,0) and (1,1), the two cases the analysis uses.
double spherical_phi_ab(double lambda, int alpha, int beta, double omega,
                        SphericalEvalMethod method = SphericalEvalMethod::Auto);

// Boundary-integral evaluation of Phi^{(0,0)} / Phi^{(1,1)} for a whole set
// of lambda values at one radius, sharing the theta sweep (the workhorse for
// spectral sums; node count adapts to max |lambda| * r).
Eigen::ArrayXd phi00_batch(const Eigen::ArrayXd& lambdas, double r);
Eigen::ArrayXd phi11_batch(const Eigen::ArrayXd& lambdas, double omega);

struct SpectralGrid {
    double lambda_max = 40.0;
    int n_lambda = 400;
    Eigen::ArrayXd nodes, weights;  // Gauss-Legendre rule on [0, lambda_max]

    static SpectralGrid make(double lambda_max = 40.0, int n_lambda = 400);

    // weights * lambda * tanh(pi lambda / 2); integrals over the full line
    // of even integrands are 2 * (this . samples).
    Eigen::ArrayXd plancherel_weights() const;
};

// W~(lambda) = pi int_0^rmax w(r) Phi_lambda(tanh r) sinh(2r) dr  (the radial
// reduction of the disk Fourier transform at a radial kernel).
double radial_fourier_profile(const std::function<double(double)>& w, double rmax,
                              double lambda);

// Same transform evaluated at many lambda through the horocyclic reduction:
// A(y) = int_R w(d(O, n_u a_y . O)) du followed by a cosine transform. Exact
// identity (not an approximation scheme); orders of magnitude cheaper for
// large spectral grids since no spherical functions appear.
Eigen::ArrayXd radial_fourier_abel(const std::function<double(double)>& w, double rmax,
                                   const Eigen::ArrayXd& lambdas);

// Inversion w(r) = (1/4pi) int_R W~(lambda) Phi_lambda(tanh r) lambda tanh(pi lambda/2) dlambda.
double radial_fourier_invert(const SpectralGrid& grid, const Eigen::ArrayXd& samples,
                             double r);

namespace detail {
// log Gamma for complex argument (Lanczos approximation plus recurrence
// shift); any fixed branch is fine for ratios exponentiated together.
std::complex<double> lgamma_complex(std::complex<double> z);
}  // namespace detail

}  // namespace hypfield
