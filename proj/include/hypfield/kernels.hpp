#pragma once

#include <memory>
#include <mutex>

#include <Eigen/Dense>

#include "hypfield/errors.hpp"
#include "hypfield/geometry.hpp"
#include "hypfield/specfun.hpp"

// Radial connectivity profiles on the hyperbolic disk and their derived
// quantities: the disk L1 norm (the W0 appearing in every bound), the
// translation-invariance integral, the closed-form integral of the
// three-dimensional Mexican hat, and spectral samples W~(lambda_k) shared by
// the bump analysis. Kernels are immutable; the two derived caches (L1 norm,
// spectral samples) fill lazily and are write-once behind a mutex, so copies
// share them and concurrent readers are safe.

namespace hypfield {

enum class KernelFamily { Exponential, Gabor, DiffGaussians, MexicanHat3D };

class RadialKernel {
public:
    // w(r) = e^{-r/b}. Decay must beat the e^{2r} hyperbolic area growth, so
    // b < 1/2 is required for integrability; allow_nonintegrable admits wider
    // profiles for grid-truncated simulation only (L1/spectral calls throw).
    static RadialKernel exponential(double b, bool allow_nonintegrable = false);
    // G(r) = (1/sqrt(b)) (1 - 2 r^2/b^2) e^{-r^2/b}: excitatory center with an
    // inhibitory surround, zero crossing at r = b/sqrt(2).
    static RadialKernel gabor(double b);
    // w(r) = (2 pi sigma1^2)^{-1/2} e^{-r^2/sigma1^2} - A (2 pi sigma2^2)^{-1/2} e^{-r^2/sigma2^2}.
    static RadialKernel diff_gaussians(double sigma1, double sigma2, double A);
    // Same two-Gaussian shape with the e^{-r^2/(2 sigma^2)} width convention,
    // matching the closed form of mexican_hat_wbar (see that function).
    static RadialKernel mexican_hat_3d(double sigma1, double sigma2, double A);

    KernelFamily family() const { return family_; }
    double param_b() const { return b_; }
    double param_sigma1() const { return sigma1_; }
    double param_sigma2() const { return sigma2_; }
    double param_amplitude() const { return amp_; }

    double operator()(double r) const;
    bool integrable() const { return integrable_; }

    // Truncation radius: beyond it |w(r)| sinh(2r) < 1e-12 and stays there.
    double r_max() const;

    // W0 = ||w||_{L1(D)} = 2 pi int_0^inf |w(r)| (1/2) sinh(2r) dr (cached).
    double l1_norm() const;

    // W~ at the grid nodes via the horocyclic route (cached for the first
    // grid used; other grids are computed fresh and not cached).
    Eigen::ArrayXd spectral_samples(const SpectralGrid& grid) const;

private:
    RadialKernel() = default;

    KernelFamily family_ = KernelFamily::Exponential;
    double b_ = 0.0, sigma1_ = 0.0, sigma2_ = 0.0, amp_ = 0.0;
    bool integrable_ = true;
    double r_max_ = 0.0;

    struct Cache {
        std::mutex m;
        bool l1_filled = false;
        double l1 = 0.0;
        bool sp_filled = false;
        double sp_lambda_max = 0.0;
        int sp_n = 0;
        Eigen::ArrayXd sp;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();

    void require_integrable(const char* what) const;
    static double truncation_radius(const RadialKernel& k);
};

inline double eval(const RadialKernel& kernel, double r) { return kernel(r); }
inline double l1_norm(const RadialKernel& kernel) { return kernel.l1_norm(); }

// Xi(p) = int_D w(d(p, z')) dm(z') by direct two-dimensional quadrature;
// independent of p for integrable kernels (the invariance lemma). With
// absolute=true integrates |w| instead (the L1 version of the lemma).
double xi_invariance(const RadialKernel& kernel, const DiskPoint<double>& p,
                     bool absolute = false);

// Closed form of the 3D Mexican-hat integral over SPD(2):
//   (pi^{3/2}/2) (sigma1 e^{2 sigma1^2} erf(sqrt(2) sigma1)
//                 - A sigma2 e^{2 sigma2^2} erf(sqrt(2) sigma2)).
double mexican_hat_wbar(double sigma1, double sigma2, double A);

// W~(lambda) for a kernel (radial reduction of the disk Fourier transform).
double radial_fourier(const RadialKernel& kernel, double lambda);

}  // namespace hypfield
