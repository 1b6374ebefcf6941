#include "hypfield/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "hypfield/quadrature.hpp"

namespace hypfield {

namespace {

double gaussian(double r, double two_sig_sq, double norm) {
    return norm * std::exp(-r * r / two_sig_sq);
}

}  // namespace

RadialKernel RadialKernel::exponential(double b, bool allow_nonintegrable) {
    if (!(b > 0.0)) throw domain_error("exponential kernel: width b must be positive");
    RadialKernel k;
    k.family_ = KernelFamily::Exponential;
    k.b_ = b;
    k.integrable_ = b < 0.5;
    if (!k.integrable_ && !allow_nonintegrable)
        throw integrability_error(
            "exponential kernel: b >= 0.5 decays slower than the e^{2r} hyperbolic "
            "area growth, so the disk L1 norm diverges; pass allow_nonintegrable "
            "for grid-truncated simulation only");
    k.r_max_ = k.integrable_ ? truncation_radius(k) : 0.0;
    return k;
}

RadialKernel RadialKernel::gabor(double b) {
    if (!(b > 0.0)) throw domain_error("gabor kernel: width b must be positive");
    RadialKernel k;
    k.family_ = KernelFamily::Gabor;
    k.b_ = b;
    k.r_max_ = truncation_radius(k);
    return k;
}

RadialKernel RadialKernel::diff_gaussians(double sigma1, double sigma2, double A) {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
        throw domain_error("difference-of-gaussians kernel: widths must be positive");
    if (sigma1 > sigma2)
        throw domain_error(
            "difference-of-gaussians kernel: requires sigma1 <= sigma2 "
            "(excitatory center, inhibitory surround)");
    if (A < 0.0 || A > 1.0)
        throw domain_error("difference-of-gaussians kernel: requires 0 <= A <= 1");
    RadialKernel k;
    k.family_ = KernelFamily::DiffGaussians;
    k.sigma1_ = sigma1;
    k.sigma2_ = sigma2;
    k.amp_ = A;
    k.r_max_ = truncation_radius(k);
    return k;
}

RadialKernel RadialKernel::mexican_hat_3d(double sigma1, double sigma2, double A) {
    RadialKernel k = diff_gaussians(sigma1, sigma2, A);
    k.family_ = KernelFamily::MexicanHat3D;
    k.r_max_ = truncation_radius(k);
    return k;
}

double RadialKernel::operator()(double r) const {
    if (r < 0.0) throw domain_error("kernel eval: radius must be nonnegative");
    switch (family_) {
        case KernelFamily::Exponential:
            return std::exp(-r / b_);
        case KernelFamily::Gabor: {
            const double x2 = r * r;
            return (1.0 - 2.0 * x2 / (b_ * b_)) * std::exp(-x2 / b_) / std::sqrt(b_);
        }
        case KernelFamily::DiffGaussians:
            return gaussian(r, sigma1_ * sigma1_, 1.0 / std::sqrt(2.0 * M_PI * sigma1_ * sigma1_)) -
                   amp_ * gaussian(r, sigma2_ * sigma2_,
                                   1.0 / std::sqrt(2.0 * M_PI * sigma2_ * sigma2_));
        case KernelFamily::MexicanHat3D:
            return gaussian(r, 2.0 * sigma1_ * sigma1_,
                            1.0 / std::sqrt(2.0 * M_PI * sigma1_ * sigma1_)) -
                   amp_ * gaussian(r, 2.0 * sigma2_ * sigma2_,
                                   1.0 / std::sqrt(2.0 * M_PI * sigma2_ * sigma2_));
    }
    return 0.0;
}

double RadialKernel::truncation_radius(const RadialKernel& k) {
    // March outward until |w(r)| sinh(2r) stays below 1e-12 (four consecutive
    // eighth-steps, to step over isolated zeros of oscillating profiles).
    const double tol = 1e-12;
    int below = 0;
    for (double r = 0.25; r <= 60.0; r += 0.125) {
        if (std::abs(k(r)) * std::sinh(2.0 * r) < tol) {
            if (++below == 4) return r;
        } else {
            below = 0;
        }
    }
    throw integrability_error(
        "kernel truncation: |w(r)| sinh(2r) did not fall below 1e-12 by r = 60");
}

void RadialKernel::require_integrable(const char* what) const {
    if (!integrable_)
        throw integrability_error(std::string(what) +
                                  ": kernel is not integrable against the "
                                  "hyperbolic area element");
}

double RadialKernel::r_max() const {
    require_integrable("r_max");
    return r_max_;
}

double RadialKernel::l1_norm() const {
    require_integrable("l1_norm");
    std::lock_guard<std::mutex> lock(cache_->m);
    if (!cache_->l1_filled) {
        cache_->l1 = M_PI * adaptive_integrate(
                                [this](double r) {
                                    return std::abs((*this)(r)) * std::sinh(2.0 * r);
                                },
                                0.0, r_max_, 1e-12);
        cache_->l1_filled = true;
    }
    return cache_->l1;
}

Eigen::ArrayXd RadialKernel::spectral_samples(const SpectralGrid& grid) const {
    require_integrable("spectral_samples");
    std::lock_guard<std::mutex> lock(cache_->m);
    if (cache_->sp_filled && cache_->sp_lambda_max == grid.lambda_max &&
        cache_->sp_n == grid.n_lambda)
        return cache_->sp;
    Eigen::ArrayXd samples =
        radial_fourier_abel([this](double r) { return (*this)(r); }, r_max_, grid.nodes);
    if (!cache_->sp_filled) {
        cache_->sp = samples;
        cache_->sp_lambda_max = grid.lambda_max;
        cache_->sp_n = grid.n_lambda;
        cache_->sp_filled = true;
    }
    return samples;
}

double xi_invariance(const RadialKernel& kernel, const DiskPoint<double>& p,
                     bool absolute) {
    const double dp = dist_disk(DiskPoint<double>{0.0, 0.0}, p);
    const double rmax = kernel.r_max() + dp;
    // Polar quadrature about the origin; panel width resolves the narrowest
    // kernel feature wherever the shifted profile puts it.
    const int panels = std::max(24, static_cast<int>(std::ceil(rmax / 0.05)));
    const Quadrature qr =
        composite_gauss_legendre(Eigen::ArrayXd::LinSpaced(panels + 1, 0.0, rmax), 8);
    const int nth = 1024;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < qr.x.size(); ++k) {
        const double rp = qr.x[k], rho = std::tanh(rp);
        double th_acc = 0.0;
        for (int j = 0; j < nth; ++j) {
            const double th = (j + 0.5) * 2.0 * M_PI / nth;
            const DiskPoint<double> zp{rho * std::cos(th), rho * std::sin(th)};
            const double v = kernel(dist_disk(p, zp));
            th_acc += absolute ? std::abs(v) : v;
        }
        th_acc *= 2.0 * M_PI / nth;
        acc += qr.w[k] * 0.5 * std::sinh(2.0 * rp) * th_acc;
    }
    return acc;
}

double mexican_hat_wbar(double sigma1, double sigma2, double A) {
    if (!(sigma1 >= 0.0) || sigma1 > sigma2)
        throw domain_error("mexican_hat_wbar: requires 0 <= sigma1 <= sigma2");
    if (A < 0.0 || A > 1.0) throw domain_error("mexican_hat_wbar: requires 0 <= A <= 1");
    auto term = [](double s) {
        return s * std::exp(2.0 * s * s) * hypfield::erf(std::sqrt(2.0) * s);
    };
    return 0.5 * std::pow(M_PI, 1.5) * (term(sigma1) - A * term(sigma2));
}

double radial_fourier(const RadialKernel& kernel, double lambda) {
    return radial_fourier_profile([&kernel](double r) { return kernel(r); },
                                  kernel.r_max(), lambda);
}

}  // namespace hypfield
