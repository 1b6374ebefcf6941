#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "hypfield/errors.hpp"

// Poincare-disk and SPD(2) geometry: hyperbolic distances, the (z, Delta)
// foliation of the structure-tensor space, SU(1,1) isometries with their
// Iwasawa factorization, and the polar/horocyclic coordinate charts.
//
// Conventions: the disk metric is normalized so that d(0, tanh(r)) = r
// (constant curvature -4); the SPD(2) distance combines the unimodular part
// d2 with the determinant direction as sqrt(2 (log D - log D')^2 + d2^2).

namespace hypfield {

template <typename S = double>
struct DiskPoint {
    S z1{}, z2{};

    DiskPoint() = default;
    DiskPoint(S x, S y) : z1(x), z2(y) {
        if (!(z1 * z1 + z2 * z2 < S(1)))
            throw domain_error("DiskPoint: |z| must be < 1");
    }
    explicit DiskPoint(std::complex<S> z) : DiskPoint(z.real(), z.imag()) {}

    std::complex<S> c() const { return {z1, z2}; }
    S abs2() const { return z1 * z1 + z2 * z2; }
};

template <typename S = double>
struct StructureTensor {
    // Symmetric positive-definite [[x1, x3], [x3, x2]].
    S x1{1}, x2{1}, x3{0};

    StructureTensor() = default;
    StructureTensor(S a, S b, S c) : x1(a), x2(b), x3(c) {
        if (!(x1 > S(0)) || !(x1 * x2 - x3 * x3 > S(0)))
            throw domain_error("StructureTensor: matrix must be SPD");
    }

    Eigen::Matrix<S, 2, 2> matrix() const {
        Eigen::Matrix<S, 2, 2> m;
        m << x1, x3, x3, x2;
        return m;
    }
    S det() const { return x1 * x2 - x3 * x3; }
};

template <typename S = double>
struct SU11Element {
    // [[alpha, beta], [conj(beta), conj(alpha)]] with |alpha|^2-|beta|^2 = 1.
    std::complex<S> alpha{1}, beta{0};

    SU11Element() = default;
    SU11Element(std::complex<S> a, std::complex<S> b) : alpha(a), beta(b) {
        if (std::abs(std::norm(alpha) - std::norm(beta) - S(1)) > S(1e-12))
            throw domain_error("SU11Element: |alpha|^2 - |beta|^2 must be 1");
    }

    Eigen::Matrix<std::complex<S>, 2, 2> matrix() const {
        Eigen::Matrix<std::complex<S>, 2, 2> m;
        m << alpha, beta, std::conj(beta), std::conj(alpha);
        return m;
    }
    SU11Element operator*(const SU11Element& o) const {
        return {alpha * o.alpha + beta * std::conj(o.beta),
                alpha * o.beta + beta * std::conj(o.alpha)};
    }
};

template <typename S = double>
struct IwasawaFactors {
    S phi{}, r{}, s{};  // g = rot_phi * a_r * n_s
};

enum class Subgroup { K, A, N };

namespace detail {
// arctanh with the argument clamped away from 1 so near-boundary points give
// a large finite distance instead of infinity.
template <typename S>
S atanh_clamped(S x) {
    const S lim = S(1) - S(1e-15);
    if (x < S(0)) x = S(0);
    if (x > lim) x = lim;
    return std::atanh(x);
}
}  // namespace detail

template <typename S>
S dist_disk(const DiskPoint<S>& p, const DiskPoint<S>& q) {
    const std::complex<S> z = p.c(), w = q.c();
    return detail::atanh_clamped(std::abs(z - w) / std::abs(S(1) - std::conj(z) * w));
}

template <typename S>
std::pair<DiskPoint<S>, S> coords_from_spd(const StructureTensor<S>& t) {
    const S delta = std::sqrt(t.det());
    const S xt1 = t.x1 / delta, xt2 = t.x2 / delta, xt3 = t.x3 / delta;
    const S den = S(2) + xt1 + xt2;  // = 4/(1-|z|^2) > 0
    return {DiskPoint<S>((xt1 - xt2) / den, S(2) * xt3 / den), delta};
}

template <typename S>
StructureTensor<S> spd_from_coords(const DiskPoint<S>& p, S delta) {
    if (!(delta > S(0))) throw domain_error("spd_from_coords: Delta must be > 0");
    const S d = S(1) - p.abs2();
    const S xt1 = ((S(1) + p.z1) * (S(1) + p.z1) + p.z2 * p.z2) / d;
    const S xt2 = ((S(1) - p.z1) * (S(1) - p.z1) + p.z2 * p.z2) / d;
    const S xt3 = S(2) * p.z2 / d;
    return {delta * xt1, delta * xt2, delta * xt3};
}

template <typename S>
S dist_tensor(const StructureTensor<S>& a, const StructureTensor<S>& b) {
    const auto [za, da] = coords_from_spd(a);
    const auto [zb, db] = coords_from_spd(b);
    const S dlog = std::log(da) - std::log(db);
    const S d2 = dist_disk(za, zb);
    return std::sqrt(S(2) * dlog * dlog + d2 * d2);
}

// Density of the invariant volume dV = 8 sqrt(2) dDelta/Delta dm(z) with
// respect to dDelta dz1 dz2.
template <typename S>
S volume_density(const DiskPoint<S>& p, S delta) {
    if (!(delta > S(0))) throw domain_error("volume_density: Delta must be > 0");
    const S d = S(1) - p.abs2();
    return S(8) * std::numbers::sqrt2_v<S> / (delta * d * d);
}

template <typename S>
DiskPoint<S> mobius_apply(const SU11Element<S>& g, const DiskPoint<S>& p) {
    const std::complex<S> z = p.c();
    return DiskPoint<S>((g.alpha * z + g.beta) /
                        (std::conj(g.beta) * z + std::conj(g.alpha)));
}

template <typename S = double>
SU11Element<S> subgroup_element(Subgroup kind, S t) {
    using C = std::complex<S>;
    switch (kind) {
        case Subgroup::K:  // rot_phi = diag(e^{i phi/2}, e^{-i phi/2})
            return {std::polar(S(1), t / S(2)), C(0)};
        case Subgroup::A:  // a_r, maps O to tanh(r)
            return {C(std::cosh(t)), C(std::sinh(t))};
        case Subgroup::N:  // n_s
            return {C(S(1), t), C(S(0), -t)};
    }
    throw domain_error("subgroup_element: unknown subgroup");
}

// Algebraic Iwasawa factorization g = rot_phi a_r n_s. The rotation angle phi
// lives on [0, 4pi): rot_phi has period 4pi in SU(1,1) (half-angle entries),
// so a [0, 2pi) canonical range could not reproduce every element entrywise.
template <typename S>
IwasawaFactors<S> iwasawa_decompose(const SU11Element<S>& g) {
    const std::complex<S> apb = g.alpha + g.beta;  // = e^{i phi/2} e^{r}
    S phi = S(2) * std::arg(apb);
    if (phi < S(0)) phi += S(4) * std::numbers::pi_v<S>;
    const S r = std::log(std::abs(apb));
    const std::complex<S> amb = (g.alpha - g.beta) * std::polar(S(1), -phi / S(2));
    const S s = amb.imag() / (S(2) * std::exp(r));
    return {phi, r, s};
}

template <typename S>
SU11Element<S> iwasawa_recompose(const IwasawaFactors<S>& f) {
    return subgroup_element<S>(Subgroup::K, f.phi) *
           subgroup_element<S>(Subgroup::A, f.r) *
           subgroup_element<S>(Subgroup::N, f.s);
}

template <typename S>
std::pair<S, S> to_polar(const DiskPoint<S>& p) {
    const S rho = std::sqrt(p.abs2());
    if (rho == S(0)) return {S(0), S(0)};  // theta = 0 at the chart singularity
    return {detail::atanh_clamped(rho), std::atan2(p.z2, p.z1)};
}

template <typename S>
DiskPoint<S> from_polar(S r, S theta) {
    if (!(r >= S(0))) throw domain_error("from_polar: r must be >= 0");
    return DiskPoint<S>(std::polar(std::tanh(r), theta));
}

// <z, b> = (1/2) log((1-|z|^2)/|z-b|^2), the signed horocyclic height of z
// over the horocycle through O based at the boundary point b.
template <typename S>
S horocyclic_inner(const DiskPoint<S>& p, std::complex<S> b) {
    if (std::abs(std::abs(b) - S(1)) > S(1e-12))
        throw domain_error("horocyclic_inner: b must be on the unit circle");
    const std::complex<S> z = p.c();
    return S(0.5) * std::log((S(1) - p.abs2()) / std::norm(z - b));
}

// Horocyclic chart z = n_s a_r . O. The inverse is algebraic: r is the
// horocyclic height at b = 1, and s follows from solving the Mobius action
// linearly; its imaginary residue is the inversion residual.
template <typename S>
std::pair<S, S> to_horocyclic(const DiskPoint<S>& p) {
    const std::complex<S> z = p.c();
    const S r = horocyclic_inner(p, std::complex<S>(1));
    if (std::abs(z - std::complex<S>(1)) < S(1e-300)) return {S(0), r};
    const std::complex<S> sc = (z * std::cosh(r) - std::sinh(r)) /
                               (std::complex<S>(0, 1) * std::exp(-r) *
                                (z - std::complex<S>(1)));
    if (std::abs(sc.imag()) > S(1e-8) * std::max(S(1), std::abs(sc)))
        throw convergence_error("to_horocyclic: inversion residual too large");
    return {sc.real(), r};
}

template <typename S>
DiskPoint<S> from_horocyclic(S s, S r) {
    return mobius_apply(subgroup_element<S>(Subgroup::N, s) *
                            subgroup_element<S>(Subgroup::A, r),
                        DiskPoint<S>{});
}

}  // namespace hypfield
