#include "wgmopo/voigt.hpp"

#include <array>
#include <cmath>

#include "wgmopo/constants.hpp"
#include "wgmopo/errors.hpp"

namespace wgmopo {

namespace {

constexpr int k_weideman_n = 64;
constexpr double k_inv_sqrt_pi = 0.5641895835477562869;  // 1/sqrt(pi)

// Weideman expansion coefficients a_1..a_N.  They are the leading Fourier
// coefficients of exp(-t^2)(L^2 + t^2) under the rational map
// t = L tan(theta/2); a plain O(N M) DFT at startup is cheap enough that no
// FFT is needed.
std::array<double, k_weideman_n> weideman_coefficients() {
    constexpr int m = 2 * k_weideman_n;   // quadrature half-size
    constexpr int m2 = 2 * m;
    const double ell = std::sqrt(k_weideman_n / std::sqrt(2.0));
    std::array<double, m2> f{};
    f[0] = 0.0;
    for (int idx = 1; idx < m2; ++idx) {
        const double theta = (idx - m) * constants::pi / m;
        const double t = ell * std::tan(0.5 * theta);
        f[idx] = std::exp(-t * t) * (ell * ell + t * t);
    }
    std::array<double, k_weideman_n> a{};
    for (int j = 1; j <= k_weideman_n; ++j) {
        double acc = 0.0;
        for (int idx = 1; idx < m2; ++idx) {
            acc += f[idx] * std::cos(2.0 * constants::pi * j * idx / m2);
        }
        // Index shift of the half-period rotation contributes (-1)^j.
        a[j - 1] = (j % 2 == 0 ? 1.0 : -1.0) * acc / m2;
    }
    return a;
}

std::complex<double> faddeeva_weideman(std::complex<double> z) {
    static const std::array<double, k_weideman_n> a = weideman_coefficients();
    static const double ell = std::sqrt(k_weideman_n / std::sqrt(2.0));
    const std::complex<double> iz(-z.imag(), z.real());           // i z
    const std::complex<double> denom = ell - iz;                   // L - i z
    const std::complex<double> big_z = (ell + iz) / denom;
    // p(Z) = sum_j a_j Z^(j-1), Horner from the highest power.
    std::complex<double> p(a[k_weideman_n - 1], 0.0);
    for (int j = k_weideman_n - 2; j >= 0; --j) p = p * big_z + a[j];
    return 2.0 * p / (denom * denom) + k_inv_sqrt_pi / denom;
}

std::complex<double> faddeeva_continued_fraction(std::complex<double> z) {
    // w(z) = (i/sqrt(pi)) / (z - 1/2 / (z - 1 / (z - 3/2 / ( ... )))),
    // truncated at depth 10; excellent for |z| >= 16.
    std::complex<double> r(0.0, 0.0);
    for (int k = 10; k >= 1; --k) r = (0.5 * k) / (z - r);
    const std::complex<double> inv = 1.0 / (z - r);
    return std::complex<double>(0.0, k_inv_sqrt_pi) * inv;
}

}  // namespace

std::complex<double> faddeeva(std::complex<double> z) {
    if (z.imag() < 0.0) {
        throw DomainError("faddeeva: implemented for the upper half-plane only");
    }
    if (std::norm(z) >= 256.0) return faddeeva_continued_fraction(z);
    return faddeeva_weideman(z);
}

double voigt_profile(double delta_hz, double fwhm_gauss_hz, double fwhm_lorentz_hz) {
    if (fwhm_gauss_hz < 0.0 || fwhm_lorentz_hz < 0.0) {
        throw DomainError("voigt_profile: widths must be >= 0");
    }
    if (fwhm_gauss_hz == 0.0 && fwhm_lorentz_hz == 0.0) {
        throw DomainError("voigt_profile: at least one width must be positive");
    }
    if (fwhm_gauss_hz == 0.0) {
        const double half = 0.5 * fwhm_lorentz_hz;
        return half / constants::pi / (delta_hz * delta_hz + half * half);
    }
    const double sigma = fwhm_gauss_hz / std::sqrt(8.0 * std::log(2.0));
    if (fwhm_lorentz_hz == 0.0) {
        const double u = delta_hz / sigma;
        return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * constants::pi));
    }
    const std::complex<double> z(delta_hz / (sigma * std::sqrt(2.0)),
                                 0.5 * fwhm_lorentz_hz / (sigma * std::sqrt(2.0)));
    return faddeeva(z).real() / (sigma * std::sqrt(2.0 * constants::pi));
}

}  // namespace wgmopo
