#pragma once

#include <complex>

namespace wgmopo {

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im(z) >= 0.
//
// Interior points use Weideman's N-term rational approximation (Weideman,
// SIAM J. Numer. Anal. 31, 1497 (1994)) with N = 64, whose coefficients are
// computed once at startup; far points (|z| >= 16) use the Gautschi
// continued fraction.  Both branches are accurate to ~1e-13 relative, far
// tighter than the line-shape tolerances downstream.
std::complex<double> faddeeva(std::complex<double> z);

// Area-normalized Voigt profile [1/Hz] at detuning delta_hz from line
// center, for Gaussian and Lorentzian components given as full widths at
// half maximum:
//
//   V(delta) = Re w( (delta + i G_L/2) / (sigma sqrt(2)) ) / (sigma sqrt(2 pi)),
//   sigma = G_G / sqrt(8 ln 2).
//
// Degenerate widths reduce to the pure Gaussian or Lorentzian; both zero is
// a DomainError.
double voigt_profile(double delta_hz, double fwhm_gauss_hz, double fwhm_lorentz_hz);

}  // namespace wgmopo
