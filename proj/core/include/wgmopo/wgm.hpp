#pragma once

#include <string>

#include "wgmopo/material.hpp"

namespace wgmopo {

// Millimeter-scale disk resonator geometry.  R_mm is the rim radius at the
// 25 degC reference temperature, rho_mm the rim curvature radius (equal to
// R for a sphere-like rim), alpha the linear thermal expansion coefficient,
// and q_loaded the loaded quality factor used for linewidths.
struct Geometry {
    double r_mm = 0.0;
    double rho_mm = 0.0;
    std::string material;
    Polarization pol_pump = Polarization::extraordinary;
    Polarization pol_signal = Polarization::ordinary;
    Polarization pol_idler = Polarization::ordinary;
    double alpha_thermal_per_k = 0.0;
    double q_loaded = 0.0;

    // Rim radius in meters at temperature t_c, R(T) = R0 (1 + alpha (T-25)).
    double radius_m(double t_c) const;
};

Geometry load_geometry(const std::string& path);

enum class Role { pump, signal, idler };
const char* to_string(Role role);
Polarization geometry_polarization(const Geometry& geom, Role role);

// Whispering-gallery mode labels: azimuthal m, radial q >= 1, polar p >= 0.
struct ModeIndices {
    long m = 0;
    int q = 1;
    int p = 0;
    Polarization pol = Polarization::ordinary;

    bool operator==(const ModeIndices&) const = default;
};

// q-th Airy function zero magnitude (Ai(-zeta_q) = 0), q in [1, 10].
double airy_zero(int q);

// Dimensionless angular eigenvalue of mode (m, q, p) at surface index n:
//
//   Phi = m + zeta_q (m/2)^(1/3) + (p + 1/2) sqrt(R/rho) - P(pol, n)
//         + (3 zeta_q^2 / 20) (m/2)^(-1/3),
//
// with P = n/sqrt(n^2-1) for TM-like (extraordinary, z-cut) and
// P = 1/(n sqrt(n^2-1)) for TE-like polarization.  This is the standard
// large-m expansion of the WGM dispersion relation (Breunig et al. 2013;
// Demchenko & Gorodetsky 2013).  `m` may be non-integral; the expansion is
// used as a smooth interpolant when locating modes near a target frequency.
double angular_eigenvalue(const Geometry& geom, double m, int q, int p,
                          Polarization pol, double n);

// Resonance frequency of a mode at temperature t_c, found by fixed-point
// iteration of  nu = c Phi / (2 pi R(T) n(c/nu, T))  to |dnu| < 1 Hz.
// `nu_seed` (optional) warm-starts the iteration.  Throws ConvergenceError
// if 300 iterations do not converge and DomainError if the wavelength or
// temperature leaves the material validity range.
double resonance_frequency(const Geometry& geom, const MaterialDatabase& db,
                           const ModeIndices& mode, double t_c, double nu_seed = 0.0);

// Real-valued azimuthal index m such that a (q, p, pol) mode would sit
// exactly at frequency nu at temperature t_c.  Root of the same dispersion
// relation with m continuous.
double continuum_m(const Geometry& geom, const MaterialDatabase& db, int q, int p,
                   Polarization pol, double nu, double t_c);

struct ModeMatch {
    ModeIndices mode;
    double nu = 0.0;      // exact resonance frequency [Hz]
    double detuning = 0.0;  // nu - nu_target [Hz]
};

// Integer mode of the (q, p, pol) ladder closest in frequency to nu_target.
ModeMatch nearest_mode(const Geometry& geom, const MaterialDatabase& db, int q, int p,
                       Polarization pol, double nu_target, double t_c);

// Free spectral range nu(m+1) - nu(m) at fixed (q, p, pol, T).
double free_spectral_range(const Geometry& geom, const MaterialDatabase& db,
                           const ModeIndices& mode, double t_c);

// Loaded full linewidth kappa = nu / Q of a resonance at frequency nu [Hz].
double mode_linewidth(const Geometry& geom, double nu);

// d nu / d T of a mode [Hz/K], central difference with a 1 mK step.
double thermal_slope(const Geometry& geom, const MaterialDatabase& db,
                     const ModeIndices& mode, double t_c);

}  // namespace wgmopo
