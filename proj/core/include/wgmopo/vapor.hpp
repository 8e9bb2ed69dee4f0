#pragma once

#include <array>
#include <string>
#include <vector>

namespace wgmopo {

// One hyperfine component of an alkali D line: absolute frequency and its
// share of the total line strength (ground-state population times hyperfine
// transition strength; the shares of a manifold sum to 1).
struct LineComponent {
    std::string label;
    double nu0_hz = 0.0;
    double strength = 0.0;
};

struct SpeciesLine {
    std::string species;
    std::string transition;
    double mass_kg = 0.0;
    double abundance = 1.0;       // isotopic fraction of the element
    double gamma_nat_hz = 0.0;    // natural linewidth (FWHM)
    std::vector<LineComponent> components;
    double vp_a = 0.0;            // log10 P[Torr] = A - B / T[K]
    double vp_b = 0.0;
    std::array<double, 2> vp_valid_c = {0.0, 0.0};
    std::string source;
};

// Loads and validates one line-data JSON file (strict schema; component
// strengths must sum to 1).  Throws DataError on any violation.
SpeciesLine load_line(const std::string& path);

// Saturated vapor pressure [Pa] of the element at cell temperature t_c,
// from the two-parameter Antoine-type fit; DomainError outside the fit's
// validity range.
double vapor_pressure_pa(const SpeciesLine& line, double t_c);

// Number density [1/m^3] of this isotope: abundance * P / (k_B T).
double number_density_m3(const SpeciesLine& line, double t_c);

// Doppler FWHM of a component at nu0 [Hz]:
//   dnu_D = nu0 sqrt(8 ln2 k_B T / (M c^2)).
double doppler_fwhm_hz(const SpeciesLine& line, double nu0_hz, double t_c);

// A heated vapor reference cell.  A natural-abundance rubidium cell lists
// both isotopes; their densities share the elemental vapor pressure through
// the abundance factors.
struct VaporCell {
    std::vector<SpeciesLine> species;
    double length_m = 0.0;
    double t_c = 0.0;
};

// Absorption coefficient [1/m] at frequency nu: for every component, the
// integrated cross-section lambda^2 A / (8 pi) with A = 2 pi Gamma_nat (the
// closed form of pi r_e c f for the line) times the area-normalized Voigt
// profile with that component's Doppler and natural widths, weighted by the
// component strength and the isotope density.
double absorption_coefficient_m1(const VaporCell& cell, double nu_hz);

// Optical depth OD(nu) = alpha(nu) * L and transmission exp(-OD).
double optical_depth(const VaporCell& cell, double nu_hz);
double transmission(const VaporCell& cell, double nu_hz);

// OD sampled on a frequency grid.
std::vector<double> optical_depth_spectrum(const VaporCell& cell,
                                           const std::vector<double>& nu_grid_hz);

}  // namespace wgmopo
