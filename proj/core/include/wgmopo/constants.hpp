#pragma once

// Physical constants (CODATA 2018 / SI exact values where applicable).

namespace wgmopo::constants {

inline constexpr double c = 299792458.0;           // speed of light [m/s], exact
inline constexpr double k_b = 1.380649e-23;        // Boltzmann constant [J/K], exact
inline constexpr double amu = 1.66053906660e-27;   // atomic mass unit [kg]
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double torr = 133.322368421;      // 1 Torr in Pa (101325/760)
inline constexpr double zero_celsius = 273.15;     // 0 degC in K

inline constexpr double celsius_to_kelvin(double t_c) { return t_c + zero_celsius; }

}  // namespace wgmopo::constants
