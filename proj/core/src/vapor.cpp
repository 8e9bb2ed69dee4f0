#include "wgmopo/vapor.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wgmopo/constants.hpp"
#include "wgmopo/errors.hpp"
#include "wgmopo/io.hpp"
#include "wgmopo/voigt.hpp"

namespace wgmopo {

namespace {

void require_keys(const nlohmann::json& j, const std::set<std::string>& expected,
                  const std::string& where) {
    for (const auto& key : expected) {
        if (!j.contains(key)) throw DataError(where + ": missing key '" + key + "'");
    }
    for (const auto& item : j.items()) {
        if (!expected.count(item.key())) {
            throw DataError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

}  // namespace

SpeciesLine load_line(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("line file " + path + ": " + e.what());
    }
    require_keys(j, {"species", "transition", "mass_amu", "abundance", "Gamma_nat_MHz",
                     "components", "vapor_pressure", "source"},
                 path);

    SpeciesLine line;
    line.species = j.at("species").get<std::string>();
    line.transition = j.at("transition").get<std::string>();
    line.mass_kg = j.at("mass_amu").get<double>() * constants::amu;
    line.abundance = j.at("abundance").get<double>();
    line.gamma_nat_hz = j.at("Gamma_nat_MHz").get<double>() * 1e6;
    line.source = j.at("source").get<std::string>();
    if (!(line.mass_kg > 0.0)) throw DataError(path + ": mass must be positive");
    if (!(line.abundance > 0.0 && line.abundance <= 1.0)) {
        throw DataError(path + ": abundance must be in (0, 1]");
    }
    if (!(line.gamma_nat_hz > 0.0)) throw DataError(path + ": Gamma_nat must be positive");

    const auto& comps = j.at("components");
    if (!comps.is_array() || comps.empty()) {
        throw DataError(path + ": components must be a non-empty array");
    }
    double strength_sum = 0.0;
    for (const auto& cj : comps) {
        require_keys(cj, {"label", "nu0_THz", "strength"}, path + ": component");
        LineComponent c;
        c.label = cj.at("label").get<std::string>();
        c.nu0_hz = cj.at("nu0_THz").get<double>() * 1e12;
        c.strength = cj.at("strength").get<double>();
        if (!(c.nu0_hz > 0.0)) throw DataError(path + ": component frequency must be positive");
        if (!(c.strength > 0.0)) throw DataError(path + ": component strength must be positive");
        strength_sum += c.strength;
        line.components.push_back(std::move(c));
    }
    if (std::abs(strength_sum - 1.0) > 1e-9) {
        std::ostringstream ss;
        ss << path << ": component strengths sum to " << strength_sum << ", expected 1";
        throw DataError(ss.str());
    }

    const auto& vp = j.at("vapor_pressure");
    require_keys(vp, {"A", "B", "valid_C"}, path + ": vapor_pressure");
    line.vp_a = vp.at("A").get<double>();
    line.vp_b = vp.at("B").get<double>();
    const auto& valid = vp.at("valid_C");
    if (!valid.is_array() || valid.size() != 2) {
        throw DataError(path + ": vapor_pressure.valid_C must be [lo, hi]");
    }
    line.vp_valid_c = {valid[0].get<double>(), valid[1].get<double>()};
    if (!(line.vp_valid_c[0] < line.vp_valid_c[1])) {
        throw DataError(path + ": vapor_pressure validity range must satisfy lo < hi");
    }
    return line;
}

double vapor_pressure_pa(const SpeciesLine& line, double t_c) {
    if (!(t_c >= line.vp_valid_c[0] && t_c <= line.vp_valid_c[1])) {
        std::ostringstream ss;
        ss << line.species << ": temperature " << t_c
           << " C outside vapor-pressure fit validity [" << line.vp_valid_c[0] << ", "
           << line.vp_valid_c[1] << "] C";
        throw DomainError(ss.str());
    }
    const double t_k = constants::celsius_to_kelvin(t_c);
    return std::pow(10.0, line.vp_a - line.vp_b / t_k) * constants::torr;
}

double number_density_m3(const SpeciesLine& line, double t_c) {
    const double t_k = constants::celsius_to_kelvin(t_c);
    return line.abundance * vapor_pressure_pa(line, t_c) / (constants::k_b * t_k);
}

double doppler_fwhm_hz(const SpeciesLine& line, double nu0_hz, double t_c) {
    if (!(nu0_hz > 0.0)) throw DomainError("doppler_fwhm: frequency must be positive");
    const double t_k = constants::celsius_to_kelvin(t_c);
    return nu0_hz * std::sqrt(8.0 * std::log(2.0) * constants::k_b * t_k /
                              (line.mass_kg * constants::c * constants::c));
}

double absorption_coefficient_m1(const VaporCell& cell, double nu_hz) {
    if (!(nu_hz > 0.0)) throw DomainError("absorption: frequency must be positive");
    if (cell.species.empty()) throw DomainError("absorption: cell has no species");
    double alpha = 0.0;
    for (const auto& line : cell.species) {
        const double density = number_density_m3(line, cell.t_c);
        for (const auto& comp : line.components) {
            // Frequency-integrated cross section sigma_int = lambda^2 * A / (8 pi)
            // with A = 2 pi * Gamma_nat the angular decay rate (g_J'/g_J = 1 for
            // the D1 fine-structure line); equals pi*r_e*c*f with the D1
            // oscillator strength.  Hyperfine branching and ground-state
            // population fractions live in the per-component strengths.
            const double lambda = constants::c / comp.nu0_hz;
            const double sigma0 = lambda * lambda * line.gamma_nat_hz / 4.0;
            const double fwhm_d = doppler_fwhm_hz(line, comp.nu0_hz, cell.t_c);
            const double profile =
                voigt_profile(nu_hz - comp.nu0_hz, fwhm_d, line.gamma_nat_hz);
            alpha += density * comp.strength * sigma0 * profile;
        }
    }
    return alpha;
}

double optical_depth(const VaporCell& cell, double nu_hz) {
    if (!(cell.length_m > 0.0)) throw DomainError("optical_depth: cell length must be positive");
    return absorption_coefficient_m1(cell, nu_hz) * cell.length_m;
}

double transmission(const VaporCell& cell, double nu_hz) {
    return std::exp(-optical_depth(cell, nu_hz));
}

std::vector<double> optical_depth_spectrum(const VaporCell& cell,
                                           const std::vector<double>& nu_grid_hz) {
    std::vector<double> od;
    od.reserve(nu_grid_hz.size());
    for (const double nu : nu_grid_hz) od.push_back(optical_depth(cell, nu));
    return od;
}

}  // namespace wgmopo
