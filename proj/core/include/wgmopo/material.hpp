#pragma once

#include <array>
#include <map>
#include <string>

namespace wgmopo {

enum class Polarization { ordinary, extraordinary };

const char* to_string(Polarization pol);
Polarization polarization_from_string(const std::string& name);

// Temperature-dependent Sellmeier model in the Gayer et al. form,
//
//   n^2 = a1 + b1 f + (a2 + b2 f) / (lam^2 - (a3 + b3 f)^2)
//       + (a4 + b4 f) / (lam^2 - a5^2) - a6 lam^2,
//   f = (T - 24.5)(T + 570.82),   lam in um, T in degC,
//
// plus a constant per-polarization calibration offset delta_n added to n.
// The offset absorbs the device-to-device index difference (doping level,
// congruence, strain) that a bulk Sellmeier fit cannot know about; it is
// determined once from resonator anchor measurements and shipped with the
// coefficient file.
//
// Reference for the functional form and the bulk coefficients:
// O. Gayer, Z. Sacks, E. Galun, A. Arie, Appl. Phys. B 91, 343 (2008).
struct SellmeierCoefficients {
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0;
    double b1 = 0, b2 = 0, b3 = 0, b4 = 0;
    double delta_n = 0;
};

class DispersionModel {
public:
    enum class Kind { sellmeier, fixed_index };

    static DispersionModel sellmeier(std::string material, Polarization pol,
                                     const SellmeierCoefficients& coeff,
                                     std::array<double, 2> lambda_range_um,
                                     std::array<double, 2> temp_range_c,
                                     std::string source);
    static DispersionModel fixed_index(std::string material, Polarization pol,
                                       double n0,
                                       std::array<double, 2> lambda_range_um,
                                       std::array<double, 2> temp_range_c,
                                       std::string source);

    // Phase index at wavelength lambda_um [um] and temperature t_c [degC].
    // Throws DomainError outside the validity ranges.
    double refractive_index(double lambda_um, double t_c) const;

    // Group index n_g = n - lam dn/dlam, with the derivative taken
    // analytically from the Sellmeier form (the constant offset delta_n
    // shifts n and n_g equally).
    double group_index(double lambda_um, double t_c) const;

    Kind kind() const { return kind_; }
    const std::string& material() const { return material_; }
    Polarization polarization() const { return pol_; }
    const std::array<double, 2>& lambda_range_um() const { return lambda_range_um_; }
    const std::array<double, 2>& temp_range_c() const { return temp_range_c_; }
    const std::string& source() const { return source_; }
    const SellmeierCoefficients& coefficients() const { return coeff_; }

private:
    DispersionModel() = default;
    void check_domain(double lambda_um, double t_c) const;

    Kind kind_ = Kind::sellmeier;
    std::string material_;
    Polarization pol_ = Polarization::ordinary;
    SellmeierCoefficients coeff_;
    double n0_ = 0.0;
    std::array<double, 2> lambda_range_um_ = {0, 0};
    std::array<double, 2> temp_range_c_ = {0, 0};
    std::string source_;
};

// Loads one material JSON file.  The file must contain exactly the keys
// material, polarization, coefficients, lambda_range_um, temp_range_c and
// source; the coefficients map either holds the ten Sellmeier terms plus
// delta_n, or a single n0 for a fixed-index entry.  Throws DataError on any
// schema violation.
DispersionModel load_material(const std::string& path);

// Keyed collection of dispersion models, looked up by (material name,
// polarization).  At most one entry per key; duplicates are a DataError.
class MaterialDatabase {
public:
    void add(DispersionModel model);
    void add_file(const std::string& path);
    const DispersionModel& get(const std::string& material, Polarization pol) const;
    bool contains(const std::string& material, Polarization pol) const;
    std::size_t size() const { return models_.size(); }

private:
    std::map<std::pair<std::string, int>, DispersionModel> models_;
};

}  // namespace wgmopo
