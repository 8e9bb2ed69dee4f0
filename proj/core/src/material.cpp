#include "wgmopo/material.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wgmopo/errors.hpp"
#include "wgmopo/io.hpp"

namespace wgmopo {

const char* to_string(Polarization pol) {
    return pol == Polarization::ordinary ? "ordinary" : "extraordinary";
}

Polarization polarization_from_string(const std::string& name) {
    if (name == "ordinary") return Polarization::ordinary;
    if (name == "extraordinary") return Polarization::extraordinary;
    throw DataError("unknown polarization: '" + name + "'");
}

DispersionModel DispersionModel::sellmeier(std::string material, Polarization pol,
                                           const SellmeierCoefficients& coeff,
                                           std::array<double, 2> lambda_range_um,
                                           std::array<double, 2> temp_range_c,
                                           std::string source) {
    DispersionModel m;
    m.kind_ = Kind::sellmeier;
    m.material_ = std::move(material);
    m.pol_ = pol;
    m.coeff_ = coeff;
    m.lambda_range_um_ = lambda_range_um;
    m.temp_range_c_ = temp_range_c;
    m.source_ = std::move(source);
    return m;
}

DispersionModel DispersionModel::fixed_index(std::string material, Polarization pol,
                                             double n0,
                                             std::array<double, 2> lambda_range_um,
                                             std::array<double, 2> temp_range_c,
                                             std::string source) {
    DispersionModel m;
    m.kind_ = Kind::fixed_index;
    m.material_ = std::move(material);
    m.pol_ = pol;
    m.n0_ = n0;
    m.lambda_range_um_ = lambda_range_um;
    m.temp_range_c_ = temp_range_c;
    m.source_ = std::move(source);
    return m;
}

void DispersionModel::check_domain(double lambda_um, double t_c) const {
    if (!(lambda_um >= lambda_range_um_[0] && lambda_um <= lambda_range_um_[1])) {
        std::ostringstream ss;
        ss << material_ << "/" << to_string(pol_) << ": wavelength " << lambda_um
           << " um outside validity [" << lambda_range_um_[0] << ", "
           << lambda_range_um_[1] << "] um";
        throw DomainError(ss.str());
    }
    if (!(t_c >= temp_range_c_[0] && t_c <= temp_range_c_[1])) {
        std::ostringstream ss;
        ss << material_ << "/" << to_string(pol_) << ": temperature " << t_c
           << " C outside validity [" << temp_range_c_[0] << ", " << temp_range_c_[1]
           << "] C";
        throw DomainError(ss.str());
    }
}

double DispersionModel::refractive_index(double lambda_um, double t_c) const {
    check_domain(lambda_um, t_c);
    if (kind_ == Kind::fixed_index) return n0_;
    const auto& k = coeff_;
    const double f = (t_c - 24.5) * (t_c + 570.82);
    const double l2 = lambda_um * lambda_um;
    const double p3 = k.a3 + k.b3 * f;
    const double n2 = k.a1 + k.b1 * f + (k.a2 + k.b2 * f) / (l2 - p3 * p3) +
                      (k.a4 + k.b4 * f) / (l2 - k.a5 * k.a5) - k.a6 * l2;
    if (!(n2 > 1.0)) {
        throw DomainError("Sellmeier evaluation gave n^2 <= 1 (outside physical range)");
    }
    return std::sqrt(n2) + k.delta_n;
}

double DispersionModel::group_index(double lambda_um, double t_c) const {
    check_domain(lambda_um, t_c);
    if (kind_ == Kind::fixed_index) return n0_;
    const auto& k = coeff_;
    const double f = (t_c - 24.5) * (t_c + 570.82);
    const double l2 = lambda_um * lambda_um;
    const double p3 = k.a3 + k.b3 * f;
    const double d1 = l2 - p3 * p3;
    const double d2 = l2 - k.a5 * k.a5;
    const double n2 = k.a1 + k.b1 * f + (k.a2 + k.b2 * f) / d1 +
                      (k.a4 + k.b4 * f) / d2 - k.a6 * l2;
    const double n_sell = std::sqrt(n2);
    // d(n^2)/dlam = -2 lam [ (a2+b2 f)/d1^2 + (a4+b4 f)/d2^2 + a6 ]
    const double dn2_dlam = -2.0 * lambda_um *
                            ((k.a2 + k.b2 * f) / (d1 * d1) +
                             (k.a4 + k.b4 * f) / (d2 * d2) + k.a6);
    const double dn_dlam = dn2_dlam / (2.0 * n_sell);
    return n_sell + k.delta_n - lambda_um * dn_dlam;
}

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

std::array<double, 2> parse_range(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) {
        throw DataError(where + ": expected [lo, hi] array");
    }
    std::array<double, 2> r = {j[0].get<double>(), j[1].get<double>()};
    if (!(r[0] < r[1])) throw DataError(where + ": range must satisfy lo < hi");
    return r;
}

}  // namespace

DispersionModel load_material(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("material file " + path + ": " + e.what());
    }
    require_keys(j, {"material", "polarization", "coefficients", "lambda_range_um",
                     "temp_range_c", "source"},
                 path);

    const std::string material = j.at("material").get<std::string>();
    const Polarization pol =
        polarization_from_string(j.at("polarization").get<std::string>());
    const auto lambda_range = parse_range(j.at("lambda_range_um"), path + ": lambda_range_um");
    const auto temp_range = parse_range(j.at("temp_range_c"), path + ": temp_range_c");
    const std::string source = j.at("source").get<std::string>();
    const auto& cj = j.at("coefficients");
    if (!cj.is_object()) throw DataError(path + ": coefficients must be an object");

    if (cj.contains("n0")) {
        require_keys(cj, {"n0"}, path + ": coefficients");
        return DispersionModel::fixed_index(material, pol, cj.at("n0").get<double>(),
                                            lambda_range, temp_range, source);
    }

    require_keys(cj, {"a1", "a2", "a3", "a4", "a5", "a6", "b1", "b2", "b3", "b4",
                      "delta_n"},
                 path + ": coefficients");
    SellmeierCoefficients k;
    k.a1 = cj.at("a1").get<double>();
    k.a2 = cj.at("a2").get<double>();
    k.a3 = cj.at("a3").get<double>();
    k.a4 = cj.at("a4").get<double>();
    k.a5 = cj.at("a5").get<double>();
    k.a6 = cj.at("a6").get<double>();
    k.b1 = cj.at("b1").get<double>();
    k.b2 = cj.at("b2").get<double>();
    k.b3 = cj.at("b3").get<double>();
    k.b4 = cj.at("b4").get<double>();
    k.delta_n = cj.at("delta_n").get<double>();
    return DispersionModel::sellmeier(material, pol, k, lambda_range, temp_range, source);
}

void MaterialDatabase::add(DispersionModel model) {
    const auto key = std::make_pair(model.material(), static_cast<int>(model.polarization()));
    if (models_.count(key)) {
        throw DataError("duplicate material entry: " + model.material() + "/" +
                        to_string(model.polarization()));
    }
    models_.emplace(key, std::move(model));
}

void MaterialDatabase::add_file(const std::string& path) { add(load_material(path)); }

const DispersionModel& MaterialDatabase::get(const std::string& material,
                                             Polarization pol) const {
    const auto it = models_.find(std::make_pair(material, static_cast<int>(pol)));
    if (it == models_.end()) {
        throw DataError("no material entry for " + material + "/" + to_string(pol));
    }
    return it->second;
}

bool MaterialDatabase::contains(const std::string& material, Polarization pol) const {
    return models_.count(std::make_pair(material, static_cast<int>(pol))) > 0;
}

}  // namespace wgmopo
