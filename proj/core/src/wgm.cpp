#include "wgmopo/wgm.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wgmopo/constants.hpp"
#include "wgmopo/errors.hpp"
#include "wgmopo/io.hpp"

namespace wgmopo {

namespace {

// First ten zeros of the Airy function Ai(-zeta) (Abramowitz & Stegun 10.4).
constexpr double k_airy_zeros[10] = {
    2.338107410459767,  4.087949444130970,  5.520559828095551,
    6.786708090071759,  7.944133587120853,  9.022650853340980,
    10.040174341558085, 11.008524303733262, 11.936015563236262,
    12.828776752865757};

double polarization_term(Polarization pol, double n) {
    const double root = std::sqrt(n * n - 1.0);
    // z-cut disk: the extraordinary (TM-like) mode sees n/sqrt(n^2-1), the
    // ordinary (TE-like) mode 1/(n sqrt(n^2-1)).
    return pol == Polarization::extraordinary ? n / root : 1.0 / (n * root);
}

}  // namespace

double Geometry::radius_m(double t_c) const {
    return r_mm * 1e-3 * (1.0 + alpha_thermal_per_k * (t_c - 25.0));
}

Geometry load_geometry(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("geometry file " + path + ": " + e.what());
    }
    const std::set<std::string> expected = {"R_mm",    "rho_mm",
                                            "material", "pol_map",
                                            "alpha_thermal_per_K", "Q_loaded"};
    for (const auto& key : expected) {
        if (!j.contains(key)) throw DataError(path + ": missing key '" + key + "'");
    }
    for (const auto& item : j.items()) {
        if (!expected.count(item.key())) {
            throw DataError(path + ": unknown key '" + item.key() + "'");
        }
    }
    Geometry g;
    g.r_mm = j.at("R_mm").get<double>();
    g.rho_mm = j.at("rho_mm").get<double>();
    g.material = j.at("material").get<std::string>();
    const auto& pm = j.at("pol_map");
    for (const auto& role : {"pump", "signal", "idler"}) {
        if (!pm.contains(role)) throw DataError(path + ": pol_map missing '" + std::string(role) + "'");
    }
    g.pol_pump = polarization_from_string(pm.at("pump").get<std::string>());
    g.pol_signal = polarization_from_string(pm.at("signal").get<std::string>());
    g.pol_idler = polarization_from_string(pm.at("idler").get<std::string>());
    g.alpha_thermal_per_k = j.at("alpha_thermal_per_K").get<double>();
    g.q_loaded = j.at("Q_loaded").get<double>();
    if (!(g.r_mm > 0.0) || !(g.rho_mm > 0.0)) throw DataError(path + ": radii must be positive");
    if (!(g.q_loaded > 0.0)) throw DataError(path + ": Q_loaded must be positive");
    return g;
}

const char* to_string(Role role) {
    switch (role) {
        case Role::pump: return "pump";
        case Role::signal: return "signal";
        default: return "idler";
    }
}

Polarization geometry_polarization(const Geometry& geom, Role role) {
    switch (role) {
        case Role::pump: return geom.pol_pump;
        case Role::signal: return geom.pol_signal;
        default: return geom.pol_idler;
    }
}

double airy_zero(int q) {
    if (q < 1 || q > 10) {
        throw DomainError("radial index q must be in [1, 10], got " + std::to_string(q));
    }
    return k_airy_zeros[q - 1];
}

double angular_eigenvalue(const Geometry& geom, double m, int q, int p,
                          Polarization pol, double n) {
    if (m < 100.0) throw DomainError("azimuthal index too small for the asymptotic expansion");
    if (p < 0) throw DomainError("polar index p must be >= 0");
    const double zeta = airy_zero(q);
    const double half_m = 0.5 * m;
    const double cube = std::cbrt(half_m);
    return m + zeta * cube + (p + 0.5) * std::sqrt(geom.r_mm / geom.rho_mm) -
           polarization_term(pol, n) + (3.0 * zeta * zeta / 20.0) / cube;
}

namespace {

// Shared fixed-point kernel; m may be continuous.
double resonance_frequency_real_m(const Geometry& geom, const MaterialDatabase& db,
                                  double m, int q, int p, Polarization pol, double t_c,
                                  double nu_seed) {
    const DispersionModel& mat = db.get(geom.material, pol);
    const double radius = geom.radius_m(t_c);
    double nu = nu_seed > 0.0
                    ? nu_seed
                    : constants::c * m / (2.0 * constants::pi * radius * 2.2);
    for (int iter = 0; iter < 300; ++iter) {
        const double lambda_um = constants::c / nu * 1e6;
        const double n = mat.refractive_index(lambda_um, t_c);
        const double nu_next = constants::c * angular_eigenvalue(geom, m, q, p, pol, n) /
                               (2.0 * constants::pi * radius * n);
        if (std::abs(nu_next - nu) < 1.0) return nu_next;
        nu = nu_next;
    }
    std::ostringstream ss;
    ss << "resonance fixed point did not converge (m=" << m << ", q=" << q
       << ", p=" << p << ", T=" << t_c << ")";
    throw ConvergenceError(ss.str());
}

}  // namespace

double resonance_frequency(const Geometry& geom, const MaterialDatabase& db,
                           const ModeIndices& mode, double t_c, double nu_seed) {
    return resonance_frequency_real_m(geom, db, static_cast<double>(mode.m), mode.q,
                                      mode.p, mode.pol, t_c, nu_seed);
}

double continuum_m(const Geometry& geom, const MaterialDatabase& db, int q, int p,
                   Polarization pol, double nu, double t_c) {
    const DispersionModel& mat = db.get(geom.material, pol);
    const double radius = geom.radius_m(t_c);
    const double n = mat.refractive_index(constants::c / nu * 1e6, t_c);
    // 2 pi R n / lambda is an upper bound for m since Phi(m) > m; the
    // correction terms are below 400 for any mode this model accepts.
    const double x = 2.0 * constants::pi * radius * n * nu / constants::c;
    double lo = x - 400.0, hi = x + 10.0;
    auto f = [&](double m) {
        return resonance_frequency_real_m(geom, db, m, q, p, pol, t_c, nu) - nu;
    };
    double flo = f(lo), fhi = f(hi);
    if (!(flo < 0.0 && fhi > 0.0)) {
        throw ConvergenceError("continuum_m: root not bracketed");
    }
    // Illinois variant of regula falsi: superlinear here because the
    // residual is nearly linear in m (d nu / d m ~ FSR).
    double mlo = lo, mhi = hi;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = mhi - fhi * (mhi - mlo) / (fhi - flo);
        const double fmid = f(mid);
        if (std::abs(fmid) < 1.0 || mhi - mlo < 1e-9) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            mlo = mid;
            flo = fmid;
            fhi *= 0.5;  // Illinois weighting prevents endpoint stagnation
        } else {
            mhi = mid;
            fhi = fmid;
            flo *= 0.5;
        }
    }
    throw ConvergenceError("continuum_m: no convergence");
}

ModeMatch nearest_mode(const Geometry& geom, const MaterialDatabase& db, int q, int p,
                       Polarization pol, double nu_target, double t_c) {
    const double m_real = continuum_m(geom, db, q, p, pol, nu_target, t_c);
    ModeMatch best;
    bool first = true;
    for (const long m : {static_cast<long>(std::floor(m_real)),
                         static_cast<long>(std::ceil(m_real))}) {
        ModeIndices mode{m, q, p, pol};
        const double nu = resonance_frequency(geom, db, mode, t_c, nu_target);
        if (first || std::abs(nu - nu_target) < std::abs(best.detuning)) {
            best = ModeMatch{mode, nu, nu - nu_target};
            first = false;
        }
    }
    return best;
}

double free_spectral_range(const Geometry& geom, const MaterialDatabase& db,
                           const ModeIndices& mode, double t_c) {
    const double nu0 = resonance_frequency(geom, db, mode, t_c);
    ModeIndices up = mode;
    up.m += 1;
    return resonance_frequency(geom, db, up, t_c, nu0) - nu0;
}

double mode_linewidth(const Geometry& geom, double nu) {
    if (!(nu > 0.0)) throw DomainError("mode_linewidth: frequency must be positive");
    return nu / geom.q_loaded;
}

double thermal_slope(const Geometry& geom, const MaterialDatabase& db,
                     const ModeIndices& mode, double t_c) {
    const double h = 1e-3;
    const double nu0 = resonance_frequency(geom, db, mode, t_c);
    const double up = resonance_frequency(geom, db, mode, t_c + h, nu0);
    const double dn = resonance_frequency(geom, db, mode, t_c - h, nu0);
    return (up - dn) / (2.0 * h);
}

}  // namespace wgmopo
