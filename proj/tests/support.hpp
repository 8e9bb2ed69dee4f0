#pragma once

// Shared fixtures for the test suite: the shipped resonator geometry and
// dispersion data are loaded once per process, and a small adaptive-Simpson
// integrator provides an independent numerical oracle for closed-form
// normalization and convolution checks.

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "wgmopo/constants.hpp"
#include "wgmopo/material.hpp"
#include "wgmopo/wgm.hpp"

namespace support {

inline std::string data_dir() { return WGMOPO_TEST_DATA_DIR; }

inline std::string data_path(const std::string& rel) { return data_dir() + "/" + rel; }

inline const wgmopo::Geometry& geometry() {
    static const wgmopo::Geometry geom =
        wgmopo::load_geometry(data_path("geometry/wgmr_532.json"));
    return geom;
}

inline const wgmopo::MaterialDatabase& materials() {
    static const wgmopo::MaterialDatabase db = [] {
        wgmopo::MaterialDatabase out;
        out.add_file(support::data_path("materials/mg_cln_e.json"));
        out.add_file(support::data_path("materials/mg_cln_o.json"));
        out.add_file(support::data_path("materials/zno_coating.json"));
        return out;
    }();
    return db;
}

// Pump laser frequency for the 532 nm scenarios.
inline double nu_pump_532() { return wgmopo::constants::c / 532.0e-9; }

// Fresh scratch directory under the system temp root; callers append their
// own file names.  Created once, contents are cheap enough to leave behind.
inline std::string scratch_dir() {
    static const std::string dir = [] {
        auto path = std::filesystem::temp_directory_path() /
                    ("wgmopo_tests_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
        return path.string();
    }();
    return dir;
}

// Adaptive Simpson quadrature with Richardson acceptance; tolerance is on
// the absolute integral error.  Good enough as an oracle down to ~1e-12.
template <typename F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-10) {
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace support
