#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "wgmopo/constants.hpp"
#include "wgmopo/errors.hpp"
#include "wgmopo/phase_matching.hpp"

#include "support.hpp"

using namespace wgmopo;

namespace {

// The fundamental conversion channel identified by the 532 nm / 895 nm /
// 1312 nm anchor; all step and lock tests start here.
ConversionChannel anchor_channel() {
    return make_channel(support::geometry(), 38770, 26143, 1, 1, 0, 0);
}

PhaseMatchSolution anchor_solution() {
    static const PhaseMatchSolution sol = [] {
        auto roots = solve_temperature(support::geometry(), support::materials(),
                                       anchor_channel(), support::nu_pump_532(), 140.0, 142.0);
        REQUIRE(roots.size() == 1);
        return roots.front();
    }();
    return sol;
}

}  // namespace

TEST_CASE("energy residual at the anchor temperature") {
    const double r = energy_residual(support::geometry(), support::materials(),
                                     anchor_channel(), 141.0866, support::nu_pump_532());
    CHECK(std::abs(r - (-667059.0)) < 100.0);
}

TEST_CASE("temperature root of the anchor channel") {
    const auto sol = anchor_solution();
    CHECK(sol.t_c == doctest::Approx(141.0866142).epsilon(1e-8));
    CHECK(std::abs(sol.residual_hz) < 1e6);
    CHECK(sol.lambda_s_nm() == doctest::Approx(895.0014640).epsilon(1e-8));
    CHECK(sol.lambda_i_nm() == doctest::Approx(1311.6772963).epsilon(1e-8));
    CHECK(sol.channel.pump.m == sol.channel.signal.m + sol.channel.idler.m);

    // Energy bookkeeping: nu_p - nu_s - nu_i is exactly the residual.
    CHECK(sol.nu_p - sol.nu_s - sol.nu_i == doctest::Approx(sol.residual_hz).epsilon(1e-9));
}

TEST_CASE("no root in a window that excludes the crossing") {
    const auto roots = solve_temperature(support::geometry(), support::materials(),
                                         anchor_channel(), support::nu_pump_532(), 150.0, 152.0);
    CHECK(roots.empty());
}

TEST_CASE("locking the pump to its mode shifts the operating point") {
    const auto locked = lock_to_pump_mode(support::geometry(), support::materials(),
                                          anchor_solution());
    // With the laser handed over to the pump resonance the root moves to
    // where the locked residual vanishes and nu_p becomes the eigenfrequency.
    CHECK(locked.t_c == doctest::Approx(140.99481).epsilon(2e-7));
    CHECK(locked.nu_p - support::nu_pump_532() == doctest::Approx(4.3173e9).epsilon(1e-3));
    CHECK(std::abs(locked.residual_hz) < 1e6);
    CHECK(locked.channel.pump.m == 64913);
}

TEST_CASE("coarse step keeps the pump mode and moves the pair by one FSR difference") {
    const auto locked = lock_to_pump_mode(support::geometry(), support::materials(),
                                          anchor_solution());
    const auto up = step_fixed_pump(support::geometry(), support::materials(), locked, +1);

    CHECK(up.solution.channel.pump.m == locked.channel.pump.m);
    CHECK(up.solution.channel.signal.m == locked.channel.signal.m + 1);
    CHECK(up.solution.channel.idler.m == locked.channel.idler.m - 1);
    CHECK(up.dnu_s == doctest::Approx(8.2013e9).epsilon(5e-4));
    CHECK(up.dt_c == doctest::Approx(4.032e-3).epsilon(5e-3));
    CHECK(up.dnu_p == doctest::Approx(-0.3977e9).epsilon(5e-3));

    // Involution: stepping back returns to the start within solver noise.
    const auto back = step_fixed_pump(support::geometry(), support::materials(),
                                      up.solution, -1);
    CHECK(back.solution.channel.signal.m == locked.channel.signal.m);
    CHECK(std::abs(back.solution.t_c - locked.t_c) < 1e-6);
    CHECK(std::abs(back.solution.nu_s - locked.nu_s) < 1e5);
}

TEST_CASE("coarse step agrees with the FSR/slope prediction") {
    const auto& geom = support::geometry();
    const auto& db = support::materials();
    const auto locked = lock_to_pump_mode(geom, db, anchor_solution());
    const auto up = step_fixed_pump(geom, db, locked, +1);

    // Prediction from first-order mode motion: hopping (m_s+1, m_i-1) at
    // fixed temperature changes the locked residual by FSR_s - FSR_i, which
    // the temperature absorbs at rate s_p - s_s - s_i; the signal then moves
    // by FSR_s + s_s dT.
    const double fsr_s = free_spectral_range(geom, db, locked.channel.signal, locked.t_c);
    const double fsr_i = free_spectral_range(geom, db, locked.channel.idler, locked.t_c);
    const double s_p = thermal_slope(geom, db, locked.channel.pump, locked.t_c);
    const double s_s = thermal_slope(geom, db, locked.channel.signal, locked.t_c);
    const double s_i = thermal_slope(geom, db, locked.channel.idler, locked.t_c);
    const double dt_pred = (fsr_s - fsr_i) / (s_p - s_s - s_i);
    const double dnu_s_pred = fsr_s + s_s * dt_pred;
    CHECK(std::abs(up.dnu_s - dnu_s_pred) < 0.25 * std::abs(up.dnu_s));
    CHECK(std::abs(up.dt_c - dt_pred) < 0.25 * std::abs(up.dt_c));
}

TEST_CASE("fine step hops the pump mode with the signal mode pinned") {
    const auto locked = lock_to_pump_mode(support::geometry(), support::materials(),
                                          anchor_solution());
    const auto up = step_pump_mode(support::geometry(), support::materials(), locked, +1);

    CHECK(up.solution.channel.pump.m == locked.channel.pump.m + 1);
    CHECK(up.solution.channel.idler.m == locked.channel.idler.m + 1);
    CHECK(up.solution.channel.signal == locked.channel.signal);
    CHECK(up.dnu_p == doctest::Approx(9.1142e9).epsilon(1e-3));
    CHECK(up.dnu_s == doctest::Approx(350.83e6).epsilon(3e-3));
    CHECK(up.dt_c == doctest::Approx(-12.603e-3).epsilon(3e-3));

    const auto back = step_pump_mode(support::geometry(), support::materials(),
                                     up.solution, -1);
    CHECK(std::abs(back.solution.t_c - locked.t_c) < 1e-6);
}

TEST_CASE("step direction is validated") {
    CHECK_THROWS_AS((void)step_fixed_pump(support::geometry(), support::materials(),
                                          anchor_solution(), 2),
                    DomainError);
    CHECK_THROWS_AS((void)step_pump_mode(support::geometry(), support::materials(),
                                         anchor_solution(), 0),
                    DomainError);
}

TEST_CASE("pump excursion needed to bridge one coarse interval") {
    const auto& geom = support::geometry();
    const auto& db = support::materials();
    const auto locked = lock_to_pump_mode(geom, db, anchor_solution());
    const double gap = std::abs(step_fixed_pump(geom, db, locked, +1).dnu_s);

    const auto req = pump_tuning_requirement(geom, db, locked, gap);
    CHECK(req.n_steps == 24);
    CHECK(std::abs(req.step_signal_hz) == doctest::Approx(350.83e6).epsilon(3e-3));
    CHECK(req.excursion_hz == doctest::Approx(218.74e9).epsilon(2e-3));
    CHECK(req.excursion_hz ==
          doctest::Approx(req.n_steps * std::abs(req.step_pump_hz)).epsilon(1e-12));

    const auto zero = pump_tuning_requirement(geom, db, locked, 0.0);
    CHECK(zero.n_steps == 0);
    CHECK(zero.excursion_hz == 0.0);
    CHECK_THROWS_AS(
        (void)pump_tuning_requirement(geom, db, locked, -1.0), DomainError);
}

TEST_CASE("narrow channel scan: conservation, ordering, monotone branches") {
    const auto& geom = support::geometry();
    const auto& db = support::materials();
    ScanBounds bounds;
    bounds.q_max = 2;
    bounds.p_max = 2;
    bounds.ms_min = 38765;
    bounds.ms_max = 38775;
    const auto curves = scan_channels(geom, db, support::nu_pump_532(), 140.6, 141.6, bounds);
    REQUIRE(!curves.empty());

    bool found_anchor = false;
    for (const auto& curve : curves) {
        REQUIRE(!curve.points.empty());
        REQUIRE(std::is_sorted(curve.points.begin(), curve.points.end(),
                               [](const auto& a, const auto& b) { return a.t_c < b.t_c; }));
        // Fixed-pump-mode sub-branches: lambda_s(T) monotone away from
        // degeneracy (none occurs in this window).
        std::map<long, std::vector<const PhaseMatchSolution*>> by_mp;
        for (const auto& pt : curve.points) {
            CHECK(std::abs(pt.residual_hz) < 1e6);
            CHECK(pt.channel.pump.m == pt.channel.signal.m + pt.channel.idler.m);
            by_mp[pt.channel.pump.m].push_back(&pt);
            if (pt.channel.signal.m == 38770 && pt.channel.idler.m == 26143 &&
                curve.family == FamilyLabel{1, 1, 1, 0, 0}) {
                CHECK(pt.t_c == doctest::Approx(141.0866142).epsilon(1e-7));
                found_anchor = true;
            }
        }
        for (const auto& [mp, pts] : by_mp) {
            for (std::size_t i = 1; i < pts.size(); ++i) {
                CHECK(pts[i]->lambda_s_nm() > pts[i - 1]->lambda_s_nm());
            }
        }
    }
    CHECK(found_anchor);
}

TEST_CASE("scan results do not depend on the thread count") {
    const auto& geom = support::geometry();
    const auto& db = support::materials();
    ScanBounds bounds;
    bounds.q_max = 1;
    bounds.p_max = 1;
    bounds.ms_min = 38768;
    bounds.ms_max = 38772;
    ScanOptions serial;
    serial.threads = 1;
    ScanOptions parallel;
    parallel.threads = 4;
    const auto a = scan_channels(geom, db, support::nu_pump_532(), 140.8, 141.4, bounds, serial);
    const auto b = scan_channels(geom, db, support::nu_pump_532(), 140.8, 141.4, bounds, parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].points.size() == b[i].points.size());
        CHECK(a[i].family == b[i].family);
        for (std::size_t j = 0; j < a[i].points.size(); ++j) {
            CHECK(a[i].points[j].t_c == b[i].points[j].t_c);
            CHECK(a[i].points[j].nu_s == b[i].points[j].nu_s);
        }
    }
}

TEST_CASE("pair-rate profile peaks at the locked root and is unimodal") {
    const auto& geom = support::geometry();
    const auto& db = support::materials();
    const auto locked = lock_to_pump_mode(geom, db, anchor_solution());

    std::vector<double> grid;
    const int n = 201;
    for (int i = 0; i < n; ++i) grid.push_back(locked.t_c - 0.005 + 0.01 * i / (n - 1));
    const auto rate = spdc_rate_profile(geom, db, locked, grid);
    REQUIRE(rate.size() == grid.size());

    const auto it = std::max_element(rate.begin(), rate.end());
    const auto peak = static_cast<std::size_t>(it - rate.begin());
    CHECK(*it == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(peak == (n - 1) / 2);
    for (std::size_t i = 1; i <= peak; ++i) CHECK(rate[i] >= rate[i - 1]);
    for (std::size_t i = peak + 1; i < rate.size(); ++i) CHECK(rate[i] <= rate[i - 1]);

    // Width converted to signal frequency stays inside the ~500 MHz
    // Doppler-broadened acceptance window of the atomic line.
    double lo = grid.front(), hi = grid.back();
    for (std::size_t i = 0; i < rate.size(); ++i) {
        if (rate[i] >= 0.5) { lo = grid[i]; break; }
    }
    for (std::size_t i = rate.size(); i-- > 0;) {
        if (rate[i] >= 0.5) { hi = grid[i]; break; }
    }
    const double s_s = thermal_slope(geom, db, locked.channel.signal, locked.t_c);
    CHECK((hi - lo) * std::abs(s_s) < 500e6);
}
