#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wgmopo/correlations.hpp"
#include "wgmopo/errors.hpp"

#include "support.hpp"

using namespace wgmopo;

namespace {

constexpr double tau_si = 9.4e-9;         // signal-idler decay of the source
constexpr double tau_si_f = 7.4e-9;       // source constant in the vapor runs
constexpr double tau_f = 37e-9;           // fluorescence re-emission lifetime

// One-sided Kolmogorov-Smirnov distance of draws against a CDF.
template <typename Cdf>
double ks_distance(std::vector<double> draws, const Cdf& cdf) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const double f = cdf(draws[i]);
        d = std::max(d, std::abs((i + 1) / n - f));
        d = std::max(d, std::abs(i / n - f));
    }
    return d;
}

}  // namespace

TEST_CASE("direct correlation: peak value, symmetry, normalization") {
    CHECK(g2_direct(0.0, tau_si) == doctest::Approx(1.0 / (2.0 * tau_si)).epsilon(1e-12));
    CHECK(g2_direct(3e-9, tau_si) == doctest::Approx(g2_direct(-3e-9, tau_si)).epsilon(1e-12));

    const double total = support::integrate(
        [](double t) { return g2_direct(t, tau_si); }, -40.0 * tau_si, 40.0 * tau_si, 1e-9);
    CHECK(std::abs(total - 1.0) < 1e-6);
}

TEST_CASE("fluorescence correlation: normalization and convolution identity") {
    const double total = support::integrate(
        [](double t) { return g2_fluorescence(t, tau_si_f, tau_f); }, -40.0 * tau_si_f,
        40.0 * tau_f + 40.0 * tau_si_f, 1e-9);
    CHECK(std::abs(total - 1.0) < 1e-6);

    // The heralded-fluorescence shape is the direct shape convolved with a
    // one-sided exponential re-emission delay; check against quadrature.
    for (const double tau : {-25e-9, -8e-9, -1e-9, 0.0, 1.5e-9, 6e-9, 10.16e-9, 20e-9,
                             55e-9, 140e-9}) {
        const double direct_conv = support::integrate(
            [&](double w) {
                return g2_direct(tau - w, tau_si_f) * std::exp(-w / tau_f) / tau_f;
            },
            0.0, 60.0 * tau_f, 0.05);
        const double model = g2_fluorescence(tau, tau_si_f, tau_f);
        CHECK(std::abs(model - direct_conv) <= 1e-6 * std::abs(direct_conv));
    }
}

TEST_CASE("fluorescence correlation: degenerate lifetimes are continuous") {
    const double t = 11e-9;
    const double exact = g2_fluorescence(t, tau_si, tau_si);
    const double above = g2_fluorescence(t, tau_si, tau_si * (1.0 + 1e-9));
    const double below = g2_fluorescence(t, tau_si, tau_si * (1.0 - 1e-9));
    CHECK(std::abs(above - exact) < 1e-6 * exact);
    CHECK(std::abs(below - exact) < 1e-6 * exact);
}

TEST_CASE("cumulative distributions match the densities") {
    // Direct: closed form versus quadrature from far in the left tail.
    for (const double x : {-12e-9, -2e-9, 0.0, 4e-9, 30e-9}) {
        const double numeric = support::integrate(
            [](double t) { return g2_direct(t, tau_si); }, -45.0 * tau_si, x, 1e-10);
        CHECK(std::abs(cdf_direct(x, tau_si) - numeric) < 1e-8);
    }
    for (const double x : {-12e-9, 0.0, 6e-9, 40e-9, 160e-9}) {
        const double numeric = support::integrate(
            [](double t) { return g2_fluorescence(t, tau_si_f, tau_f); }, -45.0 * tau_si_f,
            x, 1e-9);
        CHECK(std::abs(cdf_fluorescence(x, tau_si_f, tau_f) - numeric) < 1e-7);
    }
    CHECK(cdf_direct(-1.0, tau_si) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cdf_direct(1.0, tau_si) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cdf_fluorescence(1.0, tau_si_f, tau_f) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("peak delay closed form and numeric argmax") {
    // tau_peak = tau_si tau_f / (tau_si - tau_f) * ln(2 tau_si / (tau_si + tau_f)).
    const double expected = tau_si_f * tau_f / (tau_si_f - tau_f) *
                            std::log(2.0 * tau_si_f / (tau_si_f + tau_f));
    const double pd = peak_delay(tau_si_f, tau_f);
    CHECK(pd == doctest::Approx(expected).epsilon(1e-12));
    CHECK(pd == doctest::Approx(10.16216e-9).epsilon(1e-5));

    // Golden-section search over the positive lobe.
    double lo = 0.0, hi = 5.0 * tau_f;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    while (hi - lo > 1e-16) {
        const double a = hi - phi * (hi - lo);
        const double b = lo + phi * (hi - lo);
        if (g2_fluorescence(a, tau_si_f, tau_f) < g2_fluorescence(b, tau_si_f, tau_f)) {
            lo = a;
        } else {
            hi = b;
        }
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(pd).epsilon(1e-6));

    // Near-degenerate lifetimes switch to the series branch smoothly.
    const double eps = 1e-8;
    const double up = peak_delay(tau_si, tau_si * (1.0 + eps));
    const double down = peak_delay(tau_si, tau_si * (1.0 - eps));
    CHECK(std::abs(up - down) < 1e-6 * up);
}

TEST_CASE("pair bandwidth of the Lorentzian cross-spectrum") {
    CHECK(pair_bandwidth_hz(9.4e-9) == doctest::Approx(16.9314e6).epsilon(1e-4));
    CHECK(pair_bandwidth_hz(37e-9) == doctest::Approx(4.3015e6).epsilon(1e-4));
    CHECK(pair_bandwidth_hz(9.4e-9) ==
          doctest::Approx(1.0 / (2.0 * constants::pi * 9.4e-9)).epsilon(1e-12));
}

TEST_CASE("offset sampler matches the analytic distributions") {
    const std::size_t n = 200000;
    const double d_crit = 1.62762 / std::sqrt(double(n));  // alpha = 0.01

    Xoshiro256pp rng(2024);
    std::vector<double> direct(n);
    for (auto& d : direct) d = sample_offset(rng, tau_si, 0.0);
    CHECK(ks_distance(direct, [](double x) { return cdf_direct(x, tau_si); }) < d_crit);

    std::vector<double> fluor(n);
    for (auto& d : fluor) d = sample_offset(rng, tau_si_f, tau_f);
    CHECK(ks_distance(fluor, [](double x) { return cdf_fluorescence(x, tau_si_f, tau_f); }) <
          d_crit);
}

TEST_CASE("Klyshko arithmetic and validation") {
    const auto eff = klyshko_efficiency(150, 10000, 20000);
    CHECK(eff.eta_a == doctest::Approx(150.0 / 20000.0).epsilon(1e-12));
    CHECK(eff.eta_b == doctest::Approx(150.0 / 10000.0).epsilon(1e-12));
    const auto zero = klyshko_efficiency(0, 10, 10);
    CHECK(zero.eta_a == 0.0);
    CHECK_THROWS_AS((void)klyshko_efficiency(-1, 10, 10), DomainError);
    CHECK_THROWS_AS((void)klyshko_efficiency(5, 0, 10), DomainError);
}

TEST_CASE("correlation argument validation") {
    CHECK_THROWS_AS((void)g2_direct(0.0, 0.0), DomainError);
    CHECK_THROWS_AS((void)g2_fluorescence(0.0, tau_si, -1e-9), DomainError);
    CHECK_THROWS_AS((void)peak_delay(0.0, tau_f), DomainError);
}
