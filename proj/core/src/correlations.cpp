#include "wgmopo/correlations.hpp"

#include <cmath>

#include "wgmopo/constants.hpp"
#include "wgmopo/errors.hpp"

namespace wgmopo {

namespace {

void check_tau_si(double tau_si) {
    if (!(tau_si > 0.0)) throw DomainError("tau_si must be positive");
}

}  // namespace

double g2_direct(double tau, double tau_si) {
    check_tau_si(tau_si);
    return std::exp(-std::abs(tau) / tau_si) / (2.0 * tau_si);
}

double g2_fluorescence(double tau, double tau_si, double tau_f) {
    check_tau_si(tau_si);
    if (!(tau_f > 0.0)) throw DomainError("tau_f must be positive");
    const double norm = 2.0 * (tau_si + tau_f);
    if (tau <= 0.0) return std::exp(tau / tau_si) / norm;
    const double eps = tau_f - tau_si;
    double bridge;
    if (std::abs(eps) < 1e-9 * tau_si) {
        bridge = tau * std::exp(-tau / tau_si) / (2.0 * tau_si * tau_f);
    } else {
        // (e^(-tau/tau_f) - e^(-tau/tau_si)) / (2 eps) without cancellation:
        // factor out the slower exponential.
        const double delta = eps / (tau_si * tau_f);  // 1/tau_si - 1/tau_f
        bridge = -std::exp(-tau / tau_f) * std::expm1(-tau * delta) / (2.0 * eps);
    }
    return std::exp(-tau / tau_f) / norm + bridge;
}

double cdf_direct(double tau, double tau_si) {
    check_tau_si(tau_si);
    if (tau <= 0.0) return 0.5 * std::exp(tau / tau_si);
    return 1.0 - 0.5 * std::exp(-tau / tau_si);
}

double cdf_fluorescence(double tau, double tau_si, double tau_f) {
    check_tau_si(tau_si);
    if (!(tau_f > 0.0)) throw DomainError("tau_f must be positive");
    const double norm = 2.0 * (tau_si + tau_f);
    if (tau <= 0.0) return tau_si * std::exp(tau / tau_si) / norm;
    const double f_left = tau_si / norm;
    const double grow_f = -tau_f * std::expm1(-tau / tau_f);    // tau_f (1 - e^(-tau/tau_f))
    const double grow_s = -tau_si * std::expm1(-tau / tau_si);
    const double eps = tau_f - tau_si;
    double bridge;
    if (std::abs(eps) < 1e-9 * tau_si) {
        bridge = 0.5 * (-std::expm1(-tau / tau_si) - (tau / tau_si) * std::exp(-tau / tau_si));
    } else {
        bridge = (grow_f - grow_s) / (2.0 * eps);
    }
    return f_left + grow_f / norm + bridge;
}

double peak_delay(double tau_si, double tau_f) {
    check_tau_si(tau_si);
    if (!(tau_f > 0.0)) throw DomainError("tau_f must be positive");
    const double eps = tau_si - tau_f;
    if (std::abs(eps) < 1e-6 * tau_si) return 0.5 * tau_si - 0.375 * eps;
    return tau_si * tau_f / eps * std::log(2.0 * tau_si / (tau_si + tau_f));
}

double pair_bandwidth_hz(double tau_si) {
    check_tau_si(tau_si);
    return 1.0 / (2.0 * constants::pi * tau_si);
}

double sample_offset(Xoshiro256pp& rng, double tau_si, double tau_f) {
    check_tau_si(tau_si);
    if (tau_f < 0.0) throw DomainError("tau_f must be >= 0");
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    double tau = sign * rng.exponential(tau_si);
    if (tau_f > 0.0) tau += rng.exponential(tau_f);
    return tau;
}

KlyshkoEfficiencies klyshko_efficiency(long coincidences, long singles_a,
                                       long singles_b) {
    if (coincidences < 0) throw DomainError("coincidences must be >= 0");
    if (singles_a <= 0 || singles_b <= 0) {
        throw DomainError("Klyshko estimate needs positive singles in both arms");
    }
    if (coincidences == 0) return {0.0, 0.0};
    return {static_cast<double>(coincidences) / static_cast<double>(singles_b),
            static_cast<double>(coincidences) / static_cast<double>(singles_a)};
}

}  // namespace wgmopo
