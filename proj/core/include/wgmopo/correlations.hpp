#pragma once

#include "wgmopo/rng.hpp"

namespace wgmopo {

// Normalized signal-idler arrival-time-difference densities [1/s] in
// tau = t_signal - t_idler.  All times in seconds; each density integrates
// to 1 over the real line.

// Direct pair emission: back-to-back double-exponential,
//   p(tau) = exp(-|tau| / tau_si) / (2 tau_si).
double g2_direct(double tau_s, double tau_si_s);

// Pair emission followed by resonant absorption and re-emission of the
// signal photon with lifetime tau_f: the direct density convolved with a
// one-sided exponential delay,
//   tau <= 0:  p = exp(tau/tau_si) / (2 (tau_si + tau_f))
//   tau >  0:  p = exp(-tau/tau_f) / (2 (tau_si + tau_f))
//              + (exp(-tau/tau_f) - exp(-tau/tau_si)) / (2 (tau_f - tau_si)),
// evaluated in an expm1 form that stays finite for tau_f -> tau_si.
double g2_fluorescence(double tau_s, double tau_si_s, double tau_f_s);

// Cumulative distributions of the two densities (exact closed forms; used
// for unbiased binned fits and KS tests).
double cdf_direct(double tau_s, double tau_si_s);
double cdf_fluorescence(double tau_s, double tau_si_s, double tau_f_s);

// Location of the fluorescence density maximum,
//   tau* = tau_si tau_f / (tau_si - tau_f) ln(2 tau_si / (tau_si + tau_f)),
// with the series limit tau_si/2 - 3 (tau_si - tau_f)/8 near degeneracy.
double peak_delay(double tau_si_s, double tau_f_s);

// Pair bandwidth gamma = 1 / (2 pi tau_si) [Hz] of the direct correlation.
double pair_bandwidth_hz(double tau_si_s);

// One random draw of tau from the direct (tau_f = 0) or fluorescence
// density; consumes sign, magnitude and (fluorescence) delay variates in
// that order.
double sample_offset(Xoshiro256pp& rng, double tau_si_s, double tau_f_s);

struct KlyshkoEfficiencies {
    double eta_a = 0.0;
    double eta_b = 0.0;
};

// Klyshko heralded efficiencies from raw counts: eta_a = C / S_b and
// eta_b = C / S_a.  Zero singles are a DomainError; zero coincidences give
// zero efficiencies.
KlyshkoEfficiencies klyshko_efficiency(long coincidences, long singles_a,
                                       long singles_b);

}  // namespace wgmopo
