#pragma once

#include <cstdint>
#include <vector>

#include "wgmopo/fit.hpp"

namespace wgmopo {

// Time-tag simulation of a photon-pair source with detection losses, dark
// counts and timing jitter.  tau_f_s = 0 selects direct emission; a
// positive value adds the fluorescence re-emission delay to every signal
// photon, with reemission_efficiency thinning the signal arm on top of
// eta_signal.
struct SimConfig {
    double pair_rate_hz = 0.0;
    double duration_s = 0.0;
    double tau_si_s = 0.0;
    double tau_f_s = 0.0;
    double reemission_efficiency = 1.0;
    double eta_signal = 1.0;
    double eta_idler = 1.0;
    double dark_rate_signal_hz = 0.0;
    double dark_rate_idler_hz = 0.0;
    double jitter_sigma_signal_s = 0.0;
    double jitter_sigma_idler_s = 0.0;
    std::uint64_t seed = 1;
};

// Detected time tags per arm, sorted and strictly increasing (exact ties
// are separated by one ulp).  Events pushed outside [0, duration] by the
// emission delay or jitter are dropped.
struct TagStream {
    std::vector<double> signal_s;
    std::vector<double> idler_s;
};

TagStream simulate_pairs(const SimConfig& config);

// Symmetric coincidence histogram in tau = t_signal - t_idler.  Bin k
// (centers k * bin_width, |k| <= n_side) collects tag pairs with
// llround(tau / bin_width) = k; n_side = floor(window / bin_width).
struct CoincidenceCounts {
    double bin_width_s = 0.0;
    long n_side = 0;
    std::vector<long> counts;  // 2 n_side + 1 entries, bin centers -n_side..n_side

    Histogram to_histogram() const;
};

CoincidenceCounts histogram_coincidences(const TagStream& tags, double bin_width_s,
                                         double window_s);

struct KlyshkoCounts {
    double eta_signal = 0.0;   // C / idler singles
    double eta_idler = 0.0;    // C / signal singles
    double coincidences = 0.0; // accidental-corrected peak mass
    double baseline_per_bin = 0.0;
    bool valid = false;        // false when the peak does not rise above baseline
};

// Heralding efficiencies from a tag stream: sums the histogram inside
// |tau| <= peak_window, subtracts the flat accidental level estimated from
// bins with |tau| > baseline_from, and divides by the opposite arm's
// singles (Klyshko).  The histogram extends to +-extent.
KlyshkoCounts estimate_klyshko(const TagStream& tags, double bin_width_s,
                               double peak_window_s, double baseline_from_s,
                               double extent_s);

}  // namespace wgmopo
