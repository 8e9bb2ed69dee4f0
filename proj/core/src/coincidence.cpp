#include "wgmopo/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "wgmopo/errors.hpp"
#include "wgmopo/rng.hpp"

namespace wgmopo {

namespace {

void append_dark_counts(std::vector<double>& tags, Xoshiro256pp& rng, double rate_hz,
                        double duration_s) {
    if (rate_hz <= 0.0) return;
    double t = rng.exponential(1.0 / rate_hz);
    while (t < duration_s) {
        tags.push_back(t);
        t += rng.exponential(1.0 / rate_hz);
    }
}

void finalize_channel(std::vector<double>& tags) {
    std::sort(tags.begin(), tags.end());
    // Strictly increasing tags keep downstream two-pointer scans honest.
    for (std::size_t i = 1; i < tags.size(); ++i) {
        if (tags[i] <= tags[i - 1]) {
            tags[i] = std::nextafter(tags[i - 1], std::numeric_limits<double>::max());
        }
    }
}

}  // namespace

TagStream simulate_pairs(const SimConfig& cfg) {
    if (!(cfg.pair_rate_hz > 0.0)) throw DomainError("pair rate must be positive");
    if (!(cfg.duration_s > 0.0)) throw DomainError("duration must be positive");
    if (!(cfg.tau_si_s > 0.0)) throw DomainError("tau_si must be positive");
    if (cfg.tau_f_s < 0.0) throw DomainError("tau_f must be >= 0");
    for (const double eta : {cfg.eta_signal, cfg.eta_idler, cfg.reemission_efficiency}) {
        if (!(eta >= 0.0 && eta <= 1.0)) {
            throw DomainError("efficiencies must be in [0, 1]");
        }
    }
    if (cfg.dark_rate_signal_hz < 0.0 || cfg.dark_rate_idler_hz < 0.0) {
        throw DomainError("dark rates must be >= 0");
    }
    if (cfg.jitter_sigma_signal_s < 0.0 || cfg.jitter_sigma_idler_s < 0.0) {
        throw DomainError("jitter must be >= 0");
    }

    Xoshiro256pp rng(cfg.seed);
    TagStream out;
    const bool fluorescence = cfg.tau_f_s > 0.0;

    // Fixed per-pair draw order (interarrival, sign, magnitude, re-emission
    // survival + delay, idler detection, signal detection, jitters) so a
    // given seed reproduces the identical stream regardless of which events
    // survive thinning.
    double t = rng.exponential(1.0 / cfg.pair_rate_hz);
    while (t < cfg.duration_s) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        double offset = sign * rng.exponential(cfg.tau_si_s);
        bool signal_alive = true;
        if (fluorescence) {
            signal_alive = rng.uniform() < cfg.reemission_efficiency;
            offset += rng.exponential(cfg.tau_f_s);
        }
        const bool idler_hit = rng.uniform() < cfg.eta_idler;
        const bool signal_hit = signal_alive && rng.uniform() < cfg.eta_signal;
        if (idler_hit) {
            double ti = t;
            if (cfg.jitter_sigma_idler_s > 0.0) {
                ti += cfg.jitter_sigma_idler_s * rng.gaussian();
            }
            if (ti >= 0.0 && ti <= cfg.duration_s) out.idler_s.push_back(ti);
        }
        if (signal_hit) {
            double ts = t + offset;
            if (cfg.jitter_sigma_signal_s > 0.0) {
                ts += cfg.jitter_sigma_signal_s * rng.gaussian();
            }
            if (ts >= 0.0 && ts <= cfg.duration_s) out.signal_s.push_back(ts);
        }
        t += rng.exponential(1.0 / cfg.pair_rate_hz);
    }

    append_dark_counts(out.signal_s, rng, cfg.dark_rate_signal_hz, cfg.duration_s);
    append_dark_counts(out.idler_s, rng, cfg.dark_rate_idler_hz, cfg.duration_s);
    finalize_channel(out.signal_s);
    finalize_channel(out.idler_s);
    return out;
}

Histogram CoincidenceCounts::to_histogram() const {
    Histogram h;
    h.bin_width_s = bin_width_s;
    h.tau_s.reserve(counts.size());
    h.counts.reserve(counts.size());
    for (long k = -n_side; k <= n_side; ++k) {
        h.tau_s.push_back(static_cast<double>(k) * bin_width_s);
        h.counts.push_back(static_cast<double>(counts[static_cast<std::size_t>(k + n_side)]));
    }
    return h;
}

CoincidenceCounts histogram_coincidences(const TagStream& tags, double bin_width_s,
                                         double window_s) {
    if (!(bin_width_s > 0.0)) throw DomainError("bin width must be positive");
    if (!(window_s >= bin_width_s)) throw DomainError("window must cover at least one bin");

    CoincidenceCounts hist;
    hist.bin_width_s = bin_width_s;
    hist.n_side = static_cast<long>(std::floor(window_s / bin_width_s + 1e-9));
    hist.counts.assign(static_cast<std::size_t>(2 * hist.n_side + 1), 0);

    // Two-pointer sweep: for each signal tag, the idler tags within the
    // acceptance band form a sliding window since both lists are sorted.
    const double reach = (static_cast<double>(hist.n_side) + 0.5) * bin_width_s;
    std::size_t lo = 0;
    for (const double ts : tags.signal_s) {
        while (lo < tags.idler_s.size() && tags.idler_s[lo] < ts - reach) ++lo;
        for (std::size_t j = lo; j < tags.idler_s.size() && tags.idler_s[j] <= ts + reach;
             ++j) {
            const double tau = ts - tags.idler_s[j];
            const long k = std::lround(tau / bin_width_s);
            if (std::labs(k) <= hist.n_side) {
                ++hist.counts[static_cast<std::size_t>(k + hist.n_side)];
            }
        }
    }
    return hist;
}

KlyshkoCounts estimate_klyshko(const TagStream& tags, double bin_width_s,
                               double peak_window_s, double baseline_from_s,
                               double extent_s) {
    if (!(peak_window_s < baseline_from_s && baseline_from_s < extent_s)) {
        throw DomainError("klyshko windows must satisfy peak < baseline_from < extent");
    }
    if (tags.signal_s.empty() || tags.idler_s.empty()) {
        throw DomainError("klyshko estimate needs tags in both arms");
    }
    const CoincidenceCounts hist = histogram_coincidences(tags, bin_width_s, extent_s);

    double peak_mass = 0.0;
    long n_peak = 0;
    double baseline_mass = 0.0;
    long n_baseline = 0;
    for (long k = -hist.n_side; k <= hist.n_side; ++k) {
        const double center = static_cast<double>(k) * bin_width_s;
        const double c = static_cast<double>(hist.counts[static_cast<std::size_t>(k + hist.n_side)]);
        if (std::abs(center) <= peak_window_s) {
            peak_mass += c;
            ++n_peak;
        } else if (std::abs(center) > baseline_from_s) {
            baseline_mass += c;
            ++n_baseline;
        }
    }
    if (n_baseline == 0) throw DomainError("no baseline bins outside baseline_from");

    KlyshkoCounts result;
    result.baseline_per_bin = baseline_mass / static_cast<double>(n_baseline);
    result.coincidences = peak_mass - result.baseline_per_bin * static_cast<double>(n_peak);
    if (result.coincidences <= 0.0) {
        result.valid = false;
        return result;
    }
    result.valid = true;
    result.eta_signal = result.coincidences / static_cast<double>(tags.idler_s.size());
    result.eta_idler = result.coincidences / static_cast<double>(tags.signal_s.size());
    return result;
}

}  // namespace wgmopo
