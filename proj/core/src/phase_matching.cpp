#include "wgmopo/phase_matching.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "wgmopo/constants.hpp"
#include "wgmopo/errors.hpp"

namespace wgmopo {

namespace {

void check_mode(const ModeIndices& mode, const char* what) {
    if (mode.m < 100) {
        throw DomainError(std::string(what) + ": azimuthal index must be >= 100");
    }
    if (mode.q < 1 || mode.q > 10) {
        throw DomainError(std::string(what) + ": radial index must be in [1, 10]");
    }
    if (mode.p < 0) {
        throw DomainError(std::string(what) + ": polar index must be >= 0");
    }
}

}  // namespace

ConversionChannel::ConversionChannel(const ModeIndices& pump_mode,
                                     const ModeIndices& signal_mode,
                                     const ModeIndices& idler_mode)
    : pump(pump_mode), signal(signal_mode), idler(idler_mode) {
    check_mode(pump, "pump");
    check_mode(signal, "signal");
    check_mode(idler, "idler");
    if (pump.m != signal.m + idler.m) {
        std::ostringstream ss;
        ss << "channel violates azimuthal momentum conservation: m_p=" << pump.m
           << " != m_s+m_i=" << signal.m + idler.m;
        throw DomainError(ss.str());
    }
}

ConversionChannel make_channel(const Geometry& geom, long m_s, long m_i, int q_s,
                               int q_i, int p_s, int p_i, int q_pump, int p_pump) {
    return ConversionChannel(
        ModeIndices{m_s + m_i, q_pump, p_pump, geom.pol_pump},
        ModeIndices{m_s, q_s, p_s, geom.pol_signal},
        ModeIndices{m_i, q_i, p_i, geom.pol_idler});
}

double PhaseMatchSolution::lambda_s_nm() const { return constants::c / nu_s * 1e9; }
double PhaseMatchSolution::lambda_i_nm() const { return constants::c / nu_i * 1e9; }

double energy_residual(const Geometry& geom, const MaterialDatabase& db,
                       const ConversionChannel& channel, double t_c, double nu_p) {
    if (!(nu_p > 0.0)) throw DomainError("energy_residual: pump frequency must be positive");
    const double nu_s = resonance_frequency(geom, db, channel.signal, t_c);
    const double nu_i = resonance_frequency(geom, db, channel.idler, t_c);
    return nu_p - nu_s - nu_i;
}

namespace {

// Pair-frequency evaluator with warm-started eigenfrequency seeds; the
// solvers call it at nearby temperatures thousands of times.
class PairEval {
public:
    PairEval(const Geometry& geom, const MaterialDatabase& db,
             const ConversionChannel& channel)
        : geom_(geom), db_(db), channel_(channel),
          same_mode_(channel.signal == channel.idler) {}

    double nu_s(double t_c) {
        seed_s_ = resonance_frequency(geom_, db_, channel_.signal, t_c, seed_s_);
        return seed_s_;
    }
    double nu_i(double t_c) {
        if (same_mode_) return nu_s(t_c);
        seed_i_ = resonance_frequency(geom_, db_, channel_.idler, t_c, seed_i_);
        return seed_i_;
    }
    double nu_pump_mode(double t_c) {
        seed_p_ = resonance_frequency(geom_, db_, channel_.pump, t_c, seed_p_);
        return seed_p_;
    }
    double pair_sum(double t_c) {
        // For a degenerate channel (identical labels) evaluate once so the
        // two halves are bit-identical.
        const double s = nu_s(t_c);
        return s + (same_mode_ ? s : nu_i(t_c));
    }

private:
    const Geometry& geom_;
    const MaterialDatabase& db_;
    const ConversionChannel& channel_;
    bool same_mode_;
    double seed_s_ = 0.0, seed_i_ = 0.0, seed_p_ = 0.0;
};

// Bisection of f (either orientation) on a bracket with f(lo) and f(hi) of
// opposite sign; stops when the bracket is below 1e-7 degC and checks the
// final residual against tol.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double f_lo, double f_hi, double tol_hz) {
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    for (int iter = 0; iter < 120 && hi - lo > 1e-7; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    const double root = 0.5 * (lo + hi);
    if (std::abs(f(root)) > tol_hz) {
        throw ConvergenceError("temperature bisection left a residual above tolerance");
    }
    return root;
}

// Sign-change scan on a uniform grid followed by bisection; returns all
// roots in ascending order.
std::vector<double> find_roots(const std::function<double(double)>& f, double t_lo,
                               double t_hi, const SolveOptions& opts) {
    if (!(t_lo < t_hi)) throw DomainError("temperature range must satisfy t_lo < t_hi");
    if (!(opts.grid_step_c > 0.0)) throw DomainError("grid step must be positive");
    const long n_seg = std::max(1L, static_cast<long>(std::ceil((t_hi - t_lo) / opts.grid_step_c)));
    std::vector<double> roots;
    double t_prev = t_lo;
    double f_prev = f(t_prev);
    for (long k = 1; k <= n_seg; ++k) {
        const double t_next = (k == n_seg) ? t_hi : t_lo + (t_hi - t_lo) * double(k) / double(n_seg);
        const double f_next = f(t_next);
        if (f_prev == 0.0) {
            roots.push_back(t_prev);
        } else if ((f_prev < 0.0) != (f_next < 0.0)) {
            roots.push_back(bisect_root(f, t_prev, t_next, f_prev, f_next, opts.tolerance_hz));
        }
        t_prev = t_next;
        f_prev = f_next;
    }
    if (f_prev == 0.0) roots.push_back(t_prev);
    return roots;
}

PhaseMatchSolution build_solution(const Geometry& geom, const MaterialDatabase& db,
                                  const ConversionChannel& channel, double t_root,
                                  double nu_p, const SolveOptions& opts) {
    PairEval eval(geom, db, channel);
    PhaseMatchSolution sol{channel};
    sol.t_c = t_root;
    sol.nu_s = eval.nu_s(t_root);
    sol.nu_i = (channel.signal == channel.idler) ? sol.nu_s : eval.nu_i(t_root);
    sol.nu_p = nu_p;
    sol.residual_hz = nu_p - sol.nu_s - sol.nu_i;
    if (std::abs(sol.residual_hz) > opts.tolerance_hz) {
        throw ConvergenceError("solution residual above tolerance");
    }
    return sol;
}

}  // namespace

std::vector<PhaseMatchSolution> solve_temperature(const Geometry& geom,
                                                  const MaterialDatabase& db,
                                                  const ConversionChannel& channel,
                                                  double nu_p, double t_lo, double t_hi,
                                                  const SolveOptions& opts) {
    if (!(nu_p > 0.0)) throw DomainError("solve_temperature: pump frequency must be positive");
    PairEval eval(geom, db, channel);
    auto f = [&](double t) { return nu_p - eval.pair_sum(t); };
    std::vector<PhaseMatchSolution> out;
    for (const double root : find_roots(f, t_lo, t_hi, opts)) {
        out.push_back(build_solution(geom, db, channel, root, nu_p, opts));
    }
    return out;
}

std::vector<PhaseMatchSolution> solve_locked(const Geometry& geom,
                                             const MaterialDatabase& db,
                                             const ConversionChannel& channel,
                                             double t_lo, double t_hi,
                                             const SolveOptions& opts) {
    PairEval eval(geom, db, channel);
    auto f = [&](double t) { return eval.nu_pump_mode(t) - eval.pair_sum(t); };
    std::vector<PhaseMatchSolution> out;
    for (const double root : find_roots(f, t_lo, t_hi, opts)) {
        PairEval fresh(geom, db, channel);
        const double nu_p = fresh.nu_pump_mode(root);
        out.push_back(build_solution(geom, db, channel, root, nu_p, opts));
    }
    return out;
}

namespace {

StepResult finish_step(const PhaseMatchSolution& from,
                       std::vector<PhaseMatchSolution> roots, const char* what) {
    if (roots.empty()) {
        throw ConvergenceError(std::string(what) +
                               ": no energy-conserving temperature within +-3 degC");
    }
    const auto nearest = std::min_element(
        roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.t_c - from.t_c) < std::abs(b.t_c - from.t_c);
        });
    StepResult step{*nearest};
    step.dt_c = nearest->t_c - from.t_c;
    step.dnu_p = nearest->nu_p - from.nu_p;
    step.dnu_s = nearest->nu_s - from.nu_s;
    step.dnu_i = nearest->nu_i - from.nu_i;
    return step;
}

}  // namespace

StepResult step_fixed_pump(const Geometry& geom, const MaterialDatabase& db,
                           const PhaseMatchSolution& from, int direction,
                           const SolveOptions& opts) {
    if (direction != 1 && direction != -1) {
        throw DomainError("step direction must be +1 or -1");
    }
    const auto& ch = from.channel;
    // The pair hops one mode outward/inward while the pump stays locked to
    // the same m_p, so the root condition is the locked residual of the new
    // channel.  |FSR_s - FSR_i| ~ 0.2 GHz must be soaked up by temperature.
    ConversionChannel next(
        ch.pump,
        ModeIndices{ch.signal.m + direction, ch.signal.q, ch.signal.p, ch.signal.pol},
        ModeIndices{ch.idler.m - direction, ch.idler.q, ch.idler.p, ch.idler.pol});
    auto roots = solve_locked(geom, db, next, from.t_c - 3.0, from.t_c + 3.0, opts);
    return finish_step(from, std::move(roots), "step_fixed_pump");
}

StepResult step_pump_mode(const Geometry& geom, const MaterialDatabase& db,
                          const PhaseMatchSolution& from, int direction,
                          const SolveOptions& opts) {
    if (direction != 1 && direction != -1) {
        throw DomainError("step direction must be +1 or -1");
    }
    const auto& ch = from.channel;
    // The pump hops one azimuthal mode; momentum conservation moves the
    // idler with it while the signal mode stays put.
    ConversionChannel next(
        ModeIndices{ch.pump.m + direction, ch.pump.q, ch.pump.p, ch.pump.pol},
        ch.signal,
        ModeIndices{ch.idler.m + direction, ch.idler.q, ch.idler.p, ch.idler.pol});
    auto roots = solve_locked(geom, db, next, from.t_c - 3.0, from.t_c + 3.0, opts);
    return finish_step(from, std::move(roots), "step_pump_mode");
}

PhaseMatchSolution lock_to_pump_mode(const Geometry& geom, const MaterialDatabase& db,
                                     const PhaseMatchSolution& from,
                                     const SolveOptions& opts) {
    auto roots = solve_locked(geom, db, from.channel, from.t_c - 0.5, from.t_c + 0.5, opts);
    if (roots.empty()) {
        throw ConvergenceError("lock_to_pump_mode: no locked root within +-0.5 degC");
    }
    const auto nearest = std::min_element(
        roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.t_c - from.t_c) < std::abs(b.t_c - from.t_c);
        });
    return *nearest;
}

PumpTuningRequirement pump_tuning_requirement(const Geometry& geom,
                                              const MaterialDatabase& db,
                                              const PhaseMatchSolution& anchor,
                                              double signal_gap_hz,
                                              const SolveOptions& opts) {
    if (signal_gap_hz < 0.0) throw DomainError("signal gap must be >= 0");
    PumpTuningRequirement req;
    if (signal_gap_hz == 0.0) return req;
    const StepResult step = step_pump_mode(geom, db, anchor, +1, opts);
    req.step_signal_hz = step.dnu_s;
    req.step_pump_hz = step.dnu_p;
    req.n_steps = static_cast<long>(std::ceil(signal_gap_hz / std::abs(step.dnu_s)));
    req.excursion_hz = static_cast<double>(req.n_steps) * std::abs(step.dnu_p);
    return req;
}

namespace {

// One (family, m_s) slice of the scan: every idler mode whose
// energy-conservation root falls inside the window.  The idler continuum
// index grows monotonically with temperature, so roots come in m_i order
// and each successive one is predicted from the last spacing.
std::vector<PhaseMatchSolution> scan_one_ms(const Geometry& geom,
                                            const MaterialDatabase& db, double nu_p,
                                            double t_lo, double t_hi,
                                            const FamilyLabel& fam, long m_s,
                                            const SolveOptions& opts) {
    std::vector<PhaseMatchSolution> out;
    const ModeIndices signal{m_s, fam.q_s, fam.p_s, geom.pol_signal};
    const double nu_s_lo = resonance_frequency(geom, db, signal, t_lo);
    // The signal frequency falls with temperature, so its maximum over the
    // window is at t_lo; if even that is below half the pump, every root of
    // this slice would have nu_s < nu_i and belongs to the swapped family.
    if (!(nu_s_lo >= 0.5 * nu_p)) return out;
    const double nu_s_hi = resonance_frequency(geom, db, signal, t_hi, nu_s_lo);

    const double x_lo = continuum_m(geom, db, fam.q_i, fam.p_i, geom.pol_idler,
                                    nu_p - nu_s_lo, t_lo);
    const double x_hi = continuum_m(geom, db, fam.q_i, fam.p_i, geom.pol_idler,
                                    nu_p - nu_s_hi, t_hi);
    const long mi_first = static_cast<long>(std::ceil(x_lo));
    const long mi_last = static_cast<long>(std::floor(x_hi));
    if (mi_last < mi_first) return out;

    double dt_per_mode = (t_hi - t_lo) / std::max(x_hi - x_lo, 1e-9);
    double t_pred = t_lo + (static_cast<double>(mi_first) - x_lo) * dt_per_mode;
    double t_prev_root = 0.0;
    bool have_prev = false;

    for (long m_i = mi_first; m_i <= mi_last; ++m_i) {
        const ConversionChannel channel = make_channel(
            geom, m_s, m_i, fam.q_s, fam.q_i, fam.p_s, fam.p_i, fam.q_pump, 0);
        PairEval eval(geom, db, channel);
        auto f = [&](double t) { return nu_p - eval.pair_sum(t); };

        // Expand a bracket around the prediction; the residual increases
        // with temperature, so the bracket test is one sign comparison.
        double root = 0.0;
        bool found = false;
        for (double w = 0.02; w < 2.0 * (t_hi - t_lo); w *= 3.0) {
            const double lo = std::max(t_lo, t_pred - w);
            const double hi = std::min(t_hi, t_pred + w);
            const double f_lo = f(lo);
            const double f_hi = f(hi);
            if (f_lo <= 0.0 && f_hi >= 0.0) {
                root = bisect_root(f, lo, hi, f_lo, f_hi, opts.tolerance_hz);
                found = true;
                break;
            }
            if (lo == t_lo && hi == t_hi) break;  // whole window checked
        }
        if (!found) {
            // Prediction failed (window edge, strongly curved slice):
            // fall back to the plain grid solver before giving up.
            auto roots = solve_temperature(geom, db, channel, nu_p, t_lo, t_hi, opts);
            if (roots.empty()) continue;
            root = roots.front().t_c;
        }

        if (have_prev) dt_per_mode = std::max(root - t_prev_root, 1e-6);
        t_prev_root = root;
        have_prev = true;
        t_pred = std::min(root + dt_per_mode, t_hi);

        PhaseMatchSolution sol = build_solution(geom, db, channel, root, nu_p, opts);
        if (sol.nu_s >= sol.nu_i) out.push_back(std::move(sol));
    }
    return out;
}

}  // namespace

std::vector<TuningCurve> scan_channels(const Geometry& geom, const MaterialDatabase& db,
                                       double nu_p, double t_lo, double t_hi,
                                       const ScanBounds& bounds,
                                       const ScanOptions& opts) {
    if (!(nu_p > 0.0)) throw DomainError("scan_channels: pump frequency must be positive");
    if (!(t_lo < t_hi)) throw DomainError("scan_channels: temperature range is empty");
    if (bounds.q_max < 1 || bounds.q_max > 10 || bounds.p_max < 0) {
        throw DomainError("scan_channels: transverse bounds out of range");
    }
    if (bounds.ms_min < 100 || bounds.ms_max < bounds.ms_min) {
        throw DomainError("scan_channels: bad azimuthal window");
    }

    std::vector<FamilyLabel> families;
    for (int q_s = 1; q_s <= bounds.q_max; ++q_s)
        for (int q_i = 1; q_i <= bounds.q_max; ++q_i)
            for (int p_s = 0; p_s <= bounds.p_max; ++p_s)
                for (int p_i = 0; p_i <= bounds.p_max; ++p_i)
                    families.push_back({bounds.q_pump, q_s, q_i, p_s, p_i});

    const long n_ms = bounds.ms_max - bounds.ms_min + 1;
    const std::size_t n_tasks = families.size() * static_cast<std::size_t>(n_ms);
    std::vector<std::vector<PhaseMatchSolution>> slices(n_tasks);

    unsigned n_threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                          : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<std::size_t>(n_threads, n_tasks);

    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t task = cursor.fetch_add(1);
            if (task >= n_tasks) return;
            const FamilyLabel& fam = families[task / n_ms];
            const long m_s = bounds.ms_min + static_cast<long>(task % n_ms);
            try {
                slices[task] =
                    scan_one_ms(geom, db, nu_p, t_lo, t_hi, fam, m_s, opts.solve);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i + 1 < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<TuningCurve> curves;
    curves.reserve(families.size());
    for (std::size_t fi = 0; fi < families.size(); ++fi) {
        TuningCurve curve;
        curve.family = families[fi];
        for (long k = 0; k < n_ms; ++k) {
            auto& slice = slices[fi * n_ms + static_cast<std::size_t>(k)];
            curve.points.insert(curve.points.end(),
                                std::make_move_iterator(slice.begin()),
                                std::make_move_iterator(slice.end()));
        }
        std::sort(curve.points.begin(), curve.points.end(),
                  [](const PhaseMatchSolution& a, const PhaseMatchSolution& b) {
                      if (a.t_c != b.t_c) return a.t_c < b.t_c;
                      if (a.channel.signal.m != b.channel.signal.m)
                          return a.channel.signal.m < b.channel.signal.m;
                      return a.channel.idler.m < b.channel.idler.m;
                  });
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::vector<double> spdc_rate_profile(const Geometry& geom, const MaterialDatabase& db,
                                      const PhaseMatchSolution& solution,
                                      const std::vector<double>& t_grid_c,
                                      double kappa_s_hz, double kappa_i_hz) {
    if (t_grid_c.empty()) return {};
    const double t0 = t_grid_c[t_grid_c.size() / 2];
    const double s_s = thermal_slope(geom, db, solution.channel.signal, t0);
    const double s_i = thermal_slope(geom, db, solution.channel.idler, t0);
    const double kappa_s =
        kappa_s_hz > 0.0 ? kappa_s_hz : mode_linewidth(geom, solution.nu_s);
    const double kappa_i =
        kappa_i_hz > 0.0 ? kappa_i_hz : mode_linewidth(geom, solution.nu_i);

    PairEval eval(geom, db, solution.channel);
    std::vector<double> rate;
    rate.reserve(t_grid_c.size());
    for (const double t : t_grid_c) {
        // Locked pump: the energy mismatch r is carried by the pair and
        // splits between the two resonances in proportion to their thermal
        // slopes; each detuning is suppressed by its Lorentzian.
        const double r = eval.nu_pump_mode(t) - eval.pair_sum(t);
        const double delta_s = r * s_s / (s_s + s_i);
        const double delta_i = r - delta_s;
        const double l_s = 1.0 / (1.0 + std::pow(2.0 * delta_s / kappa_s, 2));
        const double l_i = 1.0 / (1.0 + std::pow(2.0 * delta_i / kappa_i, 2));
        rate.push_back(l_s * l_i);
    }
    const double peak = *std::max_element(rate.begin(), rate.end());
    if (!(peak > 0.0)) throw ConvergenceError("rate profile vanished on the grid");
    for (double& v : rate) v /= peak;
    return rate;
}

}  // namespace wgmopo
