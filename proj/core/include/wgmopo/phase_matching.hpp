#pragma once

#include <compare>
#include <vector>

#include "wgmopo/wgm.hpp"

namespace wgmopo {

// A parametric conversion channel: one pump, one signal and one idler mode
// with azimuthal momentum conservation m_p = m_s + m_i enforced at
// construction.  By convention the signal is the shorter-wavelength member
// of the pair (nu_s >= nu_i); solvers apply that convention when reporting.
struct ConversionChannel {
    ModeIndices pump;
    ModeIndices signal;
    ModeIndices idler;

    ConversionChannel(const ModeIndices& pump_mode, const ModeIndices& signal_mode,
                      const ModeIndices& idler_mode);
};

// Builds a channel from signal/idler labels, with the pump mode label
// (q_pump, p_pump) on the polarization the geometry assigns to the pump and
// m_p = m_s + m_i.
ConversionChannel make_channel(const Geometry& geom, long m_s, long m_i, int q_s,
                               int q_i, int p_s, int p_i, int q_pump = 1,
                               int p_pump = 0);

struct SolveOptions {
    double grid_step_c = 0.01;   // temperature grid for root bracketing [degC]
    double tolerance_hz = 1e6;   // accepted |residual| at a reported root
};

struct PhaseMatchSolution {
    ConversionChannel channel;
    double t_c = 0.0;          // resonator temperature at the root [degC]
    double nu_p = 0.0;         // pump frequency used [Hz]
    double nu_s = 0.0;         // signal eigenfrequency at t_c [Hz]
    double nu_i = 0.0;         // idler eigenfrequency at t_c [Hz]
    double residual_hz = 0.0;  // nu_p - nu_s - nu_i at t_c

    double lambda_s_nm() const;
    double lambda_i_nm() const;
};

// Energy mismatch nu_p - nu_s(T) - nu_i(T) [Hz] for a given pump frequency.
// The pump mode label does not enter; only the signal/idler eigenfrequencies
// move with temperature here.
double energy_residual(const Geometry& geom, const MaterialDatabase& db,
                       const ConversionChannel& channel, double t_c, double nu_p);

// All temperatures in [t_lo, t_hi] where the channel conserves energy with
// an externally fixed pump frequency nu_p.  Roots are located by sign
// changes on the option grid and refined by bisection until the residual
// magnitude is below tolerance_hz.
std::vector<PhaseMatchSolution> solve_temperature(const Geometry& geom,
                                                  const MaterialDatabase& db,
                                                  const ConversionChannel& channel,
                                                  double nu_p, double t_lo, double t_hi,
                                                  const SolveOptions& opts = {});

// Same root search, but with the pump locked to its own cavity mode: the
// residual is nu_pump_mode(T) - nu_s(T) - nu_i(T), and the reported nu_p is
// the pump eigenfrequency at the root.  This models operation with the laser
// servo-locked to the pump resonance while the temperature is tuned.
std::vector<PhaseMatchSolution> solve_locked(const Geometry& geom,
                                             const MaterialDatabase& db,
                                             const ConversionChannel& channel,
                                             double t_lo, double t_hi,
                                             const SolveOptions& opts = {});

struct StepResult {
    PhaseMatchSolution solution;
    double dt_c = 0.0;    // temperature change relative to the input solution
    double dnu_p = 0.0;   // pump frequency change [Hz]
    double dnu_s = 0.0;   // signal frequency change [Hz]
    double dnu_i = 0.0;   // idler frequency change [Hz]
};

// Coarse tuning step keeping the same pump mode: the pair hops to the
// neighboring signal/idler mode pair (m_s + d, m_i - d), d = +-1, and the
// temperature readjusts to restore energy conservation with the pump still
// locked to m_p (nu_p follows the mode by slope * dT, a few hundred MHz).
// The new root is searched within +-3 degC of the input solution; the
// nearest root is taken.
StepResult step_fixed_pump(const Geometry& geom, const MaterialDatabase& db,
                           const PhaseMatchSolution& from, int direction,
                           const SolveOptions& opts = {});

// Fine tuning step to the neighboring pump mode: m_p -> m_p + d with the
// idler following (m_i -> m_i + d) and the signal mode unchanged.  The pump
// stays locked to its (new) mode, so the returned nu_p is the new pump
// eigenfrequency at the readjusted temperature.
StepResult step_pump_mode(const Geometry& geom, const MaterialDatabase& db,
                          const PhaseMatchSolution& from, int direction,
                          const SolveOptions& opts = {});

// Re-solves a solution's channel with the pump servo-locked to its cavity
// mode and returns the locked root nearest in temperature (searched within
// +-0.5 degC).  Fixed-laser roots identify a channel; the device then runs
// locked, so step tables and tuning requirements start from this state.
PhaseMatchSolution lock_to_pump_mode(const Geometry& geom, const MaterialDatabase& db,
                                     const PhaseMatchSolution& from,
                                     const SolveOptions& opts = {});

struct PumpTuningRequirement {
    long n_steps = 0;            // pump-mode hops needed
    double step_signal_hz = 0.0; // signal move per hop at the anchor
    double step_pump_hz = 0.0;   // pump move per hop at the anchor
    double excursion_hz = 0.0;   // total pump frequency excursion
};

// How far the pump must be retuned, in pump-mode hops, so that the signal
// frequency sweeps a contiguous gap of width signal_gap_hz (e.g. one
// fixed-pump comb interval).  A zero gap needs zero steps.
PumpTuningRequirement pump_tuning_requirement(const Geometry& geom,
                                              const MaterialDatabase& db,
                                              const PhaseMatchSolution& anchor,
                                              double signal_gap_hz,
                                              const SolveOptions& opts = {});

struct FamilyLabel {
    int q_pump = 1;
    int q_s = 1;
    int q_i = 1;
    int p_s = 0;
    int p_i = 0;

    auto operator<=>(const FamilyLabel&) const = default;
};

struct TuningCurve {
    FamilyLabel family;
    std::vector<PhaseMatchSolution> points;  // sorted by temperature
};

struct ScanBounds {
    int q_max = 1;      // enumerate signal/idler radial indices 1..q_max
    int p_max = 0;      // enumerate signal/idler polar indices 0..p_max
    long ms_min = 0;    // inclusive signal azimuthal window
    long ms_max = 0;
    int q_pump = 1;     // pump transverse family is fixed by the lock (p_pump = 0)
};

struct ScanOptions {
    SolveOptions solve;
    int threads = 0;  // 0: hardware concurrency
};

// Enumerates every conversion channel inside the bounds whose
// energy-conservation root falls in [t_lo, t_hi] for pump frequency nu_p,
// and groups the solutions into per-family curves sorted by temperature.
// Channels are kept only with nu_s >= nu_i (signal = shorter wavelength);
// the mirrored assignments belong to the swapped family.  The result is
// deterministic and independent of the thread count.
std::vector<TuningCurve> scan_channels(const Geometry& geom, const MaterialDatabase& db,
                                       double nu_p, double t_lo, double t_hi,
                                       const ScanBounds& bounds,
                                       const ScanOptions& opts = {});

// Relative pair generation rate of a channel versus temperature, for a pump
// locked to its mode.  The energy mismatch r(T) = nu_pm(T) - nu_s(T) -
// nu_i(T) is split between the signal and idler resonances in proportion to
// their thermal slopes, and each detuning is weighted by its Lorentzian
// line profile; the profile is normalized to a maximum of 1 on the grid.
// kappa_s/kappa_i override the loaded linewidths when positive.
std::vector<double> spdc_rate_profile(const Geometry& geom, const MaterialDatabase& db,
                                      const PhaseMatchSolution& solution,
                                      const std::vector<double>& t_grid_c,
                                      double kappa_s_hz = 0.0, double kappa_i_hz = 0.0);

}  // namespace wgmopo
