#pragma once

#include "wgmopo/phase_matching.hpp"

namespace wgmopo {

// Frequency pull of the resonator modes by a coated substrate brought into
// the evanescent field.  Each mode's shift magnitude decays exponentially
// with the gap:  |dnu(d)| = contact_shift * exp(-d / decay_length).  The
// common `sign` (+1 or -1) sets the direction of all three shifts; for a
// dielectric substrate below the mode index the pull is toward lower
// frequency (sign = -1).
struct SubstrateConfig {
    double n_substrate = 0.0;
    double sign = -1.0;
    double contact_shift_hz[3] = {0, 0, 0};   // indexed by Role
    double decay_length_nm[3] = {0, 0, 0};    // indexed by Role
};

// Evanescent decay length lambda / (4 pi sqrt(n^2 - 1)) [nm] of a mode with
// index n at vacuum wavelength lambda_nm; used to derive the per-role decay
// lengths shipped in the scenario files.
double evanescent_decay_length_nm(double lambda_nm, double n_mode);

// Unsigned shift magnitude of one mode at gap d_nm >= 0 (d may be +inf for
// a retracted substrate).  Strictly decreasing in d; equals the contact
// shift at d = 0.
double mode_shift(const SubstrateConfig& substrate, Role role, double d_nm);

// Achieved signal-frequency offset for given signed pump and idler
// resonance shifts: with the pump locked to its (shifted) resonance and the
// pair constrained by energy conservation, the emitted signal frequency
// moves by dnu_p - dnu_i.
double signal_shift(double dnu_p_hz, double dnu_i_hz);

// signal_shift evaluated from the substrate model at gap d_nm.
double achieved_signal_shift(const SubstrateConfig& substrate, double d_nm);

// Linear actuator: gap d(V) = nm_per_volt * (v_max - V), so the maximum
// voltage brings the substrate to contact.
struct Actuator {
    double nm_per_volt = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;

    double distance_nm(double voltage) const;   // DomainError outside [v_min, v_max]
    double voltage_for(double d_nm) const;      // DomainError outside [0, max_distance]
    double max_distance_nm() const { return nm_per_volt * (v_max - v_min); }
};

// Everything an operator needs to apply one substrate-tuning set point:
// gap, actuator voltage, temperature correction that restores the locked
// triple resonance, and the resulting pump/signal frequency offsets.
struct PerturbationPlan {
    bool retracted = false;
    double d_nm = 0.0;
    double voltage = 0.0;
    double dt_c = 0.0;
    double dnu_p_hz = 0.0;
    double dnu_s_hz = 0.0;
};

// Plan with the substrate fully withdrawn: no shifts, no correction.
PerturbationPlan retracted_plan();

// Finds the gap that realizes a requested signal-frequency offset and the
// temperature correction that keeps the (shifted) channel energy-conserving
// with the pump locked.  Throws DomainError if the target is outside the
// reachable range [achieved(d_max), achieved(0)] or if the substrate index
// exceeds a mode index (contact would out-couple the resonator).
PerturbationPlan plan_for_target(const Geometry& geom, const MaterialDatabase& db,
                                 const SubstrateConfig& substrate,
                                 const Actuator& actuator,
                                 const PhaseMatchSolution& anchor,
                                 double target_signal_shift_hz);

}  // namespace wgmopo
