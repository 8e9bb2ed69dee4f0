#include "wgmopo/evanescent.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "wgmopo/constants.hpp"
#include "wgmopo/errors.hpp"

namespace wgmopo {

double evanescent_decay_length_nm(double lambda_nm, double n_mode) {
    if (!(lambda_nm > 0.0)) throw DomainError("wavelength must be positive");
    if (!(n_mode > 1.0)) throw DomainError("mode index must exceed 1 for a bound mode");
    return lambda_nm / (4.0 * constants::pi * std::sqrt(n_mode * n_mode - 1.0));
}

double mode_shift(const SubstrateConfig& substrate, Role role, double d_nm) {
    if (!(d_nm >= 0.0)) throw DomainError("substrate gap must be >= 0");
    const int idx = static_cast<int>(role);
    const double decay = substrate.decay_length_nm[idx];
    if (!(decay > 0.0)) throw DomainError("decay length must be positive");
    return substrate.contact_shift_hz[idx] * std::exp(-d_nm / decay);
}

double signal_shift(double dnu_p_hz, double dnu_i_hz) { return dnu_p_hz - dnu_i_hz; }

double achieved_signal_shift(const SubstrateConfig& substrate, double d_nm) {
    const double dp = substrate.sign * mode_shift(substrate, Role::pump, d_nm);
    const double di = substrate.sign * mode_shift(substrate, Role::idler, d_nm);
    return signal_shift(dp, di);
}

double Actuator::distance_nm(double voltage) const {
    if (!(voltage >= v_min && voltage <= v_max)) {
        std::ostringstream ss;
        ss << "voltage " << voltage << " outside actuator range [" << v_min << ", "
           << v_max << "]";
        throw DomainError(ss.str());
    }
    return nm_per_volt * (v_max - voltage);
}

double Actuator::voltage_for(double d_nm) const {
    if (!(d_nm >= 0.0 && d_nm <= max_distance_nm())) {
        std::ostringstream ss;
        ss << "gap " << d_nm << " nm outside actuator travel [0, " << max_distance_nm()
           << "] nm";
        throw DomainError(ss.str());
    }
    return v_max - d_nm / nm_per_volt;
}

PerturbationPlan retracted_plan() {
    PerturbationPlan plan;
    plan.retracted = true;
    plan.d_nm = std::numeric_limits<double>::infinity();
    return plan;
}

PerturbationPlan plan_for_target(const Geometry& geom, const MaterialDatabase& db,
                                 const SubstrateConfig& substrate,
                                 const Actuator& actuator,
                                 const PhaseMatchSolution& anchor,
                                 double target_signal_shift_hz) {
    // Out-coupling guard: with the substrate index above a mode index the
    // contact would act as an output coupler instead of a weak perturbation.
    const DispersionModel& mat_e = db.get(geom.material, geom.pol_pump);
    const DispersionModel& mat_o = db.get(geom.material, geom.pol_signal);
    const double n_pump =
        mat_e.refractive_index(constants::c / anchor.nu_p * 1e6, anchor.t_c);
    const double n_idler =
        mat_o.refractive_index(constants::c / anchor.nu_i * 1e6, anchor.t_c);
    if (substrate.n_substrate >= std::min(n_pump, n_idler)) {
        throw DomainError("substrate index exceeds a mode index: contact would out-couple");
    }

    const double d_max = actuator.max_distance_nm();
    const double far = achieved_signal_shift(substrate, d_max);
    const double near = achieved_signal_shift(substrate, 0.0);
    const double lo_val = std::min(far, near);
    const double hi_val = std::max(far, near);
    if (!(target_signal_shift_hz >= lo_val && target_signal_shift_hz <= hi_val)) {
        std::ostringstream ss;
        ss << "target signal shift " << target_signal_shift_hz * 1e-6
           << " MHz outside reachable range [" << lo_val * 1e-6 << ", "
           << hi_val * 1e-6 << "] MHz";
        throw DomainError(ss.str());
    }

    // The achieved shift is monotone in the gap (single dominant exponential
    // difference); bisect the gap.
    double lo = 0.0, hi = d_max;
    double f_lo = achieved_signal_shift(substrate, lo) - target_signal_shift_hz;
    for (int iter = 0; iter < 200 && hi - lo > 1e-9; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = achieved_signal_shift(substrate, mid) - target_signal_shift_hz;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    const double d = 0.5 * (lo + hi);

    PerturbationPlan plan;
    plan.retracted = false;
    plan.d_nm = d;
    plan.voltage = actuator.voltage_for(d);
    plan.dnu_p_hz = substrate.sign * mode_shift(substrate, Role::pump, d);
    plan.dnu_s_hz = achieved_signal_shift(substrate, d);

    // Temperature correction: re-solve the locked triple resonance with all
    // three cavity lines offset by their substrate shifts.
    const double dp = plan.dnu_p_hz;
    const double ds = substrate.sign * mode_shift(substrate, Role::signal, d);
    const double di = substrate.sign * mode_shift(substrate, Role::idler, d);
    const auto& ch = anchor.channel;
    auto residual = [&](double t) {
        const double nu_p = resonance_frequency(geom, db, ch.pump, t, anchor.nu_p) + dp;
        const double nu_s = resonance_frequency(geom, db, ch.signal, t, anchor.nu_s) + ds;
        const double nu_i = resonance_frequency(geom, db, ch.idler, t, anchor.nu_i) + di;
        return nu_p - nu_s - nu_i;
    };
    double t_lo = anchor.t_c - 0.5, t_hi = anchor.t_c + 0.5;
    double r_lo = residual(t_lo);
    const double r_hi = residual(t_hi);
    if ((r_lo < 0.0) == (r_hi < 0.0)) {
        throw ConvergenceError("no locked re-solve within +-0.5 degC of the anchor");
    }
    for (int iter = 0; iter < 120 && t_hi - t_lo > 1e-8; ++iter) {
        const double mid = 0.5 * (t_lo + t_hi);
        const double r_mid = residual(mid);
        if ((r_mid < 0.0) == (r_lo < 0.0)) {
            t_lo = mid;
            r_lo = r_mid;
        } else {
            t_hi = mid;
        }
    }
    plan.dt_c = 0.5 * (t_lo + t_hi) - anchor.t_c;
    return plan;
}

}  // namespace wgmopo
