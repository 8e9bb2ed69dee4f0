#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wgmopo/coincidence.hpp"
#include "wgmopo/evanescent.hpp"
#include "wgmopo/phase_matching.hpp"
#include "wgmopo/vapor.hpp"

namespace wgmopo {

// One scenario file describes a complete experiment: the resonator, its
// dispersion data, the pump, the measured calibration anchor, and the
// optional tuning / substrate / vapor / simulation blocks the individual
// tools consume.  Parsing is strict: unknown keys anywhere are a
// ScenarioError, as is a missing key inside a present block.

struct PumpSpec {
    double lambda_nm = 0.0;

    double frequency_hz() const;
};

// Measured operating point used to pin the temperature-scale calibration:
// signal/idler wavelengths observed with the thermometer reading t_c.
struct AnchorSpec {
    double lambda_s_nm = 0.0;
    double lambda_i_nm = 0.0;
    double t_c = 0.0;
};

struct TuningSpec {
    double t_min_c = 0.0;    // model-temperature scan window [degC]
    double t_max_c = 0.0;
    double grid_step_c = 0.01;
    int q_max = 1;
    int p_max = 0;
    long ms_min = 0;
    long ms_max = 0;

    ScanBounds scan_bounds() const;
    SolveOptions solve_options() const;
};

struct SubstrateSpec {
    std::string coating;                      // material name in the database
    double sign = -1.0;
    double contact_shift_mhz[3] = {0, 0, 0};  // indexed by Role
    double decay_length_nm[3] = {0, 0, 0};
};

struct VaporSpec {
    std::string species;     // element prefix: "Cs" or "Rb"
    double length_cm = 0.0;
    double temperature_c = 0.0;
    double grid_span_ghz = 0.0;  // spectrum grid, centered on the line
    int grid_points = 0;
};

struct SimSpec {
    SimConfig config;
    double bin_ns = 0.0;     // coincidence histogram binning
    double window_ns = 0.0;
    std::string mode;        // "histogram" or "stream"
};

class Scenario {
public:
    // Parses and validates `path`, resolving every referenced data file and
    // loading it eagerly.  Relative data paths are resolved against the
    // first root that contains them, trying the WGMOPO_DATA_DIR environment
    // variable, the scenario's own directory, then its parent.
    static Scenario load(const std::string& path);

    const std::string& name() const { return name_; }
    const std::string& path() const { return path_; }
    // SHA-256 of the scenario file bytes, for provenance lines in outputs.
    const std::string& sha256() const { return sha256_; }
    // Directory (relative to the working directory) all tool outputs go to.
    const std::string& output_dir() const { return output_dir_; }

    const Geometry& geometry() const { return geometry_; }
    const MaterialDatabase& materials() const { return materials_; }
    const PumpSpec& pump() const { return pump_; }

    bool has_anchor() const { return anchor_.has_value(); }
    bool has_tuning() const { return tuning_.has_value(); }
    bool has_calibration() const { return dt_cal_c_.has_value(); }
    bool has_substrate() const { return substrate_.has_value(); }
    bool has_actuator() const { return actuator_.has_value(); }
    bool has_vapor() const { return vapor_.has_value(); }
    bool has_sim() const { return sim_.has_value(); }

    // Section accessors throw ScenarioError when the block is absent.
    const AnchorSpec& anchor() const;
    const TuningSpec& tuning() const;
    const SubstrateSpec& substrate() const;
    const Actuator& actuator() const;
    const VaporSpec& vapor() const;
    const SimSpec& sim() const;

    // Thermometer-minus-model temperature offset; 0 when the scenario ships
    // no calibration block.  Reported temperatures are model + offset.
    double dt_cal_c() const { return dt_cal_c_.value_or(0.0); }

    // Substrate pull model with n_substrate taken from the coating material
    // at the anchor's idler wavelength and temperature (the mode with the
    // lowest index, hence the tightest out-coupling margin).
    SubstrateConfig substrate_config() const;

    // Vapor cell with every loaded line whose species matches the requested
    // element prefix (a natural rubidium cell lists both isotopes).
    VaporCell vapor_cell() const;

private:
    Scenario() = default;

    std::string name_;
    std::string path_;
    std::string sha256_;
    std::string output_dir_ = ".";
    Geometry geometry_;
    MaterialDatabase materials_;
    std::vector<SpeciesLine> lines_;
    PumpSpec pump_;
    std::optional<AnchorSpec> anchor_;
    std::optional<TuningSpec> tuning_;
    std::optional<double> dt_cal_c_;
    std::optional<SubstrateSpec> substrate_;
    std::optional<Actuator> actuator_;
    std::optional<VaporSpec> vapor_;
    std::optional<SimSpec> sim_;
};

struct CalibrationResult {
    double dt_cal_c = 0.0;        // thermometer minus model temperature
    PhaseMatchSolution solution;  // identified anchor channel, model temperature
};

// Solves the temperature-scale calibration from the scenario's measured
// anchor: scans fundamental channels near the anchor wavelengths within a
// few kelvin of the thermometer reading, picks the solution whose signal and
// idler wavelengths match the measurement best, and reports the offset
// thermometer_reading - model_temperature.
CalibrationResult calibrate_scenario(const Scenario& scenario);

}  // namespace wgmopo
