#include "wgmopo/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>

#include <nlohmann/json.hpp>

#include "wgmopo/constants.hpp"
#include "wgmopo/errors.hpp"
#include "wgmopo/io.hpp"
#include "wgmopo/sha256.hpp"

namespace fs = std::filesystem;

namespace wgmopo {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& required,
                const std::set<std::string>& optional, const std::string& where) {
    if (!j.is_object()) throw ScenarioError(where + ": expected an object");
    for (const auto& key : required) {
        if (!j.contains(key)) throw ScenarioError(where + ": missing key '" + key + "'");
    }
    for (const auto& item : j.items()) {
        if (!required.count(item.key()) && !optional.count(item.key())) {
            throw ScenarioError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

double positive(const nlohmann::json& j, const char* key, const std::string& where) {
    const double v = j.at(key).get<double>();
    if (!(v > 0.0)) throw ScenarioError(where + ": '" + key + "' must be positive");
    return v;
}

double non_negative(const nlohmann::json& j, const char* key, const std::string& where) {
    const double v = j.at(key).get<double>();
    if (!(v >= 0.0)) throw ScenarioError(where + ": '" + key + "' must be >= 0");
    return v;
}

// Resolves a data path referenced by the scenario.  Absolute paths are used
// verbatim; relative ones are tried against WGMOPO_DATA_DIR, the scenario's
// directory and its parent, in that order, taking the first hit.
std::string resolve_data_path(const fs::path& scenario_dir, const std::string& rel) {
    const fs::path p(rel);
    if (p.is_absolute()) {
        if (fs::exists(p)) return p.string();
        throw ScenarioError("referenced file not found: " + rel);
    }
    std::vector<fs::path> roots;
    if (const char* env = std::getenv("WGMOPO_DATA_DIR")) {
        if (*env != '\0') roots.emplace_back(env);
    }
    roots.push_back(scenario_dir);
    roots.push_back(scenario_dir.parent_path());
    std::string tried;
    for (const auto& root : roots) {
        const fs::path candidate = root / p;
        if (fs::exists(candidate)) return candidate.string();
        if (!tried.empty()) tried += ", ";
        tried += candidate.string();
    }
    throw ScenarioError("referenced file '" + rel + "' not found (tried: " + tried + ")");
}

PumpSpec parse_pump(const nlohmann::json& j, const std::string& where) {
    check_keys(j, {"lambda_nm"}, {}, where);
    PumpSpec pump;
    pump.lambda_nm = positive(j, "lambda_nm", where);
    return pump;
}

AnchorSpec parse_anchor(const nlohmann::json& j, const std::string& where) {
    check_keys(j, {"lambda_s_nm", "lambda_i_nm", "T_c"}, {}, where);
    AnchorSpec a;
    a.lambda_s_nm = positive(j, "lambda_s_nm", where);
    a.lambda_i_nm = positive(j, "lambda_i_nm", where);
    a.t_c = j.at("T_c").get<double>();
    if (a.lambda_s_nm > a.lambda_i_nm) {
        throw ScenarioError(where + ": signal must be the shorter wavelength");
    }
    return a;
}

TuningSpec parse_tuning(const nlohmann::json& j, const std::string& where) {
    check_keys(j, {"t_min_c", "t_max_c", "grid_step_c", "q_max", "p_max", "ms_min", "ms_max"},
               {}, where);
    TuningSpec t;
    t.t_min_c = j.at("t_min_c").get<double>();
    t.t_max_c = j.at("t_max_c").get<double>();
    t.grid_step_c = positive(j, "grid_step_c", where);
    t.q_max = j.at("q_max").get<int>();
    t.p_max = j.at("p_max").get<int>();
    t.ms_min = j.at("ms_min").get<long>();
    t.ms_max = j.at("ms_max").get<long>();
    if (!(t.t_min_c < t.t_max_c)) throw ScenarioError(where + ": need t_min_c < t_max_c");
    if (t.q_max < 1 || t.q_max > 10) throw ScenarioError(where + ": q_max must be in [1, 10]");
    if (t.p_max < 0) throw ScenarioError(where + ": p_max must be >= 0");
    if (!(t.ms_min > 0 && t.ms_min <= t.ms_max)) {
        throw ScenarioError(where + ": need 0 < ms_min <= ms_max");
    }
    return t;
}

SubstrateSpec parse_substrate(const nlohmann::json& j, const std::string& where) {
    check_keys(j, {"coating", "sign", "contact_shift_mhz", "decay_length_nm"}, {}, where);
    SubstrateSpec s;
    s.coating = j.at("coating").get<std::string>();
    s.sign = j.at("sign").get<double>();
    if (s.sign != 1.0 && s.sign != -1.0) throw ScenarioError(where + ": sign must be +-1");
    const char* roles[3] = {"pump", "signal", "idler"};
    const auto& shifts = j.at("contact_shift_mhz");
    const auto& decays = j.at("decay_length_nm");
    check_keys(shifts, {"pump", "signal", "idler"}, {}, where + ".contact_shift_mhz");
    check_keys(decays, {"pump", "signal", "idler"}, {}, where + ".decay_length_nm");
    for (int r = 0; r < 3; ++r) {
        s.contact_shift_mhz[r] = positive(shifts, roles[r], where + ".contact_shift_mhz");
        s.decay_length_nm[r] = positive(decays, roles[r], where + ".decay_length_nm");
    }
    return s;
}

Actuator parse_actuator(const nlohmann::json& j, const std::string& where) {
    check_keys(j, {"nm_per_volt", "voltage_range"}, {}, where);
    Actuator a;
    a.nm_per_volt = positive(j, "nm_per_volt", where);
    const auto& range = j.at("voltage_range");
    if (!range.is_array() || range.size() != 2) {
        throw ScenarioError(where + ": voltage_range must be [lo, hi]");
    }
    a.v_min = range[0].get<double>();
    a.v_max = range[1].get<double>();
    if (!(a.v_min < a.v_max)) throw ScenarioError(where + ": need voltage_range lo < hi");
    return a;
}

VaporSpec parse_vapor(const nlohmann::json& j, const std::string& where) {
    check_keys(j, {"species", "length_cm", "temperature_c", "grid_span_ghz", "grid_points"},
               {}, where);
    VaporSpec v;
    v.species = j.at("species").get<std::string>();
    if (v.species.empty()) throw ScenarioError(where + ": species must be non-empty");
    v.length_cm = positive(j, "length_cm", where);
    v.temperature_c = j.at("temperature_c").get<double>();
    v.grid_span_ghz = positive(j, "grid_span_ghz", where);
    v.grid_points = j.at("grid_points").get<int>();
    if (v.grid_points < 2) throw ScenarioError(where + ": grid_points must be >= 2");
    return v;
}

SimSpec parse_sim(const nlohmann::json& j, const std::string& where) {
    check_keys(j,
               {"pair_rate_hz", "duration_s", "tau_si_ns", "tau_f_ns",
                "reemission_efficiency", "eta_signal", "eta_idler", "dark_rate_signal_hz",
                "dark_rate_idler_hz", "jitter_sigma_signal_ns", "jitter_sigma_idler_ns",
                "seed", "bin_ns", "window_ns", "mode"},
               {}, where);
    SimSpec s;
    s.config.pair_rate_hz = positive(j, "pair_rate_hz", where);
    s.config.duration_s = positive(j, "duration_s", where);
    s.config.tau_si_s = positive(j, "tau_si_ns", where) * 1e-9;
    s.config.tau_f_s = non_negative(j, "tau_f_ns", where) * 1e-9;
    s.config.reemission_efficiency = non_negative(j, "reemission_efficiency", where);
    s.config.eta_signal = non_negative(j, "eta_signal", where);
    s.config.eta_idler = non_negative(j, "eta_idler", where);
    s.config.dark_rate_signal_hz = non_negative(j, "dark_rate_signal_hz", where);
    s.config.dark_rate_idler_hz = non_negative(j, "dark_rate_idler_hz", where);
    s.config.jitter_sigma_signal_s = non_negative(j, "jitter_sigma_signal_ns", where) * 1e-9;
    s.config.jitter_sigma_idler_s = non_negative(j, "jitter_sigma_idler_ns", where) * 1e-9;
    s.config.seed = j.at("seed").get<std::uint64_t>();
    s.bin_ns = positive(j, "bin_ns", where);
    s.window_ns = positive(j, "window_ns", where);
    s.mode = j.at("mode").get<std::string>();
    if (s.mode != "histogram" && s.mode != "stream") {
        throw ScenarioError(where + ": mode must be 'histogram' or 'stream'");
    }
    if (s.window_ns < s.bin_ns) throw ScenarioError(where + ": window_ns must cover one bin");
    for (const double eta :
         {s.config.reemission_efficiency, s.config.eta_signal, s.config.eta_idler}) {
        if (eta > 1.0) throw ScenarioError(where + ": efficiencies must be <= 1");
    }
    return s;
}

}  // namespace

double PumpSpec::frequency_hz() const { return constants::c / (lambda_nm * 1e-9); }

ScanBounds TuningSpec::scan_bounds() const {
    ScanBounds b;
    b.q_max = q_max;
    b.p_max = p_max;
    b.ms_min = ms_min;
    b.ms_max = ms_max;
    return b;
}

SolveOptions TuningSpec::solve_options() const {
    SolveOptions opts;
    opts.grid_step_c = grid_step_c;
    return opts;
}

Scenario Scenario::load(const std::string& file_path) {
    std::string text;
    try {
        text = read_text(file_path);
    } catch (const DataError& e) {
        throw ScenarioError(e.what());
    }

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError("scenario " + file_path + ": " + e.what());
    }

    check_keys(j, {"schema_version", "name", "geometry", "materials", "pump"},
               {"output_dir", "lines", "anchor", "tuning", "calibration", "substrate",
                "actuator", "vapor", "sim"},
               file_path);
    const int version = j.at("schema_version").get<int>();
    if (version != 1) {
        throw ScenarioError(file_path + ": unsupported schema_version " +
                            std::to_string(version));
    }

    Scenario sc;
    sc.path_ = file_path;
    sc.sha256_ = sha256_hex(text);
    sc.name_ = j.at("name").get<std::string>();
    if (sc.name_.empty()) throw ScenarioError(file_path + ": name must be non-empty");
    if (j.contains("output_dir")) {
        sc.output_dir_ = j.at("output_dir").get<std::string>();
        if (sc.output_dir_.empty()) {
            throw ScenarioError(file_path + ": output_dir must be non-empty");
        }
    }

    const fs::path scenario_dir = fs::absolute(fs::path(file_path)).parent_path();
    try {
        sc.geometry_ = load_geometry(
            resolve_data_path(scenario_dir, j.at("geometry").get<std::string>()));

        const auto& mats = j.at("materials");
        check_keys(mats, {"extraordinary", "ordinary"}, {"substrate_coating"},
                   file_path + ".materials");
        for (const auto& item : mats.items()) {
            sc.materials_.add_file(
                resolve_data_path(scenario_dir, item.value().get<std::string>()));
        }

        if (j.contains("lines")) {
            const auto& lines = j.at("lines");
            if (!lines.is_array()) throw ScenarioError(file_path + ": lines must be an array");
            for (const auto& entry : lines) {
                sc.lines_.push_back(
                    load_line(resolve_data_path(scenario_dir, entry.get<std::string>())));
            }
        }
    } catch (const DataError& e) {
        throw ScenarioError(e.what());
    }

    // The geometry must be fully served by the loaded dispersion models.
    for (const Role role : {Role::pump, Role::signal, Role::idler}) {
        const Polarization pol = geometry_polarization(sc.geometry_, role);
        if (!sc.materials_.contains(sc.geometry_.material, pol)) {
            throw ScenarioError(file_path + ": no dispersion model for " +
                                sc.geometry_.material + " (" + to_string(pol) + ")");
        }
    }

    sc.pump_ = parse_pump(j.at("pump"), file_path + ".pump");
    if (j.contains("anchor")) sc.anchor_ = parse_anchor(j.at("anchor"), file_path + ".anchor");
    if (j.contains("tuning")) sc.tuning_ = parse_tuning(j.at("tuning"), file_path + ".tuning");
    if (j.contains("calibration")) {
        const auto& cal = j.at("calibration");
        check_keys(cal, {"dT_cal_c"}, {}, file_path + ".calibration");
        sc.dt_cal_c_ = cal.at("dT_cal_c").get<double>();
    }
    if (j.contains("substrate")) {
        sc.substrate_ = parse_substrate(j.at("substrate"), file_path + ".substrate");
    }
    if (j.contains("actuator")) {
        sc.actuator_ = parse_actuator(j.at("actuator"), file_path + ".actuator");
    }
    if (j.contains("vapor")) sc.vapor_ = parse_vapor(j.at("vapor"), file_path + ".vapor");
    if (j.contains("sim")) sc.sim_ = parse_sim(j.at("sim"), file_path + ".sim");
    return sc;
}

namespace {

[[noreturn]] void missing_section(const std::string& name, const std::string& section) {
    throw ScenarioError("scenario '" + name + "' has no " + section + " section");
}

}  // namespace

const AnchorSpec& Scenario::anchor() const {
    if (!anchor_) missing_section(name_, "anchor");
    return *anchor_;
}

const TuningSpec& Scenario::tuning() const {
    if (!tuning_) missing_section(name_, "tuning");
    return *tuning_;
}

const SubstrateSpec& Scenario::substrate() const {
    if (!substrate_) missing_section(name_, "substrate");
    return *substrate_;
}

const Actuator& Scenario::actuator() const {
    if (!actuator_) missing_section(name_, "actuator");
    return *actuator_;
}

const VaporSpec& Scenario::vapor() const {
    if (!vapor_) missing_section(name_, "vapor");
    return *vapor_;
}

const SimSpec& Scenario::sim() const {
    if (!sim_) missing_section(name_, "sim");
    return *sim_;
}

SubstrateConfig Scenario::substrate_config() const {
    const SubstrateSpec& spec = substrate();
    const AnchorSpec& a = anchor();
    const DispersionModel* coating = nullptr;
    for (const Polarization pol : {Polarization::ordinary, Polarization::extraordinary}) {
        if (materials_.contains(spec.coating, pol)) {
            coating = &materials_.get(spec.coating, pol);
            break;
        }
    }
    if (coating == nullptr) {
        throw ScenarioError("scenario '" + name_ + "': coating material '" + spec.coating +
                            "' is not in the material set");
    }
    SubstrateConfig config;
    config.n_substrate = coating->refractive_index(a.lambda_i_nm * 1e-3, a.t_c);
    config.sign = spec.sign;
    for (int r = 0; r < 3; ++r) {
        config.contact_shift_hz[r] = spec.contact_shift_mhz[r] * 1e6;
        config.decay_length_nm[r] = spec.decay_length_nm[r];
    }
    return config;
}

CalibrationResult calibrate_scenario(const Scenario& scenario) {
    const AnchorSpec& a = scenario.anchor();
    const Geometry& geom = scenario.geometry();
    const MaterialDatabase& db = scenario.materials();
    const double nu_p = scenario.pump().frequency_hz();
    const double nu_s = constants::c / (a.lambda_s_nm * 1e-9);
    const Polarization pol_s = geometry_polarization(geom, Role::signal);

    // The anchor's signal azimuthal number is within a mode or two of the
    // continuum prediction at the (uncalibrated) thermometer reading.
    const double ms_guess = continuum_m(geom, db, 1, 0, pol_s, nu_s, a.t_c);
    ScanBounds bounds;
    bounds.q_max = 1;
    bounds.p_max = 0;
    bounds.ms_min = std::lround(ms_guess) - 3;
    bounds.ms_max = std::lround(ms_guess) + 3;

    const auto curves = scan_channels(geom, db, nu_p, a.t_c - 3.0, a.t_c + 3.0, bounds);
    const PhaseMatchSolution* best = nullptr;
    double best_err = 0.0;
    for (const TuningCurve& curve : curves) {
        for (const PhaseMatchSolution& sol : curve.points) {
            const double err = std::abs(sol.lambda_s_nm() - a.lambda_s_nm) +
                               std::abs(sol.lambda_i_nm() - a.lambda_i_nm);
            if (best == nullptr || err < best_err) {
                best = &sol;
                best_err = err;
            }
        }
    }
    if (best == nullptr) {
        throw ConvergenceError("calibration: no fundamental channel solves near the anchor");
    }
    return CalibrationResult{a.t_c - best->t_c, *best};
}

VaporCell Scenario::vapor_cell() const {
    const VaporSpec& spec = vapor();
    VaporCell cell;
    cell.length_m = spec.length_cm * 1e-2;
    cell.t_c = spec.temperature_c;
    for (const SpeciesLine& line : lines_) {
        if (line.species.rfind(spec.species, 0) == 0) cell.species.push_back(line);
    }
    if (cell.species.empty()) {
        throw ScenarioError("scenario '" + name_ + "': no loaded line matches species '" +
                            spec.species + "'");
    }
    return cell;
}

}  // namespace wgmopo
