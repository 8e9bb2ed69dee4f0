// Command-line front end: reproducible scenario-driven computations with
// CSV/JSON outputs.  Every output embeds the tool version and the SHA-256
// of the scenario file that produced it; identical scenario + seed gives
// byte-identical files.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wgmopo/constants.hpp"
#include "wgmopo/correlations.hpp"
#include "wgmopo/errors.hpp"
#include "wgmopo/io.hpp"
#include "wgmopo/scenario.hpp"
#include "wgmopo/sha256.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

using namespace wgmopo;

// Output files land inside the scenario's output directory unless the
// caller passes an absolute path.
std::string resolve_out(const Scenario& scenario, const std::string& out_name) {
    fs::path p(out_name);
    if (!p.is_absolute()) p = fs::path(scenario.output_dir()) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p.string();
}

std::string provenance_line(const Scenario& scenario) {
    return std::string("# wgmopo ") + WGMOPO_VERSION + " scenario=" + scenario.name() +
           " sha256=" + scenario.sha256();
}

ordered_json provenance_json(const Scenario& scenario) {
    ordered_json j;
    j["tool_version"] = WGMOPO_VERSION;
    j["scenario"] = scenario.name();
    j["scenario_sha256"] = scenario.sha256();
    return j;
}

void write_json(const std::string& path, const ordered_json& j) {
    atomic_write_text(path, j.dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
}

std::string family_label(const TuningCurve& curve) {
    std::ostringstream ss;
    ss << curve.family.q_pump << '-' << curve.family.q_s << '-' << curve.family.q_i << '-'
       << curve.family.p_s << '-' << curve.family.p_i;
    return ss.str();
}

// --- tuning-curve ---------------------------------------------------------

void run_tuning_curve(const std::string& scenario_path, const std::string& out,
                      double grid_step_override) {
    const Scenario sc = Scenario::load(scenario_path);
    const TuningSpec& tuning = sc.tuning();
    ScanOptions opts;
    opts.solve = tuning.solve_options();
    if (grid_step_override > 0.0) opts.solve.grid_step_c = grid_step_override;

    const auto curves = scan_channels(sc.geometry(), sc.materials(), sc.pump().frequency_hz(),
                                      tuning.t_min_c, tuning.t_max_c, tuning.scan_bounds(),
                                      opts);

    std::string csv = provenance_line(sc) + "\n";
    csv += "family,q_p,q_s,q_i,p_s,p_i,m_p,m_s,m_i,T_C,lambda_s_nm,lambda_i_nm,residual_Hz\n";
    std::size_t rows = 0;
    for (const TuningCurve& curve : curves) {
        const std::string label = family_label(curve);
        for (const PhaseMatchSolution& sol : curve.points) {
            csv += label;
            csv += ',' + std::to_string(curve.family.q_pump);
            csv += ',' + std::to_string(curve.family.q_s);
            csv += ',' + std::to_string(curve.family.q_i);
            csv += ',' + std::to_string(curve.family.p_s);
            csv += ',' + std::to_string(curve.family.p_i);
            csv += ',' + std::to_string(sol.channel.pump.m);
            csv += ',' + std::to_string(sol.channel.signal.m);
            csv += ',' + std::to_string(sol.channel.idler.m);
            csv += ',' + format_fixed(sol.t_c + sc.dt_cal_c(), 6);
            csv += ',' + format_fixed(sol.lambda_s_nm(), 6);
            csv += ',' + format_fixed(sol.lambda_i_nm(), 6);
            csv += ',' + format_fixed(sol.residual_hz, 3);
            csv += '\n';
            ++rows;
        }
    }
    const std::string path = resolve_out(sc, out);
    atomic_write_text(path, csv);
    std::cout << "wrote " << path << " (" << rows << " rows, " << curves.size()
              << " families)\n";
}

// --- steps ----------------------------------------------------------------

ordered_json solution_json(const PhaseMatchSolution& sol, double dt_cal) {
    ordered_json j;
    j["m_p"] = sol.channel.pump.m;
    j["m_s"] = sol.channel.signal.m;
    j["m_i"] = sol.channel.idler.m;
    j["T_C"] = sol.t_c + dt_cal;
    j["nu_p_Hz"] = sol.nu_p;
    j["lambda_s_nm"] = sol.lambda_s_nm();
    j["lambda_i_nm"] = sol.lambda_i_nm();
    j["residual_Hz"] = sol.residual_hz;
    return j;
}

ordered_json step_json(const StepResult& step, const PhaseMatchSolution& anchor,
                       double dt_cal) {
    ordered_json j = solution_json(step.solution, dt_cal);
    j["dT_C"] = step.dt_c;
    j["dnu_p_Hz"] = step.dnu_p;
    j["dnu_s_Hz"] = step.dnu_s;
    j["dnu_i_Hz"] = step.dnu_i;
    j["dlambda_s_nm"] = step.solution.lambda_s_nm() - anchor.lambda_s_nm();
    return j;
}

void run_steps(const std::string& scenario_path, const std::string& out, int count) {
    const Scenario sc = Scenario::load(scenario_path);
    const Geometry& geom = sc.geometry();
    const MaterialDatabase& db = sc.materials();
    const CalibrationResult cal = calibrate_scenario(sc);
    const double dt_cal = sc.dt_cal_c();

    // The device runs with the pump servo-locked to its mode; all step
    // tables start from that operating point rather than the fixed-laser
    // root that identified the channel.
    const PhaseMatchSolution locked = lock_to_pump_mode(geom, db, cal.solution);

    ordered_json j = provenance_json(sc);
    j["anchor"] = solution_json(cal.solution, dt_cal);
    ordered_json locked_json = solution_json(locked, dt_cal);
    locked_json["pump_lock_offset_Hz"] = locked.nu_p - cal.solution.nu_p;
    j["locked_anchor"] = locked_json;

    ordered_json fixed_steps = ordered_json::array();
    PhaseMatchSolution cursor = locked;
    double first_gap_hz = 0.0;
    for (int k = 0; k < count; ++k) {
        const StepResult step = step_fixed_pump(geom, db, cursor, +1);
        if (k == 0) first_gap_hz = std::abs(step.dnu_s);
        fixed_steps.push_back(step_json(step, locked, dt_cal));
        cursor = step.solution;
    }
    j["fixed_pump_steps"] = fixed_steps;
    j["fixed_pump_step_down"] =
        step_json(step_fixed_pump(geom, db, locked, -1), locked, dt_cal);

    ordered_json mode_steps = ordered_json::array();
    cursor = locked;
    for (int k = 0; k < count; ++k) {
        const StepResult step = step_pump_mode(geom, db, cursor, +1);
        mode_steps.push_back(step_json(step, locked, dt_cal));
        cursor = step.solution;
    }
    j["pump_mode_steps"] = mode_steps;
    j["pump_mode_step_down"] = step_json(step_pump_mode(geom, db, locked, -1), locked, dt_cal);

    const PumpTuningRequirement req = pump_tuning_requirement(geom, db, locked, first_gap_hz);
    ordered_json rj;
    rj["signal_gap_Hz"] = first_gap_hz;
    rj["n_steps"] = req.n_steps;
    rj["step_signal_Hz"] = req.step_signal_hz;
    rj["step_pump_Hz"] = req.step_pump_hz;
    rj["excursion_Hz"] = req.excursion_hz;
    j["pump_tuning_requirement"] = rj;

    write_json(resolve_out(sc, out), j);
}

// --- perturb ----------------------------------------------------------------

void run_perturb(const std::string& scenario_path, const std::string& out,
                 double target_mhz, int sweep_points) {
    const Scenario sc = Scenario::load(scenario_path);
    const SubstrateConfig substrate = sc.substrate_config();
    const Actuator actuator = sc.actuator();

    if (sweep_points > 0) {
        std::string csv = provenance_line(sc) + "\n";
        csv += "V,d_nm,dnu_s_Hz\n";
        for (int i = 0; i < sweep_points; ++i) {
            const double v = actuator.v_min + (actuator.v_max - actuator.v_min) * i /
                                                  (sweep_points - 1);
            const double d = actuator.distance_nm(v);
            csv += format_fixed(v, 4);
            csv += ',' + format_fixed(d, 3);
            csv += ',' + format_fixed(achieved_signal_shift(substrate, d), 3);
            csv += '\n';
        }
        const std::string path = resolve_out(sc, out);
        atomic_write_text(path, csv);
        std::cout << "wrote " << path << " (" << sweep_points << " rows)\n";
        return;
    }

    const CalibrationResult cal = calibrate_scenario(sc);
    const PerturbationPlan plan = plan_for_target(sc.geometry(), sc.materials(), substrate,
                                                  actuator, cal.solution, target_mhz * 1e6);
    ordered_json j = provenance_json(sc);
    j["target_mhz"] = target_mhz;
    j["d_nm"] = plan.d_nm;
    j["V"] = plan.voltage;
    j["dT_C"] = plan.dt_c;
    j["dnu_p_Hz"] = plan.dnu_p_hz;
    j["dnu_s_Hz"] = plan.dnu_s_hz;
    write_json(resolve_out(sc, out), j);
}

// --- vapor ------------------------------------------------------------------

void run_vapor(const std::string& scenario_path, const std::string& out) {
    const Scenario sc = Scenario::load(scenario_path);
    const VaporSpec& spec = sc.vapor();
    const VaporCell cell = sc.vapor_cell();

    // Grid centered on the abundance- and strength-weighted line position.
    double num = 0.0;
    double den = 0.0;
    for (const SpeciesLine& line : cell.species) {
        for (const LineComponent& comp : line.components) {
            num += line.abundance * comp.strength * comp.nu0_hz;
            den += line.abundance * comp.strength;
        }
    }
    const double center = num / den;
    const double span = spec.grid_span_ghz * 1e9;
    std::vector<double> grid(static_cast<std::size_t>(spec.grid_points));
    for (int i = 0; i < spec.grid_points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            center - span / 2 + span * i / (spec.grid_points - 1);
    }
    const std::vector<double> od = optical_depth_spectrum(cell, grid);

    std::string csv = provenance_line(sc) + "\n";
    csv += "nu_Hz,OD,transmission\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv += format_fixed(grid[i], 3);
        csv += ',' + format_double(od[i]);
        csv += ',' + format_double(std::exp(-od[i]));
        csv += '\n';
    }
    const std::string path = resolve_out(sc, out);
    atomic_write_text(path, csv);
    std::cout << "wrote " << path << " (" << grid.size() << " rows)\n";
}

// --- bandwidth --------------------------------------------------------------

void run_bandwidth(const std::string& scenario_path, const std::string& out, double span_c,
                   int points) {
    const Scenario sc = Scenario::load(scenario_path);
    const CalibrationResult cal = calibrate_scenario(sc);
    // The rate profile models operation with the pump servo-locked, so the
    // peak sits at the locked root, not at the fixed-laser solution.
    const PhaseMatchSolution locked =
        lock_to_pump_mode(sc.geometry(), sc.materials(), cal.solution);

    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            locked.t_c - span_c / 2 + span_c * i / (points - 1);
    }
    const std::vector<double> rate =
        spdc_rate_profile(sc.geometry(), sc.materials(), locked, grid);

    std::string csv = provenance_line(sc) + "\n";
    csv += "T_C,relative_rate\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv += format_fixed(grid[i] + sc.dt_cal_c(), 6);
        csv += ',' + format_double(rate[i]);
        csv += '\n';
    }
    const std::string path = resolve_out(sc, out);
    atomic_write_text(path, csv);
    std::cout << "wrote " << path << " (" << grid.size() << " rows)\n";
}

// --- simulate ---------------------------------------------------------------

void run_simulate(const std::string& scenario_path, const std::string& out,
                  std::uint64_t seed_override, bool seed_given,
                  const std::string& mode_override) {
    const Scenario sc = Scenario::load(scenario_path);
    SimSpec spec = sc.sim();
    if (seed_given) spec.config.seed = seed_override;
    std::string mode = mode_override.empty() ? spec.mode : mode_override;
    if (mode != "histogram" && mode != "stream") {
        throw ScenarioError("simulate: mode must be 'histogram' or 'stream'");
    }

    const TagStream tags = simulate_pairs(spec.config);
    std::string csv = provenance_line(sc) + "\n";
    csv += "# seed=" + std::to_string(spec.config.seed) + "\n";

    if (mode == "histogram") {
        const CoincidenceCounts hist =
            histogram_coincidences(tags, spec.bin_ns * 1e-9, spec.window_ns * 1e-9);
        csv += "tau_ns,counts\n";
        for (long k = -hist.n_side; k <= hist.n_side; ++k) {
            csv += format_double(static_cast<double>(k) * spec.bin_ns);
            csv += ',' +
                   std::to_string(hist.counts[static_cast<std::size_t>(k + hist.n_side)]);
            csv += '\n';
        }
    } else {
        csv += "channel,timestamp_ns\n";
        std::size_t is = 0;
        std::size_t ii = 0;
        while (is < tags.signal_s.size() || ii < tags.idler_s.size()) {
            const bool take_idler =
                ii < tags.idler_s.size() &&
                (is >= tags.signal_s.size() || tags.idler_s[ii] <= tags.signal_s[is]);
            if (take_idler) {
                csv += "idler," + format_double(tags.idler_s[ii] * 1e9) + '\n';
                ++ii;
            } else {
                csv += "signal," + format_double(tags.signal_s[is] * 1e9) + '\n';
                ++is;
            }
        }
    }
    const std::string path = resolve_out(sc, out);
    atomic_write_text(path, csv);
    std::cout << "wrote " << path << " (" << tags.signal_s.size() << " signal / "
              << tags.idler_s.size() << " idler tags)\n";
}

// --- fit --------------------------------------------------------------------

Histogram read_histogram_csv(const std::string& path) {
    const std::string text = read_text(path);
    Histogram h;
    std::istringstream in(text);
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != "tau_ns,counts") {
                throw DataError(path + ": expected 'tau_ns,counts' header, got '" + line +
                                "'");
            }
            saw_header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError(path + ": malformed row: " + line);
        h.tau_s.push_back(std::stod(line.substr(0, comma)) * 1e-9);
        h.counts.push_back(std::stod(line.substr(comma + 1)));
    }
    if (h.tau_s.size() < 2) throw DataError(path + ": need at least two histogram rows");
    h.bin_width_s = h.tau_s[1] - h.tau_s[0];
    if (!(h.bin_width_s > 0.0)) throw DataError(path + ": bin centers must increase");
    for (std::size_t i = 1; i < h.tau_s.size(); ++i) {
        const double step = h.tau_s[i] - h.tau_s[i - 1];
        if (std::abs(step - h.bin_width_s) > 1e-6 * h.bin_width_s) {
            throw DataError(path + ": non-uniform bin spacing");
        }
    }
    return h;
}

void run_fit(const std::string& histogram_path, const std::string& kind_name,
             const std::string& out) {
    const Histogram h = read_histogram_csv(histogram_path);
    const FitKind kind = fit_kind_from_string(kind_name);
    const FitResult result = fit_g2(h, kind);

    ordered_json j;
    j["tool_version"] = WGMOPO_VERSION;
    j["input"] = histogram_path;
    j["input_sha256"] = sha256_hex(read_text(histogram_path));
    j["kind"] = to_string(kind);
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["chi2_red"] = result.chi2_red;
    ordered_json params;
    for (std::size_t i = 0; i < result.names.size(); ++i) {
        // Report the time constants in ns for readability; everything else
        // stays in histogram units.
        const bool is_tau = result.names[i].rfind("tau", 0) == 0;
        ordered_json p;
        p["value"] = is_tau ? result.values[i] * 1e9 : result.values[i];
        p["sigma"] = is_tau ? result.sigmas[i] * 1e9 : result.sigmas[i];
        params[result.names[i] + (is_tau ? "_ns" : "")] = p;
    }
    j["parameters"] = params;

    // No scenario to anchor to: a relative --out lands next to the input
    // histogram so the pipeline stays inside one output directory.
    fs::path p(out);
    if (p.is_relative()) p = fs::path(histogram_path).parent_path() / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_json(p.string(), j);
}

// --- calibrate ----------------------------------------------------------------

void run_calibrate(const std::string& scenario_path, const std::string& out) {
    const Scenario sc = Scenario::load(scenario_path);
    const CalibrationResult cal = calibrate_scenario(sc);

    ordered_json j = provenance_json(sc);
    j["anchor_lambda_s_nm"] = sc.anchor().lambda_s_nm;
    j["anchor_lambda_i_nm"] = sc.anchor().lambda_i_nm;
    j["anchor_T_C"] = sc.anchor().t_c;
    j["dT_cal_c"] = cal.dt_cal_c;
    if (sc.has_calibration()) j["shipped_dT_cal_c"] = sc.dt_cal_c();
    j["solution"] = solution_json(cal.solution, 0.0);  // model temperature
    write_json(resolve_out(sc, out), j);
}

}  // namespace

int main(int argc, char** argv) {
    // Fixed program name: help output (and the golden transcripts that pin
    // it) must not depend on how the binary was invoked.
    CLI::App app{"Triply resonant parametric pair-source toolkit", "wgmopo"};
    app.set_version_flag("--version", WGMOPO_VERSION);
    app.require_subcommand(1);

    std::string scenario_path;
    double grid_step = 0.0;
    int count = 3;
    double target_mhz = 0.0;
    int sweep_points = 0;
    double span_c = 0.05;
    int points = 501;
    std::uint64_t seed = 0;
    std::string mode;
    std::string histogram_path;
    std::string kind;

    // Each subcommand needs its own --out storage: CLI11 default values are
    // applied at registration, so a shared string would end up holding the
    // last default registered.
    std::string out_tuning = "tuning_curve.csv";
    std::string out_steps = "steps.json";
    std::string out_perturb = "perturb.json";
    std::string out_vapor = "vapor.csv";
    std::string out_bandwidth = "bandwidth.csv";
    std::string out_simulate = "simulate.csv";
    std::string out_fit = "fit.json";
    std::string out_calibrate = "calibrate.json";

    auto* tuning = app.add_subcommand("tuning-curve",
                                      "Enumerate phase-matched channels vs temperature");
    tuning->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    tuning->add_option("--out", out_tuning, "Output CSV name")->capture_default_str();
    tuning->add_option("--grid-step-c", grid_step,
                       "Override the root-bracketing grid step [degC]");
    tuning->callback([&] { run_tuning_curve(scenario_path, out_tuning, grid_step); });

    auto* steps = app.add_subcommand("steps", "Discrete coarse/fine tuning step tables");
    steps->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    steps->add_option("--out", out_steps, "Output JSON name")->capture_default_str();
    steps->add_option("--count", count, "Consecutive steps per direction")
        ->check(CLI::PositiveNumber);
    steps->callback([&] { run_steps(scenario_path, out_steps, count); });

    auto* perturb =
        app.add_subcommand("perturb", "Plan a substrate move for a target signal shift");
    perturb->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    perturb->add_option("--out", out_perturb, "Output name")->capture_default_str();
    auto* target_opt =
        perturb->add_option("--target-mhz", target_mhz, "Requested signal shift [MHz]");
    perturb->add_option("--sweep-points", sweep_points,
                        "Emit a V -> shift sweep CSV with this many rows instead");
    perturb->callback([&] {
        if (sweep_points <= 0 && target_opt->count() == 0) {
            throw CLI::RequiredError("--target-mhz (or --sweep-points)");
        }
        run_perturb(scenario_path, out_perturb, target_mhz, sweep_points);
    });

    auto* vapor = app.add_subcommand("vapor", "Vapor-cell optical depth spectrum");
    vapor->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    vapor->add_option("--out", out_vapor, "Output CSV name")->capture_default_str();
    vapor->callback([&] { run_vapor(scenario_path, out_vapor); });

    auto* bandwidth =
        app.add_subcommand("bandwidth", "Relative pair rate vs temperature near the anchor");
    bandwidth->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    bandwidth->add_option("--out", out_bandwidth, "Output CSV name")->capture_default_str();
    bandwidth->add_option("--span-c", span_c, "Temperature span [degC]")
        ->check(CLI::PositiveNumber);
    bandwidth->add_option("--points", points, "Grid points")->check(CLI::Range(2, 1000000));
    bandwidth->callback([&] { run_bandwidth(scenario_path, out_bandwidth, span_c, points); });

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo time-tag simulation");
    simulate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    simulate->add_option("--out", out_simulate, "Output CSV name")->capture_default_str();
    auto* seed_opt = simulate->add_option("--seed", seed, "Override the scenario seed");
    simulate->add_option("--mode", mode, "Override output mode (histogram|stream)");
    simulate->callback([&] {
        run_simulate(scenario_path, out_simulate, seed, seed_opt->count() > 0, mode);
    });

    auto* fit = app.add_subcommand("fit", "Fit a correlation model to a histogram CSV");
    fit->add_option("--histogram", histogram_path, "Histogram CSV (tau_ns,counts)")
        ->required();
    fit->add_option("--kind", kind, "Model kind (direct|fluorescence)")->required();
    fit->add_option("--out", out_fit, "Output JSON name")->capture_default_str();
    fit->callback([&] { run_fit(histogram_path, kind, out_fit); });

    auto* calibrate = app.add_subcommand(
        "calibrate", "Solve the temperature-scale offset from the scenario anchor");
    calibrate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    calibrate->add_option("--out", out_calibrate, "Output JSON name")->capture_default_str();
    calibrate->callback([&] { run_calibrate(scenario_path, out_calibrate); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    } catch (const wgmopo::Error& e) {
        const char* type = "internal";
        if (dynamic_cast<const ScenarioError*>(&e) != nullptr) {
            type = "scenario";
        } else if (dynamic_cast<const DataError*>(&e) != nullptr) {
            type = "data";
        } else if (dynamic_cast<const DomainError*>(&e) != nullptr) {
            type = "domain";
        } else if (dynamic_cast<const ConvergenceError*>(&e) != nullptr) {
            type = "convergence";
        }
        ordered_json err;
        err["error"]["type"] = type;
        err["error"]["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"]["type"] = "internal";
        err["error"]["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
