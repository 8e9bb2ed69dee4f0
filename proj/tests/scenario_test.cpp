#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "support.hpp"
#include "wgmopo/constants.hpp"
#include "wgmopo/errors.hpp"
#include "wgmopo/io.hpp"
#include "wgmopo/scenario.hpp"
#include "wgmopo/sha256.hpp"

using namespace wgmopo;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string scenario_path(const std::string& name) {
    return support::data_path("scenarios/" + name + ".json");
}

// Minimal valid scenario with absolute data references, written to the
// scratch directory so schema mutations can be exercised in isolation.
json base_scenario_json() {
    json j;
    j["schema_version"] = 1;
    j["name"] = "schema-probe";
    j["geometry"] = support::data_path("geometry/wgmr_532.json");
    j["materials"] = {{"extraordinary", support::data_path("materials/mg_cln_e.json")},
                      {"ordinary", support::data_path("materials/mg_cln_o.json")}};
    j["pump"] = {{"lambda_nm", 532.0}};
    return j;
}

std::string write_scenario(const json& j, const std::string& filename) {
    const fs::path path = fs::path(support::scratch_dir()) / filename;
    std::ofstream out(path);
    out << j.dump(1);
    out.close();
    return path.string();
}

}  // namespace

TEST_CASE("default scenario loads every section") {
    const Scenario sc = Scenario::load(scenario_path("default"));
    CHECK(sc.name() == "default");
    CHECK(sc.output_dir() == "out");
    CHECK(sc.sha256() == sha256_hex(read_text(scenario_path("default"))));
    CHECK(sc.sha256().size() == 64);

    CHECK(sc.pump().lambda_nm == 532.0);
    CHECK(sc.pump().frequency_hz() == doctest::Approx(constants::c / 532.0e-9).epsilon(1e-12));
    CHECK(sc.geometry().r_mm == doctest::Approx(2.5));

    REQUIRE(sc.has_anchor());
    CHECK(sc.anchor().lambda_s_nm == doctest::Approx(895.0015));
    CHECK(sc.anchor().lambda_i_nm == doctest::Approx(1311.6773));
    CHECK(sc.anchor().t_c == doctest::Approx(141.0));

    REQUIRE(sc.has_tuning());
    CHECK(sc.tuning().t_min_c == doctest::Approx(128.5));
    CHECK(sc.tuning().t_max_c == doctest::Approx(168.5));
    CHECK(sc.tuning().q_max == 1);
    CHECK(sc.tuning().p_max == 0);
    CHECK(sc.tuning().ms_min == 32300);
    CHECK(sc.tuning().ms_max == 44400);
    const ScanBounds bounds = sc.tuning().scan_bounds();
    CHECK(bounds.q_max == 1);
    CHECK(bounds.ms_min == 32300);

    REQUIRE(sc.has_calibration());
    CHECK(sc.dt_cal_c() == doctest::Approx(-0.0866));

    REQUIRE(sc.has_substrate());
    const SubstrateConfig sub = sc.substrate_config();
    CHECK(sub.n_substrate == doctest::Approx(2.03));
    CHECK(sub.sign == -1.0);
    CHECK(sub.contact_shift_hz[static_cast<int>(Role::pump)] == doctest::Approx(250.0e6));
    CHECK(sub.contact_shift_hz[static_cast<int>(Role::signal)] == doctest::Approx(400.0e6));
    CHECK(sub.contact_shift_hz[static_cast<int>(Role::idler)] == doctest::Approx(800.0e6));
    CHECK(sub.decay_length_nm[static_cast<int>(Role::idler)] == doctest::Approx(53.77));

    REQUIRE(sc.has_actuator());
    CHECK(sc.actuator().nm_per_volt == doctest::Approx(15.0));
    CHECK(sc.actuator().v_min == 0.0);
    CHECK(sc.actuator().v_max == 20.0);

    REQUIRE(sc.has_vapor());
    const VaporCell cell = sc.vapor_cell();
    CHECK(cell.length_m == doctest::Approx(0.05));
    CHECK(cell.t_c == doctest::Approx(80.0));
    REQUIRE(cell.species.size() == 1);  // "Cs" matches only the caesium line
    CHECK(cell.species[0].species == "Cs133");

    CHECK_FALSE(sc.has_sim());
    CHECK_THROWS_AS((void)sc.sim(), ScenarioError);
}

TEST_CASE("species prefix selects every matching isotope") {
    const Scenario sc = Scenario::load(scenario_path("families"));
    REQUIRE(sc.has_vapor());
    CHECK(sc.vapor().species == "Rb");
    const VaporCell cell = sc.vapor_cell();
    REQUIRE(cell.species.size() == 2);  // natural rubidium: both isotopes
    CHECK(cell.species[0].species.rfind("Rb", 0) == 0);
    CHECK(cell.species[1].species.rfind("Rb", 0) == 0);
    CHECK(cell.species[0].species != cell.species[1].species);
}

TEST_CASE("sections absent from the file raise on access") {
    const Scenario sc = Scenario::load(scenario_path("narrow_oracle"));
    CHECK_FALSE(sc.has_anchor());
    CHECK_FALSE(sc.has_substrate());
    CHECK_FALSE(sc.has_vapor());
    CHECK_FALSE(sc.has_sim());
    CHECK(sc.has_tuning());
    CHECK_THROWS_AS((void)sc.anchor(), ScenarioError);
    CHECK_THROWS_AS((void)sc.vapor(), ScenarioError);
    CHECK_THROWS_AS(sc.vapor_cell(), ScenarioError);
    CHECK_THROWS_AS(sc.substrate_config(), ScenarioError);
}

TEST_CASE("simulation scenarios parse into run configurations") {
    const Scenario direct = Scenario::load(scenario_path("sim_direct_fit"));
    REQUIRE(direct.has_sim());
    CHECK(direct.sim().mode == "histogram");
    CHECK(direct.sim().config.tau_si_s == doctest::Approx(9.4e-9));
    CHECK(direct.sim().config.tau_f_s == 0.0);
    CHECK(direct.sim().config.pair_rate_hz > 0.0);
    CHECK(direct.sim().bin_ns > 0.0);
    CHECK(direct.sim().window_ns >= direct.sim().bin_ns);

    const Scenario stream = Scenario::load(scenario_path("sim_stream_demo"));
    REQUIRE(stream.has_sim());
    CHECK(stream.sim().mode == "stream");

    const Scenario fluor = Scenario::load(scenario_path("sim_fluor_fit"));
    REQUIRE(fluor.has_sim());
    CHECK(fluor.sim().config.tau_f_s > 0.0);
    CHECK(fluor.sim().config.reemission_efficiency <= 1.0);
}

TEST_CASE("calibration pins the thermometer offset from the anchor") {
    const Scenario sc = Scenario::load(scenario_path("default"));
    const CalibrationResult cal = calibrate_scenario(sc);

    // The measured anchor point (895.0015 nm / 1311.6773 nm at a 141.0 degC
    // thermometer reading) identifies one fundamental channel and the model
    // temperature it solves at.
    CHECK(cal.solution.channel.pump.m == 64913);
    CHECK(cal.solution.channel.signal.m == 38770);
    CHECK(cal.solution.channel.idler.m == 26143);
    CHECK(cal.solution.t_c == doctest::Approx(141.0866142096503).epsilon(1e-9));
    CHECK(cal.dt_cal_c == doctest::Approx(141.0 - 141.0866142096503).epsilon(1e-6));
    CHECK(cal.solution.lambda_s_nm() ==
          doctest::Approx(sc.anchor().lambda_s_nm).epsilon(2e-6));
    CHECK(cal.solution.lambda_i_nm() ==
          doctest::Approx(sc.anchor().lambda_i_nm).epsilon(2e-6));
    // Shipped calibration constant matches the recomputed offset at the
    // 0.1 mK level (it is stored rounded).
    CHECK(sc.dt_cal_c() == doctest::Approx(cal.dt_cal_c).epsilon(2e-3));
}

TEST_CASE("scenario parsing is strict about the schema") {
    // A pristine copy of the probe must load.
    CHECK_NOTHROW(Scenario::load(write_scenario(base_scenario_json(), "ok.json")));

    json j = base_scenario_json();
    j["surprise"] = 1;
    CHECK_THROWS_AS(Scenario::load(write_scenario(j, "unknown_key.json")), ScenarioError);

    j = base_scenario_json();
    j.erase("pump");
    CHECK_THROWS_AS(Scenario::load(write_scenario(j, "missing_pump.json")), ScenarioError);

    j = base_scenario_json();
    j["schema_version"] = 2;
    CHECK_THROWS_AS(Scenario::load(write_scenario(j, "bad_version.json")), ScenarioError);

    j = base_scenario_json();
    j["name"] = "";
    CHECK_THROWS_AS(Scenario::load(write_scenario(j, "empty_name.json")), ScenarioError);

    j = base_scenario_json();
    j["anchor"] = {{"lambda_s_nm", 1311.0}, {"lambda_i_nm", 895.0}, {"T_c", 141.0}};
    CHECK_THROWS_AS(Scenario::load(write_scenario(j, "swapped_anchor.json")),
                    ScenarioError);

    j = base_scenario_json();
    j["tuning"] = {{"t_min_c", 130.0}, {"t_max_c", 150.0}, {"grid_step_c", 0.01},
                   {"q_max", 11},      {"p_max", 0},       {"ms_min", 38000},
                   {"ms_max", 39000}};
    CHECK_THROWS_AS(Scenario::load(write_scenario(j, "q_max_range.json")), ScenarioError);

    j = base_scenario_json();
    j["tuning"] = {{"t_min_c", 150.0}, {"t_max_c", 130.0}, {"grid_step_c", 0.01},
                   {"q_max", 1},       {"p_max", 0},       {"ms_min", 38000},
                   {"ms_max", 39000}};
    CHECK_THROWS_AS(Scenario::load(write_scenario(j, "window_order.json")), ScenarioError);

    j = base_scenario_json();
    j["vapor"] = {{"species", "Cs"},
                  {"length_cm", 5.0},
                  {"temperature_c", 80.0},
                  {"grid_span_ghz", 24.0},
                  {"grid_points", 1}};
    CHECK_THROWS_AS(Scenario::load(write_scenario(j, "grid_points.json")), ScenarioError);

    j = base_scenario_json();
    j["actuator"] = {{"nm_per_volt", 15.0}, {"voltage_range", {20.0, 0.0}}};
    CHECK_THROWS_AS(Scenario::load(write_scenario(j, "volt_order.json")), ScenarioError);

    j = base_scenario_json();
    j["calibration"] = {{"dT_cal_c", -0.1}, {"note", "lab book"}};
    CHECK_THROWS_AS(Scenario::load(write_scenario(j, "cal_extra.json")), ScenarioError);

    CHECK_THROWS_AS(Scenario::load(scenario_path("no_such_scenario")), ScenarioError);
}

TEST_CASE("relative data paths resolve through the environment root") {
    // A copy of the default scenario placed outside the data tree cannot
    // resolve its relative references on its own...
    const std::string original = read_text(scenario_path("default"));
    const fs::path moved = fs::path(support::scratch_dir()) / "moved_default.json";
    {
        std::ofstream out(moved);
        out << original;
    }
    unsetenv("WGMOPO_DATA_DIR");
    try {
        Scenario::load(moved.string());
        FAIL("expected ScenarioError for unresolvable data paths");
    } catch (const ScenarioError& e) {
        // The error enumerates the roots that were searched.
        CHECK(std::string(e.what()).find("tried:") != std::string::npos);
        CHECK(std::string(e.what()).find("wgmr_532") != std::string::npos);
    }

    // ...but WGMOPO_DATA_DIR supplies the root.
    setenv("WGMOPO_DATA_DIR", support::data_dir().c_str(), 1);
    const Scenario sc = Scenario::load(moved.string());
    unsetenv("WGMOPO_DATA_DIR");
    CHECK(sc.name() == "default");
    // Provenance hashes the file that was actually read, wherever it lives.
    CHECK(sc.sha256() == sha256_hex(original));
}
