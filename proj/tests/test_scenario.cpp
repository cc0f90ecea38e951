#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dstirap/scenario.hpp"

using namespace dstirap;

namespace {

std::string scenario_path(const std::string& name) {
    return std::string(DSTIRAP_SCENARIO_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("dstirap_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Structural validation of the run document: required keys with the right
// JSON types, so emitted files always match the documented schema.
void check_run_schema(const nlohmann::json& doc) {
    REQUIRE(doc.at("schema") == "dstirap.run/1");
    REQUIRE(doc.at("name").is_string());
    for (const char* key : {"ng", "ne", "nf"}) {
        REQUIRE(doc.at("dims").at(key).is_number_integer());
    }
    const auto& feas = doc.at("feasibility");
    REQUIRE(feas.at("verdict").is_string());
    REQUIRE(feas.at("n_dark").is_number_integer());
    REQUIRE(feas.at("notes").is_string());
    const auto& ms = doc.at("ms");
    REQUIRE(ms.at("stokes_sigma").is_array());
    REQUIRE(ms.at("pump_sigma").is_array());
    REQUIRE(ms.at("subsystems").is_array());
    const auto& traj = doc.at("trajectory");
    REQUIRE(traj.at("samples").is_number_integer());
    REQUIRE(traj.at("norm_drift").is_number());
    for (const char* key : {"g", "e", "f"}) {
        REQUIRE(traj.at("final_populations").at(key).is_number());
    }
    REQUIRE(doc.at("adiabatic_prediction").at("final_populations").is_object());
}

}  // namespace

TEST_CASE("bundled scenarios parse and validate") {
    for (const char* name :
         {"fig4.json", "fig5.json", "fig8.json", "fig9.json", "fig10.json",
          "fig1_234.json"}) {
        const auto scenario = load_scenario(scenario_path(name));
        CHECK(scenario.dims().total() > 0);
        CHECK(scenario.window_end > scenario.window_start);
    }
    const auto fig4 = load_scenario(scenario_path("fig4.json"));
    CHECK(fig4.dims() == ManifoldDims{3, 5, 7});
    CHECK(fig4.window_start == doctest::Approx(-27.0));
    CHECK(fig4.window_end == doctest::Approx(27.0));
    CHECK_FALSE(fig4.initial.mixed);
    CHECK(std::abs(fig4.initial.amplitudes[2] - Complex{1.0, 0.0}) < 1e-15);
}

TEST_CASE("parse errors carry the offending field") {
    CHECK_THROWS_WITH_AS(parse_scenario("{", "broken"), doctest::Contains("broken"),
                         ScenarioError);
    CHECK_THROWS_WITH_AS(
        parse_scenario(R"({"name":"x","pulses":{},"initial_state":{}})", "f"),
        doctest::Contains("linkage"), ScenarioError);
    const std::string no_m = R"({
      "name": "x",
      "linkage": {"jg": 1, "je": 2, "jf": 3,
        "pump": {"rabi": 1.0, "polarization": {"angle": 0.3}},
        "stokes": {"rabi": 1.0, "polarization": {"angle": 0.4}}},
      "pulses": {"pump": {"shape": "gaussian", "center": 1, "width": 2},
                 "stokes": {"shape": "gaussian", "center": -1, "width": 2}},
      "initial_state": {"type": "pure",
                        "amplitudes": [{"manifold": "g", "m": 7, "re": 1.0}]}
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(no_m, "f"), doctest::Contains("no sublevel"),
                         ScenarioError);
    const std::string unnormalized = R"({
      "name": "x",
      "linkage": {"jg": 1, "je": 2, "jf": 3,
        "pump": {"rabi": 1.0, "polarization": {"angle": 0.3}},
        "stokes": {"rabi": 1.0, "polarization": {"angle": 0.4}}},
      "pulses": {"pump": {"shape": "gaussian", "center": 1, "width": 2},
                 "stokes": {"shape": "gaussian", "center": -1, "width": 2}},
      "initial_state": {"type": "pure",
                        "amplitudes": [{"manifold": "g", "m": 1, "re": 0.5}]}
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(unnormalized, "f"),
                         doctest::Contains("normalized"), ScenarioError);
    const std::string bad_j = R"({
      "name": "x",
      "linkage": {"jg": 1, "je": 5, "jf": 3,
        "pump": {"rabi": 1.0, "polarization": {"angle": 0.3}},
        "stokes": {"rabi": 1.0, "polarization": {"angle": 0.4}}},
      "pulses": {"pump": {"shape": "gaussian", "center": 1, "width": 2},
                 "stokes": {"shape": "gaussian", "center": -1, "width": 2}},
      "initial_state": {"type": "pure", "amplitudes": []}
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(bad_j, "f"), doctest::Contains("dipole"),
                         ScenarioError);
    const std::string no_window = R"({
      "name": "x",
      "linkage": {"jg": 1, "je": 2, "jf": 3,
        "pump": {"rabi": 1.0, "polarization": {"angle": 0.3}},
        "stokes": {"rabi": 1.0, "polarization": {"angle": 0.4}}},
      "pulses": {"pump": {"shape": "tabulated", "times": [0, 1, 2],
                          "values": [0.0, 1.0, 0.0]},
                 "stokes": {"shape": "gaussian", "center": -1, "width": 2}},
      "initial_state": {"type": "pure",
                        "amplitudes": [{"manifold": "g", "m": 1, "re": 1.0}]}
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(no_window, "f"),
                         doctest::Contains("window"), ScenarioError);
}

TEST_CASE("explicit matrix linkage with index-addressed states") {
    const std::string text = R"({
      "name": "explicit",
      "linkage": {"p": [[1.0, [0.0, 0.5]]], "s": [[2.0], [[0.0, -1.0]]]},
      "detuning": 0.5,
      "pulses": {"pump": {"shape": "gaussian", "center": 1, "width": 2},
                 "stokes": {"shape": "gaussian", "center": -1, "width": 2}},
      "initial_state": {"type": "pure",
                        "amplitudes": [{"manifold": "g", "index": 0, "re": 1.0}]}
    })";
    const auto scenario = parse_scenario(text);
    CHECK(scenario.dims() == ManifoldDims{1, 2, 1});
    CHECK(scenario.couplings.p(0, 1) == Complex{0.0, 0.5});
    CHECK(scenario.couplings.s(1, 0) == Complex{0.0, -1.0});
    CHECK_FALSE(scenario.linkage.has_value());
    const auto analysis = analyze_scenario(scenario);
    CHECK(analysis.generic_dark_count == 0);
}

TEST_CASE("analysis of the paper linkages through the scenario layer") {
    {
        const auto scenario = load_scenario(scenario_path("fig1_234.json"));
        const auto analysis = analyze_scenario(scenario);
        CHECK(analysis.verdict.verdict == TransferVerdict::CompleteAnyInitial);
        CHECK(analysis.generic_dark_count == 7);  // 5 + 9 - 7
        CHECK(analysis.dark_total == 7);
    }
    {
        const auto scenario = load_scenario(scenario_path("fig8.json"));
        const auto analysis = analyze_scenario(scenario);
        CHECK(analysis.verdict.verdict == TransferVerdict::Partial);
        CHECK(analysis.verdict.null_sigma_count == 1);
        CHECK(analysis.verdict.uncoupled_g_count == 1);
    }
    {
        const auto scenario = load_scenario(scenario_path("fig10.json"));
        const auto analysis = analyze_scenario(scenario);
        CHECK(analysis.verdict.verdict == TransferVerdict::Conditional);
        CHECK(analysis.verdict.condition_satisfied);
    }
    {
        const auto scenario = load_scenario(scenario_path("fig9.json"));
        const auto analysis = analyze_scenario(scenario);
        CHECK(analysis.verdict.verdict == TransferVerdict::Conditional);
        CHECK_FALSE(analysis.verdict.condition_satisfied);
    }
}

TEST_CASE("run pipeline writes schema-conforming, byte-deterministic outputs") {
    auto scenario = load_scenario(scenario_path("fig4.json"));
    scenario.integrator.output_samples = 101;
    scenario.adiabaticity_samples = 101;
    const auto result = run_scenario(scenario);
    CHECK(result.trajectory.populations.back().f > 0.999);
    CHECK(result.prediction_fidelity > 0.999);

    const auto dir = temp_dir("run");
    const auto files =
        write_run_outputs(scenario, result, dir.string(), OutputFormat::Both);
    REQUIRE(files.size() == 3);
    const auto doc = nlohmann::json::parse(read_file(files[0]));
    check_run_schema(doc);

    // Full series alongside the summary.
    const auto series = nlohmann::json::parse(read_file(files[1]));
    REQUIRE(series.at("schema") == "dstirap.trajectory/1");
    CHECK(series.at("t").size() == 101);
    CHECK(series.at("re").size() == 101);
    CHECK(series.at("re")[0].size() == 15);
    CHECK(series.at("populations").at("f").size() == 101);

    // CSV: header plus one row per sample, 17 significant digits.
    const std::string csv = read_file(files[2]);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header.rfind("t,re_0,im_0", 0) == 0);
    CHECK(header.find("P_g,P_e,P_f") != std::string::npos);
    int rows = 0;
    for (std::string line; std::getline(lines, line);) rows += line.empty() ? 0 : 1;
    CHECK(rows == 101);

    // Determinism: a second run produces byte-identical artifacts.
    const auto result2 = run_scenario(scenario);
    const auto dir2 = temp_dir("run2");
    const auto files2 =
        write_run_outputs(scenario, result2, dir2.string(), OutputFormat::Both);
    CHECK(read_file(files2[0]) == read_file(files[0]));
    CHECK(read_file(files2[1]) == read_file(files[1]));
    CHECK(read_file(files2[2]) == read_file(files[2]));

    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("half-integer angular momenta end to end") {
    const std::string text = R"({
      "name": "half",
      "linkage": {"jg": 0.5, "je": 0.5, "jf": 1.5,
        "pump": {"rabi": 25.0, "polarization": {"angle": 0.7}},
        "stokes": {"rabi": 25.0, "polarization": {"angle": 0.9}}},
      "pulses": {"pump": {"shape": "gaussian", "center": 2, "width": 4},
                 "stokes": {"shape": "gaussian", "center": -2, "width": 4}},
      "initial_state": {"type": "pure",
                        "amplitudes": [{"manifold": "g", "m": -0.5, "re": 0.6},
                                       {"manifold": "g", "m": 0.5, "re": 0.8}]}
    })";
    const auto scenario = parse_scenario(text);
    CHECK(scenario.dims() == ManifoldDims{2, 2, 4});
    const auto result = run_scenario(scenario);
    CHECK(result.analysis.verdict.verdict == TransferVerdict::CompleteAnyInitial);
    CHECK(result.analysis.generic_dark_count == 4);
    CHECK(result.trajectory.populations.back().f > 0.99);
    CHECK(result.trajectory.norm_drift() < 1e-9);
}

TEST_CASE("per-state detuning is accepted and flagged") {
    const std::string text = R"({
      "name": "vector_delta",
      "linkage": {"jg": 1, "je": 2, "jf": 3,
        "pump": {"rabi": 10.0, "polarization": {"angle": 0.3}},
        "stokes": {"rabi": 10.0, "polarization": {"angle": 0.4}}},
      "detuning": [0.0, 1.0, 0.0, -1.0, 0.5],
      "pulses": {"pump": {"shape": "gaussian", "center": 1, "width": 2},
                 "stokes": {"shape": "gaussian", "center": -1, "width": 2}},
      "initial_state": {"type": "pure",
                        "amplitudes": [{"manifold": "g", "m": 0, "re": 1.0}]}
    })";
    const auto scenario = parse_scenario(text);
    CHECK_FALSE(scenario.uniform_detuning);
    const auto result = run_scenario(scenario);
    CHECK_FALSE(result.adiabaticity.has_value());  // outside the two-detuning frame
    const auto doc = nlohmann::json::parse(run_json(scenario, result));
    REQUIRE(doc.contains("warnings"));
    CHECK(doc.at("warnings")[0].get<std::string>().find("detuning") !=
          std::string::npos);
}

TEST_CASE("output format filters") {
    auto scenario = load_scenario(scenario_path("fig8.json"));
    scenario.integrator.output_samples = 21;
    scenario.want_adiabaticity = false;
    const auto result = run_scenario(scenario);
    const auto dir = temp_dir("formats");
    const auto json_only =
        write_run_outputs(scenario, result, dir.string(), OutputFormat::Json);
    REQUIRE(json_only.size() == 2);
    CHECK(json_only[0].find(".run.json") != std::string::npos);
    CHECK(json_only[1].find(".trajectory.json") != std::string::npos);
    const auto csv_only =
        write_run_outputs(scenario, result, dir.string(), OutputFormat::Csv);
    REQUIRE(csv_only.size() == 1);
    CHECK(csv_only[0].find(".trajectory.csv") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("mixed scenario run and json round trip") {
    auto scenario = load_scenario(scenario_path("fig5.json"));
    scenario.integrator.output_samples = 61;
    scenario.want_adiabaticity = false;
    const auto result = run_scenario(scenario);
    CHECK(result.trajectory.mixed);
    CHECK(result.trajectory.populations.back().f > 0.99);
    const auto doc = nlohmann::json::parse(run_json(scenario, result));
    CHECK(doc.at("trajectory").at("mixed") == true);
    const auto csv = trajectory_csv(scenario, result.trajectory);
    CHECK(csv.rfind("t,rho_0_0", 0) == 0);
    const auto series = nlohmann::json::parse(trajectory_json(scenario, result.trajectory));
    CHECK(series.at("mixed") == true);
    CHECK(series.at("rho_diag").size() == series.at("t").size());
}

TEST_CASE("analysis json carries the documented keys") {
    const auto scenario = load_scenario(scenario_path("fig1_234.json"));
    const auto analysis = analyze_scenario(scenario);
    const auto doc = nlohmann::json::parse(analysis_json(scenario, analysis));
    CHECK(doc.at("schema") == "dstirap.analysis/1");
    CHECK(doc.at("feasibility").at("verdict") == "complete_any_initial");
    CHECK(doc.at("ms").at("stokes_sigma").size() == 7);
    CHECK(doc.at("dark_states").at("counting_rule") == 7);
    // Determinism at the analysis level as well.
    CHECK(analysis_json(scenario, analysis) ==
          analysis_json(scenario, analyze_scenario(scenario)));
}

TEST_CASE("cli exit codes: 0 on success, 2 on malformed input") {
    const std::string cli = DSTIRAP_CLI_PATH;
    const auto dir = temp_dir("cli");
    const std::string ok = cli + " analyze " + scenario_path("fig1_234.json") + " -o " +
                           dir.string() + " > /dev/null 2>&1";
    const std::string bad = cli + " run " + std::string(DSTIRAP_TEST_DATA_DIR) +
                            "/malformed.json -o " + dir.string() + " > /dev/null 2>&1";
    const std::string missing = cli + " run " + dir.string() + "/absent.json -o " +
                                dir.string() + " > /dev/null 2>&1";
    REQUIRE(std::system(nullptr) != 0);
    CHECK(WEXITSTATUS(std::system(ok.c_str())) == 0);
    CHECK(WEXITSTATUS(std::system(bad.c_str())) == 2);
    CHECK(WEXITSTATUS(std::system(missing.c_str())) == 2);
    // Malformed input must not leave result files behind.
    CHECK_FALSE(std::filesystem::exists(dir / "broken.run.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("cli sweep and oracle-check") {
    const std::string cli = DSTIRAP_CLI_PATH;
    const auto dir = temp_dir("sweep");
    const std::string sweep = cli + " sweep " + scenario_path("fig9.json") + " " +
                              scenario_path("fig10.json") + " -j 2 -o " + dir.string() +
                              " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(sweep.c_str())) == 0);
    CHECK(std::filesystem::exists(dir / "fig9.run.json"));
    CHECK(std::filesystem::exists(dir / "fig10.run.json"));
    CHECK(std::filesystem::exists(dir / "fig9.trajectory.csv"));
    const std::string oracle = cli + " oracle-check --grid 30 > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(oracle.c_str())) == 0);
    std::filesystem::remove_all(dir);
}
