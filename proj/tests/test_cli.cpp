#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "starbsde/experiment.hpp"

using namespace starbsde;
using nlohmann::json;

namespace {

ExperimentConfig make_config(const json& j) { return parse_experiment(j); }

} // namespace

TEST_CASE("solve task emits rho_0 and applies assertions") {
    const json j = {
        {"id", "closed_form"},
        {"task", "solve"},
        {"lattice", {{"T", 1.0}, {"N", 100}}},
        {"driver", {{"name", "scaled_abs_z"}, {"params", {{"mu", 0.5}}}}},
        {"claim", {{"kind", "identity"}}},
        {"seed", 42},
        {"assert", json::array({{{"quantity", "rho_0"}, {"equals", 0.5}, {"tol", 1e-10}}})},
    };
    const ExperimentOutcome out = run_experiment(make_config(j));
    CHECK(out.all_pass);
    REQUIRE(!out.rows.empty());
    CHECK(out.rows[0].quantity == "rho_0");
    CHECK(out.rows[0].experiment_id == "closed_form#seed=42");
    CHECK(std::abs(out.rows[0].value - 0.5) <= 1e-10);

    // A failing assertion flips the flag but still reports.
    json bad = j;
    bad["assert"] = json::array({{{"quantity", "rho_0"}, {"equals", 0.6}, {"tol", 1e-10}}});
    CHECK_FALSE(run_experiment(make_config(bad)).all_pass);
}

TEST_CASE("malformed specs are validation errors with field paths") {
    json j = {
        {"task", "solve"},
        {"lattice", {{"T", 1.0}, {"N", 10}}},
        {"driver", {{"name", "no_such_driver"}}},
        {"claim", {{"kind", "identity"}}},
    };
    CHECK_THROWS_AS(make_config(j), ValidationError);

    j["driver"] = {{"name", "zero"}};
    j["claim"] = {{"kind", "martian"}};
    CHECK_THROWS_AS(make_config(j), ValidationError);

    j["claim"] = {{"kind", "identity"}};
    j["lattice"] = {{"T", -1.0}, {"N", 10}};
    CHECK_THROWS_AS(make_config(j), ValidationError);

    json cfg = {
        {"task", "solve"},
        {"lattice", {{"T", 1.0}, {"N", 10}}},
        {"driver", {{"name", "zero"}}},
        {"claim", {{"kind", "identity"}}},
        {"assert", json::array({{{"quantity", "no_such_quantity"}, {"equals", 0.0}}})},
    };
    CHECK_THROWS_AS(run_experiment(make_config(cfg)), ValidationError);
}

TEST_CASE("CSV schema, 17-digit round trip, and determinism") {
    const json j = {
        {"id", "roundtrip"},
        {"task", "solve"},
        {"lattice", {{"T", 1.0}, {"N", 37}}},
        {"driver", {{"name", "example1"}}},
        {"claim", {{"kind", "identity"}}},
        {"seed", 7},
    };
    const ExperimentOutcome a = run_experiment(make_config(j));
    const ExperimentOutcome b = run_experiment(make_config(j));
    const std::string csv_a = report_to_csv(a.rows);
    const std::string csv_b = report_to_csv(b.rows);
    CHECK(csv_a == csv_b);
    CHECK(csv_a.rfind("experiment_id,task,quantity,value,tolerance,pass,wall_ms\n", 0) == 0);

    // Parsing the printed value reproduces the double exactly.
    const std::string line = csv_a.substr(csv_a.find('\n') + 1);
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = line.find(',', c1 + 1);
    const std::size_t c3 = line.find(',', c2 + 1);
    const std::size_t c4 = line.find(',', c3 + 1);
    const double parsed = std::stod(line.substr(c3 + 1, c4 - c3 - 1));
    CHECK(parsed == a.rows[0].value);

    const std::string human = report_to_human(a.rows);
    CHECK(human.find("PASS") != std::string::npos);
}

TEST_CASE("batch config files load with overrides") {
    const char* path = "test_cli_batch.json";
    {
        std::ofstream out(path);
        out << R"({"experiments": [
            {"id": "a", "task": "solve", "lattice": {"T": 1.0, "N": 4},
             "driver": {"name": "zero"}, "claim": {"kind": "identity"}},
            {"id": "b", "task": "solve", "lattice": {"T": 1.0, "N": 8},
             "driver": {"name": "scaled_abs_z"}, "claim": {"kind": "identity"}}
        ]})";
    }
    const auto configs = load_config_file(path, std::nullopt, 123);
    REQUIRE(configs.size() == 2);
    CHECK(configs[0].seed == 123);
    CHECK(configs[1].seed == 123);
    CHECK(configs[1].steps == 8);
    std::remove(path);

    CHECK_THROWS_AS(load_config_file("no_such_file.json", std::nullopt, std::nullopt),
                    ValidationError);
}

TEST_CASE("k*delta constraint is checked at load time") {
    const char* path = "test_cli_coarse.json";
    {
        std::ofstream out(path);
        // example1 has k = 2; N = 2 gives k*delta = 1 > 0.5.
        out << R"({"id": "coarse", "task": "solve", "lattice": {"T": 1.0, "N": 2},
                   "driver": {"name": "example1"}, "claim": {"kind": "identity"}})";
    }
    CHECK_THROWS_AS(load_config_file(path, std::nullopt, std::nullopt), ValidationError);
    std::remove(path);
}

TEST_CASE("properties task reports per-mode rows") {
    const json j = {
        {"id", "props"},
        {"task", "properties"},
        {"lattice", {{"T", 1.0}, {"N", 24}}},
        {"driver", {{"name", "scaled_abs_z"}}},
        {"claim", {{"kind", "identity"}}},
        {"params", {{"modes", json::array({"cash_additive", "time_consistency"})}}},
        {"assert", json::array({{{"quantity", "cash_additive_holds"}, {"equals", 1.0}},
                                {{"quantity", "time_consistency_holds"}, {"equals", 1.0}}})},
    };
    const ExperimentOutcome out = run_experiment(make_config(j));
    CHECK(out.all_pass);
    CHECK(out.rows.size() == 4);
}
