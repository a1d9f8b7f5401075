// File formats: plan and deployment JSON, trace JSONL, and run configs.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "iplan/serialize.hpp"

using namespace iplan;
namespace fs = std::filesystem;

namespace {

FloorPlan office_plan() {
    FloorPlan plan;
    plan.boundary = {{0, 0}, 10.0, 6.0};
    const std::size_t brick = plan.add_material("brick", 8.0);
    const std::size_t wood = plan.add_material("wood", 3.0);
    plan.add_wall({0, 0}, {10, 0}, brick, 0.2);
    plan.add_wall({10, 0}, {10, 6}, brick, 0.2);
    plan.add_wall({10, 6}, {0, 6}, brick, 0.2);
    plan.add_wall({0, 6}, {0, 0}, brick, 0.2);
    plan.add_wall({4, 0}, {4, 6}, brick, 0.1);
    plan.add_opening(4, 2.6, 0.8, OpeningKind::Door, wood);
    plan.add_opening(0, 4.6, 0.8, OpeningKind::Door, wood);
    plan.add_room({0, 0}, 4, 6, "west");
    return plan;
}

std::string temp_path(const std::string& name) {
    return (fs::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct FileGuard {
    std::string path;
    ~FileGuard() { std::remove(path.c_str()); }
};

}  // namespace

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

TEST_CASE("plans round-trip through JSON without loss") {
    const FloorPlan plan = office_plan();
    const nlohmann::json doc = plan_to_json(plan);
    const FloorPlan back = plan_from_json(doc);

    REQUIRE(back.materials.size() == 2);
    CHECK(back.materials[0].name == "brick");
    CHECK(back.materials[1].attenuation_db == 3.0);
    REQUIRE(back.walls.size() == 5);
    CHECK(back.walls[4].a == Point2D{4, 0});
    CHECK(back.walls[4].b == Point2D{4, 6});
    CHECK(back.walls[4].material == 0);
    CHECK(back.walls[4].thickness == 0.1);
    REQUIRE(back.openings.size() == 2);
    CHECK(back.openings[0].wall == 4);
    CHECK(back.openings[0].offset == 2.6);
    CHECK(back.openings[0].kind == OpeningKind::Door);
    CHECK(back.openings[1].wall == 0);
    REQUIRE(back.rooms.size() == 1);
    CHECK(back.rooms[0].label == "west");
    CHECK(back.boundary.width == 10.0);

    // Serialization is canonical: a loaded plan serializes to the same bytes.
    CHECK(plan_to_json(back).dump() == doc.dump());
}

TEST_CASE("plan loader addresses the offending field") {
    nlohmann::json doc = plan_to_json(office_plan());

    SECTION("missing boundary") {
        doc.erase("boundary");
        CHECK_THROWS_WITH(plan_from_json(doc), "plan is missing 'boundary'");
    }
    SECTION("non-numeric coordinate") {
        doc["walls"][0]["a"]["x"] = "zero";
        CHECK_THROWS_WITH(plan_from_json(doc), "walls[0].a.x must be a number");
    }
    SECTION("unknown material reference") {
        doc["walls"][2]["material"] = "steel";
        CHECK_THROWS_WITH(plan_from_json(doc),
                          "walls[2].material names unknown material 'steel'");
    }
    SECTION("bad opening kind") {
        doc["openings"][0]["kind"] = "hatch";
        CHECK_THROWS_WITH(plan_from_json(doc), "openings[0].kind must be 'door' or 'window'");
    }
    SECTION("fractional wall index") {
        doc["openings"][0]["wall"] = 1.5;
        CHECK_THROWS_WITH(plan_from_json(doc),
                          "openings[0].wall must index one of the 5 walls");
    }
    SECTION("opening on a missing wall") {
        doc["openings"][0]["wall"] = 99;
        CHECK_THROWS_AS(plan_from_json(doc), PlanFormatError);
    }
    SECTION("materials must be an array") {
        doc["materials"] = 7;
        CHECK_THROWS_WITH(plan_from_json(doc), "plan.materials must be an array");
    }
    SECTION("room missing a dimension") {
        doc["rooms"][0].erase("width");
        CHECK_THROWS_WITH(plan_from_json(doc), "rooms[0] is missing 'width'");
    }
    SECTION("structural problems load fine; validation reports them") {
        doc["openings"][0]["offset"] = 50.0;   // beyond the end of wall 4
        const FloorPlan loaded = plan_from_json(doc);
        CHECK_FALSE(validate_plan(loaded).empty());
    }
    SECTION("top level must be an object") {
        CHECK_THROWS_AS(plan_from_json(nlohmann::json::array()), PlanFormatError);
    }
}

TEST_CASE("plan files save and load byte-identically") {
    const FileGuard a{temp_path("iplan_plan_a.json")};
    const FileGuard b{temp_path("iplan_plan_b.json")};

    const FloorPlan plan = office_plan();
    save_plan(plan, a.path);
    save_plan(load_plan(a.path), b.path);
    CHECK(slurp(a.path) == slurp(b.path));

    CHECK_THROWS_AS(load_plan("/nonexistent/nowhere.json"), IoError);

    const FileGuard garbage{temp_path("iplan_garbage.json")};
    std::ofstream(garbage.path) << "{not json";
    CHECK_THROWS_AS(load_plan(garbage.path), PlanFormatError);
}

// ---------------------------------------------------------------------------
// Deployments
// ---------------------------------------------------------------------------

TEST_CASE("deployments round-trip with radio parameters") {
    Deployment deployment;
    deployment.aps = {{1.5, 2.5}, {7.0, 3.0}};
    deployment.config.pathloss_exponent = 3.0;

    const Deployment back = deployment_from_json(deployment_to_json(deployment));
    CHECK(back.aps == deployment.aps);
    CHECK(back.config.pathloss_exponent == 3.0);
    CHECK(back.config.frequency_mhz == deployment.config.frequency_mhz);

    const Deployment bare = deployment_from_json(nlohmann::json::parse(
        R"({"aps": [{"x": 1.0, "y": 2.0}]})"));
    REQUIRE(bare.aps.size() == 1);
    CHECK(bare.config.pathloss_exponent == 2.0);   // defaults apply

    CHECK_THROWS_WITH(deployment_from_json(nlohmann::json::object()),
                      "deployment is missing 'aps'");
    CHECK_THROWS_AS(deployment_from_json(nlohmann::json::parse(
                        R"({"aps": [{"x": 1.0}]})")),
                    PlanFormatError);
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

TEST_CASE("traces round-trip through JSONL including violation steps") {
    PlanningTask task;
    task.plan.boundary = {{0, 0}, 20.0, 10.0};
    task.coverage_target = 1.0;
    task.threshold_db = 65.0;
    task.max_aps = 1;
    task.max_iterations = 3;
    task.cell_size = 0.5;

    const Proposer script = scripted_proposer({
        Deployment{{{25.0, 5.0}}, {}},    // rejected: outside the boundary
        Deployment{{{10.0, 5.0}}, {}},    // covers everything at 65 dB
    });
    const OptimizationTrace trace = optimize_loop(task, script);
    REQUIRE(trace.steps.size() == 2);
    REQUIRE(trace.outcome == Outcome::Converged);

    const FileGuard file{temp_path("iplan_trace.jsonl")};
    save_trace_jsonl(trace, file.path);

    // One line per step plus the trailer.
    const std::string text = slurp(file.path);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(text.find("\"violation\"") != std::string::npos);
    CHECK(text.find("\"outcome\":\"converged\"") != std::string::npos);

    const OptimizationTrace back = load_trace_jsonl(file.path);
    REQUIRE(back.steps.size() == 2);
    CHECK(back.outcome == Outcome::Converged);
    CHECK(back.best_index == trace.best_index);
    CHECK(back.task_fingerprint == trace.task_fingerprint);
    CHECK(back.steps[0].feedback.violation == trace.steps[0].feedback.violation);
    CHECK_FALSE(back.steps[0].feedback.valid());
    CHECK(back.steps[1].feedback.stats.coverage_fraction == 1.0);
    CHECK(back.steps[1].deployment.aps == trace.steps[1].deployment.aps);
    CHECK(back.steps[1].feedback.stats.worst_pathloss_db ==
          trace.steps[1].feedback.stats.worst_pathloss_db);

    // Round-tripping is byte-stable.
    const FileGuard file2{temp_path("iplan_trace2.jsonl")};
    save_trace_jsonl(back, file2.path);
    CHECK(slurp(file2.path) == text);
}

TEST_CASE("trace loader rejects malformed files") {
    const FileGuard file{temp_path("iplan_trace_bad.jsonl")};

    std::ofstream(file.path) << "{\"iteration\": 1, \"aps\": []}\n";   // no trailer
    CHECK_THROWS_AS(load_trace_jsonl(file.path), PlanFormatError);

    std::ofstream(file.path) << "not json\n";
    CHECK_THROWS_WITH(load_trace_jsonl(file.path), "trace line 1 is not valid JSON");

    std::ofstream(file.path) << "{\"iteration\": 1, \"aps\": []}\n"
                             << "{\"outcome\": \"sideways\", \"best_iteration\": 1, "
                                "\"task_fingerprint\": \"0x0\"}\n";
    CHECK_THROWS_AS(load_trace_jsonl(file.path), PlanFormatError);

    CHECK_THROWS_AS(load_trace_jsonl("/nonexistent/trace.jsonl"), IoError);
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

TEST_CASE("run configs merge onto defaults") {
    const nlohmann::json doc = nlohmann::json::parse(R"({
        "plan": "data/plans/reference_office.json",
        "task": {"coverage_target": 0.9, "threshold_db": 100, "max_aps": 2,
                 "max_iterations": 12, "cell_size": 0.5},
        "radio": {"pathloss_exponent": 3.0},
        "optimizer": {"kind": "aco", "n_ants": 8, "evaporation": 0.2},
        "llm": {"base_url": "http://127.0.0.1:9999/v1", "model": "test-model",
                "api_key_env": "PLANNER_KEY", "max_retries": 4},
        "joint": {"boundary_width": 16, "room_sizes": [{"width": 3, "depth": 3}],
                  "n_candidates": 5},
        "seed": 17,
        "output_dir": "out"
    })");
    const RunConfig config = run_config_from_json(doc);

    CHECK(config.plan_path == "data/plans/reference_office.json");
    CHECK(config.task.coverage_target == 0.9);
    CHECK(config.task.threshold_db == 100.0);
    CHECK(config.task.max_aps == 2);
    CHECK(config.task.max_iterations == 12);
    CHECK(config.task.cell_size == 0.5);
    CHECK(config.task.radio.pathloss_exponent == 3.0);
    CHECK(config.optimizer == OptimizerKind::Aco);
    CHECK(config.aco.n_ants == 8);
    CHECK(config.aco.evaporation == 0.2);
    CHECK(config.llm.base_url == "http://127.0.0.1:9999/v1");
    CHECK(config.llm.model == "test-model");
    CHECK(config.llm.api_key_env == "PLANNER_KEY");
    CHECK(config.llm.max_retries == 4);
    CHECK(config.joint.boundary_width == 16.0);
    REQUIRE(config.joint.room_sizes.size() == 1);
    CHECK(config.joint.room_sizes[0] == std::pair{3.0, 3.0});
    CHECK(config.joint.n_candidates == 5);
    CHECK(config.seed == 17);
    CHECK(config.output_dir == "out");

    // The seed fans out to every stochastic component.
    CHECK(config.aco.seed == 17);
    CHECK(config.anneal.seed == 17);
    CHECK(config.joint.seed == 17);
    // The radio config fans out to the joint task too.
    CHECK(config.joint.radio.pathloss_exponent == 3.0);
}

TEST_CASE("run config defaults stand alone") {
    const RunConfig config = run_config_from_json(nlohmann::json::object());
    CHECK(config.optimizer == OptimizerKind::Greedy);
    CHECK(config.task.coverage_target == 0.95);
    CHECK(config.task.threshold_db == 110.0);
    CHECK(config.seed == 0);
    CHECK(config.output_dir == "runs");
    CHECK(config.joint.room_sizes.size() == 4);
}

TEST_CASE("run config rejects typos and unknown optimizers") {
    CHECK_THROWS_WITH(run_config_from_json(nlohmann::json::parse(R"({"plann": "x"})")),
                      "config has unknown section 'plann'");
    CHECK_THROWS_WITH(
        run_config_from_json(nlohmann::json::parse(R"({"optimizer": {"kind": "magic"}})")),
        "optimizer.kind 'magic' is unknown");
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"seed": "zero"})")),
                    PlanFormatError);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"([1, 2])")), PlanFormatError);
}
