#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "iplan/metaheuristics.hpp"
#include "iplan/optimize.hpp"

using namespace iplan;

namespace {

FloorPlan empty_plan(double width, double depth) {
    FloorPlan plan;
    plan.boundary = {{0.0, 0.0}, width, depth};
    plan.materials = default_materials();
    return plan;
}

// Empty 20x10 room where one AP cannot cover everything: threshold 60 dB
// buys a ~9.94 m radius, shorter than the corner-to-center distance. Target
// 1.0 is unreachable, so optimizers run their full budget and can be
// compared at their best.
PlanningTask open_room_benchmark() {
    PlanningTask task;
    task.plan = empty_plan(20, 10);
    task.coverage_target = 1.0;
    task.threshold_db = 60.0;
    task.max_aps = 1;
    task.max_iterations = 200;
    task.cell_size = 0.5;
    return task;
}

Proposer constant_proposer(Deployment d) {
    return [d](const PlanningTask&, const std::vector<Step>&) { return d; };
}

double running_best(const OptimizationTrace& trace) {
    double best = 0.0;
    for (const Step& s : trace.steps)
        if (s.feedback.valid()) best = std::max(best, s.feedback.stats.coverage_fraction);
    return best;
}

}  // namespace

// ============================================================================
// The loop
// ============================================================================

TEST_CASE("an immediately-covering proposal converges in one step") {
    PlanningTask task;
    task.plan = empty_plan(20, 10);
    task.coverage_target = 0.95;
    task.threshold_db = 110.0;   // anything inside the room is covered
    task.max_aps = 1;
    task.max_iterations = 10;

    const auto trace = optimize_loop(task, constant_proposer({{{10, 5}}, task.radio}));
    REQUIRE(trace.steps.size() == 1);
    CHECK(trace.outcome == Outcome::Converged);
    CHECK(trace.steps[0].feedback.stats.coverage_fraction == 1.0);
    CHECK(trace.best_index == 0);
}

TEST_CASE("invalid proposals become violation steps, not crashes") {
    PlanningTask task;
    task.plan = empty_plan(20, 10);
    task.max_aps = 1;
    task.max_iterations = 4;
    task.cell_size = 0.25;

    const auto trace = optimize_loop(task, constant_proposer({{{25, 5}}, task.radio}));
    REQUIRE(trace.steps.size() == 4);
    CHECK(trace.outcome == Outcome::Exhausted);
    for (const Step& s : trace.steps) {
        CHECK(s.feedback.violation == "ap 0 outside boundary");
        CHECK(s.feedback.stats.coverage_fraction == 0.0);
        CHECK(s.feedback.stats.covered_cells == 0);
        CHECK(s.feedback.stats.total_cells == 3200);
    }
}

TEST_CASE("iteration numbers are 1-based and strictly increasing") {
    PlanningTask task;
    task.plan = empty_plan(20, 10);
    task.coverage_target = 1.0;
    task.threshold_db = 50.0;    // unreachable
    task.max_aps = 1;
    task.max_iterations = 5;

    const auto trace = optimize_loop(task, constant_proposer({{{10, 5}}, task.radio}));
    REQUIRE(trace.steps.size() == 5);
    for (std::size_t i = 0; i < trace.steps.size(); ++i)
        CHECK(trace.steps[i].feedback.iteration == i + 1);
}

TEST_CASE("a throwing proposer surfaces as ProposerFailure with partial trace") {
    PlanningTask task;
    task.plan = empty_plan(20, 10);
    task.coverage_target = 1.0;
    task.threshold_db = 50.0;
    task.max_aps = 1;
    task.max_iterations = 10;

    SECTION("plain exceptions are wrapped as non-network failures") {
        int calls = 0;
        const Proposer flaky = [&](const PlanningTask& t, const std::vector<Step>&) -> Deployment {
            if (++calls > 2) throw std::runtime_error("proposer broke");
            return {{{10, 5}}, t.radio};
        };
        try {
            optimize_loop(task, flaky);
            FAIL("expected ProposerFailure");
        } catch (const ProposerFailure& e) {
            CHECK_FALSE(e.network_error);
            CHECK(e.partial_trace.steps.size() == 2);
            CHECK(std::string(e.what()) == "proposer broke");
        }
    }
    SECTION("proposer errors carry their network flag through") {
        const Proposer down = [](const PlanningTask&, const std::vector<Step>&) -> Deployment {
            throw ProposerError("endpoint unreachable", true);
        };
        try {
            optimize_loop(task, down);
            FAIL("expected ProposerFailure");
        } catch (const ProposerFailure& e) {
            CHECK(e.network_error);
            CHECK(e.partial_trace.steps.empty());
        }
    }
}

TEST_CASE("the loop rejects malformed tasks") {
    PlanningTask task;
    task.plan = empty_plan(20, 10);
    task.coverage_target = 1.5;
    CHECK_THROWS_AS(optimize_loop(task, constant_proposer({{{1, 1}}, {}})), InvalidParams);
}

// ============================================================================
// Greedy worst-point proposer
// ============================================================================

TEST_CASE("greedy starts with one AP at the centroid") {
    PlanningTask task;
    task.plan = empty_plan(20, 10);
    const Deployment d = greedy_worst_point_proposer(task, {});
    REQUIRE(d.aps.size() == 1);
    CHECK(d.aps[0].x == Catch::Approx(10.0).margin(1e-9));
    CHECK(d.aps[0].y == Catch::Approx(5.0).margin(1e-9));
}

TEST_CASE("greedy adds an AP at the trouble spot once moves stall") {
    PlanningTask task;
    task.plan = empty_plan(20, 10);
    task.max_aps = 2;

    auto make_step = [&](double coverage, Point2D worst) {
        Step s;
        s.deployment = {{{10, 5}}, task.radio};
        s.feedback.iteration = 1;
        s.feedback.stats.coverage_fraction = coverage;
        s.feedback.stats.total_cells = 100;
        s.feedback.stats.covered_cells = static_cast<std::size_t>(coverage * 100);
        s.feedback.stats.worst_cell = worst;
        s.feedback.grid_summary = {{worst, 95.0}};
        return s;
    };

    SECTION("stalled move with budget remaining adds at the worst centroid") {
        const std::vector<Step> history = {make_step(0.60, {19.5, 9.5}),
                                           make_step(0.602, {19.5, 9.5})};
        const Deployment d = greedy_worst_point_proposer(task, history);
        REQUIRE(d.aps.size() == 2);
        CHECK(d.aps[0].x == 10.0);
        CHECK(d.aps[1].x == Catch::Approx(19.5).margin(1e-9));
        CHECK(d.aps[1].y == Catch::Approx(9.5).margin(1e-9));
    }
    SECTION("a paying move keeps moving instead of adding") {
        const std::vector<Step> history = {make_step(0.60, {19.5, 9.5}),
                                           make_step(0.70, {19.5, 9.5})};
        const Deployment d = greedy_worst_point_proposer(task, history);
        REQUIRE(d.aps.size() == 1);
        CHECK(d.aps[0].x == Catch::Approx(14.75).margin(1e-9));
        CHECK(d.aps[0].y == Catch::Approx(7.25).margin(1e-9));
    }
    SECTION("exhausted budget always moves") {
        task.max_aps = 1;
        const std::vector<Step> history = {make_step(0.60, {19.5, 9.5}),
                                           make_step(0.601, {19.5, 9.5})};
        const Deployment d = greedy_worst_point_proposer(task, history);
        REQUIRE(d.aps.size() == 1);
        CHECK(d.aps[0].x == Catch::Approx(14.75).margin(1e-9));
    }
}

TEST_CASE("a greedy run's best coverage never decreases") {
    PlanningTask task;
    task.plan = empty_plan(20, 10);
    task.coverage_target = 0.99;
    task.threshold_db = 60.0;
    task.max_aps = 3;
    task.max_iterations = 20;
    task.cell_size = 0.5;

    const auto trace = optimize_loop(task, greedy_worst_point_proposer);
    REQUIRE_FALSE(trace.steps.empty());
    double best = 0.0;
    for (const Step& s : trace.steps) {
        const double c = s.feedback.valid() ? s.feedback.stats.coverage_fraction : 0.0;
        best = std::max(best, c);
    }
    CHECK(trace.best().feedback.stats.coverage_fraction == best);
}

// ============================================================================
// Placement lattice
// ============================================================================

TEST_CASE("the lattice covers the boundary at cell centers, walls excluded") {
    FloorPlan plan = empty_plan(20, 10);
    const auto open = placement_lattice(plan, 1.0);
    CHECK(open.size() == 200);
    CHECK(open.front().x == Catch::Approx(0.5));
    CHECK(open.front().y == Catch::Approx(0.5));
    CHECK(open.back().x == Catch::Approx(19.5));
    CHECK(open.back().y == Catch::Approx(9.5));
    CHECK(std::is_sorted(open.begin(), open.end(), lex_less));

    plan.add_wall({0, 4.5}, {20, 4.5}, 0);   // runs through the y=4.5 lattice row
    const auto walled = placement_lattice(plan, 1.0);
    CHECK(walled.size() == 180);
    for (const Point2D& p : walled) CHECK(p.y != 4.5);
}

// ============================================================================
// Coverage masks agree with the grid evaluator
// ============================================================================

TEST_CASE("mask coverage equals grid coverage exactly") {
    PlanningTask task = open_room_benchmark();
    task.plan.add_wall({8, 0}, {8, 6}, 0);
    task.plan.add_wall({14, 4}, {14, 10}, 1);

    const auto lattice = placement_lattice(task.plan, 2.0);
    const CoverageMasks masks(task, lattice);

    for (std::size_t i = 0; i + 7 < lattice.size(); i += 7) {
        const std::vector<std::size_t> pick = {i, i + 3, i + 7};
        Deployment d;
        d.config = task.radio;
        for (std::size_t c : pick) d.aps.push_back(lattice[c]);
        const CoverageStats stats =
            coverage_fraction(compute_grid(task.plan, d, task.cell_size), task.threshold_db);
        CHECK(masks.coverage(pick) == stats.coverage_fraction);
    }
}

// ============================================================================
// Brute-force oracle
// ============================================================================

TEST_CASE("oracle with a single candidate returns it") {
    PlanningTask task;
    task.plan = empty_plan(1, 1);
    task.threshold_db = 110.0;
    task.cell_size = 0.5;
    const Deployment d = brute_force_oracle(task, 1.0, 1);
    REQUIRE(d.aps.size() == 1);
    CHECK(d.aps[0].x == 0.5);
    CHECK(d.aps[0].y == 0.5);
}

TEST_CASE("oracle picks the center of a square room under a tight budget") {
    PlanningTask task;
    task.plan = empty_plan(5, 5);
    task.threshold_db = 48.0;   // ~2.5 m radius: only the center covers well
    task.cell_size = 0.5;
    const Deployment d = brute_force_oracle(task, 1.0, 1);
    REQUIRE(d.aps.size() == 1);
    CHECK(d.aps[0].x == 2.5);
    CHECK(d.aps[0].y == 2.5);
}

TEST_CASE("oracle ties resolve to the lexicographically smallest deployment") {
    PlanningTask task;
    task.plan = empty_plan(6, 4);
    task.threshold_db = 200.0;   // every deployment covers everything
    task.cell_size = 0.5;

    const Deployment one = brute_force_oracle(task, 1.0, 1);
    REQUIRE(one.aps.size() == 1);
    CHECK(one.aps[0].x == 0.5);
    CHECK(one.aps[0].y == 0.5);

    const Deployment two = brute_force_oracle(task, 1.0, 2);
    REQUIRE(two.aps.size() == 2);
    CHECK(two.aps[0].x == 0.5);
    CHECK(two.aps[0].y == 0.5);
    CHECK(two.aps[1].x == 0.5);
    CHECK(two.aps[1].y == 1.5);
}

TEST_CASE("oracle guards against combinatorial blowup") {
    PlanningTask task = open_room_benchmark();
    CHECK_THROWS_AS(brute_force_oracle(task, 1.0, 5), SearchSpaceTooLarge);   // C(200,5) ~ 2.5e9
    CHECK_NOTHROW(brute_force_oracle(task, 2.0, 2));                          // C(50,2) = 1225
}

// ============================================================================
// ACO
// ============================================================================

TEST_CASE("aco rejects bad parameters") {
    const PlanningTask task = open_room_benchmark();
    AcoParams params;
    SECTION("no ants") {
        params.n_ants = 0;
        CHECK_THROWS_AS(aco_optimize(task, params), InvalidParams);
    }
    SECTION("evaporation out of range") {
        params.evaporation = 1.0;
        CHECK_THROWS_AS(aco_optimize(task, params), InvalidParams);
        params.evaporation = 0.0;
        CHECK_THROWS_AS(aco_optimize(task, params), InvalidParams);
    }
}

TEST_CASE("aco with a single candidate converges immediately") {
    PlanningTask task;
    task.plan = empty_plan(1, 1);
    task.coverage_target = 0.95;
    task.threshold_db = 110.0;
    task.max_aps = 1;
    task.max_iterations = 10;
    task.cell_size = 0.5;

    const auto trace = aco_optimize(task, {});
    REQUIRE(trace.steps.size() == 1);
    CHECK(trace.outcome == Outcome::Converged);
    CHECK(trace.steps[0].deployment.aps[0].x == 0.5);
    CHECK(trace.steps[0].deployment.aps[0].y == 0.5);
}

TEST_CASE("aco per-step coverage is non-decreasing and tracks its best") {
    PlanningTask task = open_room_benchmark();
    task.max_iterations = 40;
    const auto trace = aco_optimize(task, {});
    REQUIRE(trace.steps.size() == 40);
    for (std::size_t i = 1; i < trace.steps.size(); ++i)
        CHECK(trace.steps[i].feedback.stats.coverage_fraction >=
              trace.steps[i - 1].feedback.stats.coverage_fraction);
    CHECK(trace.best().feedback.stats.coverage_fraction == running_best(trace));
}

TEST_CASE("aco reaches within one point of the oracle on the open room") {
    const PlanningTask task = open_room_benchmark();
    const Deployment best = brute_force_oracle(task, 1.0, 1);
    const double oracle =
        coverage_fraction(compute_grid(task.plan, best, task.cell_size), task.threshold_db)
            .coverage_fraction;

    AcoParams params;
    params.seed = 0;
    const auto trace = aco_optimize(task, params);
    CHECK(trace.best_coverage() >= oracle - 0.01);
    CHECK(trace.best_coverage() <= oracle);   // same lattice: cannot beat the oracle
}

TEST_CASE("aco is reproducible for a fixed seed") {
    PlanningTask task = open_room_benchmark();
    task.max_iterations = 30;
    AcoParams params;
    params.seed = 42;

    const auto a = aco_optimize(task, params);
    const auto b = aco_optimize(task, params);
    REQUIRE(a.steps.size() == b.steps.size());
    CHECK(a.task_fingerprint == b.task_fingerprint);
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        REQUIRE(a.steps[i].deployment.aps.size() == b.steps[i].deployment.aps.size());
        for (std::size_t j = 0; j < a.steps[i].deployment.aps.size(); ++j) {
            CHECK(a.steps[i].deployment.aps[j].x == b.steps[i].deployment.aps[j].x);
            CHECK(a.steps[i].deployment.aps[j].y == b.steps[i].deployment.aps[j].y);
        }
        CHECK(a.steps[i].feedback.stats.coverage_fraction ==
              b.steps[i].feedback.stats.coverage_fraction);
    }
}

// ============================================================================
// Simulated annealing
// ============================================================================

TEST_CASE("annealing rejects bad parameters") {
    const PlanningTask task = open_room_benchmark();
    AnnealParams params;
    SECTION("cooling out of range") {
        params.cooling = 1.0;
        CHECK_THROWS_AS(simulated_annealing_optimize(task, params), InvalidParams);
    }
    SECTION("non-positive move scale") {
        params.move_scale = 0.0;
        CHECK_THROWS_AS(simulated_annealing_optimize(task, params), InvalidParams);
    }
}

TEST_CASE("annealing at temperature zero is pure hill climbing") {
    PlanningTask task = open_room_benchmark();
    task.max_iterations = 80;
    AnnealParams params;
    params.initial_temperature = 0.0;
    params.seed = 3;

    const auto trace = simulated_annealing_optimize(task, params);
    REQUIRE(trace.steps.size() == 80);
    for (std::size_t i = 1; i < trace.steps.size(); ++i)
        CHECK(trace.steps[i].feedback.stats.coverage_fraction >=
              trace.steps[i - 1].feedback.stats.coverage_fraction);
}

TEST_CASE("annealing reaches within one point of the oracle on the open room") {
    const PlanningTask task = open_room_benchmark();
    const Deployment best = brute_force_oracle(task, 1.0, 1);
    const double oracle =
        coverage_fraction(compute_grid(task.plan, best, task.cell_size), task.threshold_db)
            .coverage_fraction;

    AnnealParams params;
    params.initial_temperature = 1.0;
    params.cooling = 0.97;
    params.move_scale = 2.0;
    params.seed = 0;
    const auto trace = simulated_annealing_optimize(task, params);
    CHECK(trace.best_coverage() >= oracle - 0.01);
}

TEST_CASE("annealing is reproducible for a fixed seed") {
    PlanningTask task = open_room_benchmark();
    task.max_iterations = 50;
    AnnealParams params;
    params.seed = 17;

    const auto a = simulated_annealing_optimize(task, params);
    const auto b = simulated_annealing_optimize(task, params);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        for (std::size_t j = 0; j < a.steps[i].deployment.aps.size(); ++j) {
            CHECK(a.steps[i].deployment.aps[j].x == b.steps[i].deployment.aps[j].x);
            CHECK(a.steps[i].deployment.aps[j].y == b.steps[i].deployment.aps[j].y);
        }
        CHECK(a.steps[i].feedback.stats.coverage_fraction ==
              b.steps[i].feedback.stats.coverage_fraction);
    }
}

// ============================================================================
// Cross-optimizer agreement
// ============================================================================

TEST_CASE("greedy also lands within a point of the oracle on the open room") {
    PlanningTask task = open_room_benchmark();
    task.max_iterations = 30;
    const Deployment best = brute_force_oracle(task, 1.0, 1);
    const double oracle =
        coverage_fraction(compute_grid(task.plan, best, task.cell_size), task.threshold_db)
            .coverage_fraction;

    const auto trace = optimize_loop(task, greedy_worst_point_proposer);
    CHECK(running_best(trace) >= oracle - 0.01);
}

TEST_CASE("fingerprints distinguish tasks and match for equal tasks") {
    const PlanningTask a = open_room_benchmark();
    PlanningTask b = open_room_benchmark();
    CHECK(task_fingerprint(a) == task_fingerprint(b));

    b.threshold_db = 61.0;
    CHECK(task_fingerprint(a) != task_fingerprint(b));

    PlanningTask c = open_room_benchmark();
    c.plan.add_wall({3, 3}, {7, 7}, 0);
    CHECK(task_fingerprint(a) != task_fingerprint(c));
}
