// End-to-end acceptance suite for the shipped guarantees. Each check prints
// exactly one [PASS]/[FAIL] line with its wall time; the binary exits with
// the number of failed checks. Unlike the unit suites, these checks run the
// full pipelines and enforce wall-clock budgets.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "iplan/experiments.hpp"
#include "iplan/metaheuristics.hpp"
#include "iplan/serialize.hpp"

namespace fs = std::filesystem;
using namespace iplan;
using Clock = std::chrono::steady_clock;

namespace {

// ============================================================================
// Shared fixtures and helpers
// ============================================================================

FloorPlan open_floor(double width, double depth) {
    FloorPlan plan;
    plan.boundary = {{0.0, 0.0}, width, depth};
    plan.materials = default_materials();
    return plan;
}

// Brick shell with a south door and no interior walls.
FloorPlan empty_room(double width, double depth) {
    FloorPlan plan;
    plan.boundary = {{0.0, 0.0}, width, depth};
    const std::size_t brick = plan.add_material("brick", 8.0);
    const std::size_t wood = plan.add_material("wood", 3.0);
    plan.walls.push_back({{0.0, 0.0}, {width, 0.0}, brick});
    plan.walls.push_back({{width, 0.0}, {width, depth}, brick});
    plan.walls.push_back({{width, depth}, {0.0, depth}, brick});
    plan.walls.push_back({{0.0, depth}, {0.0, 0.0}, brick});
    plan.openings.push_back({0, width / 2.0 - 0.5, 1.0, OpeningKind::Door, wood});
    return plan;
}

PlanningTask empty_room_task() {
    PlanningTask task;
    task.plan = empty_room(20.0, 10.0);
    task.coverage_target = 1.0;   // unreachable, so every optimizer uses its full budget
    task.threshold_db = 75.0;
    task.max_aps = 1;
    task.max_iterations = 200;
    task.cell_size = 0.25;
    task.radio = obstructed_radio();
    return task;
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "iplan_acceptance";
    fs::create_directories(dir);
    return dir;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

// Runs the packaged binary from the repository root so relative fixture
// paths in the command line resolve.
CommandResult run_cli(const std::string& args) {
    const std::string cmd = std::string("cd ") + IPLAN_SOURCE_DIR + " && " + IPLAN_CLI_PATH +
                            " " + args + " 2>&1";
    CommandResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return result;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

// In-process chat endpoint with a scriptable handler (same shape as the unit
// suite's mock, duplicated here so this binary stays self-contained).
class MockServer {
  public:
    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    explicit MockServer(Handler handler) : handler_(std::move(handler)) {
        server_.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         ++calls_;
                         handler_(req, res);
                     });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockServer() {
        server_.stop();
        thread_.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
    int calls() const { return calls_.load(); }

  private:
    httplib::Server server_;
    Handler handler_;
    int port_ = 0;
    std::thread thread_;
    std::atomic<int> calls_{0};
};

std::string chat_reply(const std::string& content) {
    return nlohmann::json{{"choices", {{{"message", {{"content", content}}}}}}}.dump();
}

// ============================================================================
// 1. Pathloss matches the closed form; walls add exact attenuation
// ============================================================================

bool check_pathloss_exactness(std::string& note) {
    const FloorPlan open = open_floor(40.0, 30.0);
    RadioConfig radio;
    radio.pathloss_exponent = 3.5;

    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> ux(0.0, 40.0), uy(0.0, 30.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Point2D tx{ux(rng), uy(rng)}, rx{ux(rng), uy(rng)};
        const double d = distance(tx, rx);
        const double closed =
            radio.reference_pathloss_db +
            10.0 * radio.pathloss_exponent *
                std::log10(std::max(d, radio.reference_distance_m) / radio.reference_distance_m);
        worst = std::max(worst, std::abs(pathloss(tx, rx, open, radio) - closed));
    }
    if (worst > 1e-9) {
        note = "zero-wall deviation " + fmt("%.3g", worst) + " dB exceeds 1e-9";
        return false;
    }

    // One then two partitions between a fixed pair: each crossing must add
    // exactly its material attenuation.
    const Point2D tx{2.0, 15.0}, rx{14.0, 15.0};
    for (const Material& material : default_materials()) {
        FloorPlan plan = open_floor(40.0, 30.0);
        const double base = pathloss(tx, rx, plan, radio);
        const std::size_t m = plan.add_material(material.name, material.attenuation_db);
        plan.walls.push_back({{6.0, 0.0}, {6.0, 30.0}, m});
        const double one = pathloss(tx, rx, plan, radio);
        plan.walls.push_back({{8.0, 0.0}, {8.0, 30.0}, m});
        const double two = pathloss(tx, rx, plan, radio);
        if (std::abs(one - base - material.attenuation_db) > 1e-9 ||
            std::abs(two - base - 2.0 * material.attenuation_db) > 1e-9) {
            note = material.name + " crossing is not additive";
            return false;
        }
    }
    note = "10000 pairs, max deviation " + fmt("%.2g", worst) + " dB; 5 materials additive";
    return true;
}

// ============================================================================
// 2. Greedy, ACO, and annealing all match the exhaustive oracle
// ============================================================================

bool check_optimizers_match_oracle(std::string& note) {
    const PlanningTask task = empty_room_task();

    const Deployment oracle = brute_force_oracle(task, 1.0, 1);
    const double oracle_cov =
        coverage_fraction(compute_grid(task.plan, oracle, task.cell_size), task.threshold_db)
            .coverage_fraction;

    const double greedy = optimize_loop(task, greedy_worst_point_proposer).best_coverage();

    AcoParams aco;
    aco.seed = 0;
    const double colony = aco_optimize(task, aco).best_coverage();

    AnnealParams sa;
    sa.seed = 0;
    const double anneal = simulated_annealing_optimize(task, sa).best_coverage();

    note = "oracle " + fmt("%.4f", oracle_cov) + ", greedy " + fmt("%.4f", greedy) +
           ", aco " + fmt("%.4f", colony) + ", anneal " + fmt("%.4f", anneal);
    const double floor = oracle_cov - 0.01;   // within one coverage point
    return greedy >= floor && colony >= floor && anneal >= floor;
}

// ============================================================================
// 3. Randomized monotonicity properties
// ============================================================================

// A studio with up to two random partitions that stay clear of the given
// deployment positions.
FloorPlan random_plan(std::mt19937_64& rng, int partitions) {
    FloorPlan plan = empty_room(20.0, 10.0);
    std::uniform_real_distribution<double> upos(3.0, 17.0);
    const std::size_t drywall = plan.add_material("drywall", 3.0);
    for (int i = 0; i < partitions; ++i) {
        const double x = upos(rng);
        plan.walls.push_back({{x, 0.0}, {x, 10.0}, drywall});
    }
    return plan;
}

Deployment clear_deployment(std::mt19937_64& rng, const FloorPlan& plan, std::size_t count) {
    std::uniform_real_distribution<double> ux(0.5, 19.5), uy(0.5, 9.5);
    Deployment dep;
    dep.config = obstructed_radio();
    while (dep.aps.size() < count) {
        const Point2D p{ux(rng), uy(rng)};
        Deployment probe = dep;
        probe.aps.push_back(p);
        if (!deployment_violation(plan, probe)) dep.aps.push_back(p);
    }
    return dep;
}

bool check_monotonicity(std::string& note) {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> uthr(60.0, 90.0), ustep(1.0, 15.0);
    int cases = 0;

    // Coverage never drops when the threshold is relaxed.
    for (int i = 0; i < 70; ++i, ++cases) {
        const FloorPlan plan = random_plan(rng, i % 3);
        const Deployment dep = clear_deployment(rng, plan, 1 + i % 3);
        const CoverageGrid grid = compute_grid(plan, dep, 0.5);
        const double lo = uthr(rng), hi = lo + ustep(rng);
        if (coverage_fraction(grid, lo).coverage_fraction >
            coverage_fraction(grid, hi).coverage_fraction + 1e-12) {
            note = "coverage dropped when threshold relaxed (case " + std::to_string(i) + ")";
            return false;
        }
    }

    // Coverage never drops when an AP is added to an existing deployment.
    for (int i = 0; i < 70; ++i, ++cases) {
        const FloorPlan plan = random_plan(rng, i % 3);
        const Deployment dep = clear_deployment(rng, plan, 1 + i % 2);
        const double threshold = uthr(rng);
        const double before =
            coverage_fraction(compute_grid(plan, dep, 0.5), threshold).coverage_fraction;
        std::uniform_real_distribution<double> ux(0.5, 19.5), uy(0.5, 9.5);
        Deployment grown = dep;
        while (grown.aps.size() == dep.aps.size()) {
            grown.aps.push_back({ux(rng), uy(rng)});
            if (deployment_violation(plan, grown)) grown.aps.pop_back();
        }
        const double after =
            coverage_fraction(compute_grid(plan, grown, 0.5), threshold).coverage_fraction;
        if (before > after + 1e-12) {
            note = "coverage dropped when an AP was added (case " + std::to_string(i) + ")";
            return false;
        }
    }

    // Adding a wall never lowers any cell's pathloss.
    for (int i = 0; i < 40; ++i, ++cases) {
        FloorPlan plan = random_plan(rng, 0);
        std::uniform_real_distribution<double> upos(3.0, 17.0);
        const double wx = upos(rng);
        Deployment dep;
        dep.config = obstructed_radio();
        std::uniform_real_distribution<double> ux(0.5, 19.5), uy(0.5, 9.5);
        while (dep.aps.size() < 2) {
            const Point2D p{ux(rng), uy(rng)};
            if (std::abs(p.x - wx) < 0.4) continue;
            Deployment probe = dep;
            probe.aps.push_back(p);
            if (!deployment_violation(plan, probe)) dep.aps.push_back(p);
        }
        const CoverageGrid before = compute_grid(plan, dep, 0.5);
        const std::size_t concrete = plan.add_material("concrete", 12.0);
        plan.walls.push_back({{wx, 0.0}, {wx, 10.0}, concrete});
        const CoverageGrid after = compute_grid(plan, dep, 0.5);
        for (std::size_t c = 0; c < before.values.size(); ++c) {
            if (after.values[c] < before.values[c] - 1e-12) {
                note = "a wall lowered a cell's pathloss (case " + std::to_string(i) + ")";
                return false;
            }
        }
    }

    // A trace's running best coverage never decreases.
    for (int i = 0; i < 30; ++i, ++cases) {
        PlanningTask task = empty_room_task();
        task.max_iterations = 12;
        task.threshold_db = 70.0 + i;
        AcoParams aco;
        aco.seed = static_cast<std::uint64_t>(i);
        const OptimizationTrace trace = aco_optimize(task, aco);
        double best = 0.0;
        for (const Step& step : trace.steps) {
            const double cov = step.feedback.valid() ? step.feedback.stats.coverage_fraction : 0.0;
            if (cov > best) best = cov;
        }
        if (std::abs(best - trace.best_coverage()) > 1e-15) {
            note = "trace best does not match its running maximum (case " + std::to_string(i) +
                   ")";
            return false;
        }
    }

    note = std::to_string(cases) + " randomized cases across four properties";
    return true;
}

// ============================================================================
// 4. Perception-informed greedy beats the uninformed colony on the gallery
// ============================================================================

bool check_greedy_vs_colony(std::string& note) {
    const GreedyVsAcoReport r = run_greedy_vs_aco_benchmark();
    note = "greedy " + std::to_string(r.greedy_iterations) + " its at " +
           fmt("%.4f", r.greedy_coverage) + "; colony " +
           (r.aco_first_reach ? "first hit at " + std::to_string(*r.aco_first_reach)
                              : std::string("never reached target")) +
           " in " + std::to_string(r.aco_budget) + " (best " + fmt("%.4f", r.aco_best_coverage) +
           ")";
    return r.passed();
}

// ============================================================================
// 5. The joint pipeline beats the fixed baseline layout on AP count
// ============================================================================

bool check_joint_beats_baseline(std::string& note) {
    const JointVsBaselineReport r = run_joint_vs_baseline_benchmark();
    std::string by_k;
    for (double cov : r.baseline_coverage_by_k) by_k += " " + fmt("%.4f", cov);
    note = "pipeline " + fmt("%.4f", r.pipeline_coverage) + " with " +
           std::to_string(r.pipeline_aps) + " APs; baseline needs " +
           std::to_string(r.baseline_aps) + " (by count:" + by_k + ")";
    return r.passed();
}

// ============================================================================
// 6. Efficiency arithmetic: coverage per access point
// ============================================================================

bool check_efficiency_arithmetic(std::string& note) {
    const JointDesignTask task;
    const FloorPlan plan = reference_office_plan();

    OptimizationTrace trace;
    Step step;
    step.deployment.aps = {{3.5, 4.5}, {16.5, 4.5}};
    step.feedback.iteration = 1;
    step.feedback.stats.coverage_fraction = 0.954;
    trace.steps.push_back(step);

    const JointScore score = score_candidate(plan, trace, task);
    if (score.ap_count != 2) {
        note = "expected 2 APs, scored " + std::to_string(score.ap_count);
        return false;
    }
    if (std::abs(score.iwn_efficiency - 0.477) > 1e-12 ||
        score.iwn_efficiency != score.coverage / 2.0) {
        note = "0.954 over 2 APs gave " + fmt("%.6f", score.iwn_efficiency);
        return false;
    }
    if (std::abs(score.overall -
                 (task.w_coverage * 0.954 + task.w_rationality * score.rationality)) > 1e-12) {
        note = "weighted overall drifted from its formula";
        return false;
    }
    note = "0.954 coverage / 2 APs = " + fmt("%.3f", score.iwn_efficiency) + ", rationality " +
           fmt("%.2f", score.rationality);
    return true;
}

// ============================================================================
// 7. Byte-level determinism of traces, heatmaps, and evaluate output
// ============================================================================

bool check_determinism(std::string& note) {
    const fs::path dir = scratch_dir();
    PlanningTask task = empty_room_task();
    task.max_iterations = 40;

    const auto trace_bytes = [&](const OptimizationTrace& trace, const char* name) {
        const fs::path p = dir / name;
        save_trace_jsonl(trace, p.string());
        return read_bytes(p);
    };
    const auto heatmap_bytes = [&](const OptimizationTrace& trace, const char* name) {
        const fs::path p = dir / name;
        const CoverageGrid grid =
            compute_grid(task.plan, trace.best().deployment, task.cell_size);
        export_heatmap(grid, task.threshold_db, p.string());
        return read_bytes(p);
    };

    AcoParams aco;
    aco.seed = 3;
    AnnealParams sa;
    sa.seed = 3;
    const std::vector<std::pair<std::string, std::function<OptimizationTrace()>>> runs = {
        {"greedy", [&] { return optimize_loop(task, greedy_worst_point_proposer); }},
        {"aco", [&] { return aco_optimize(task, aco); }},
        {"anneal", [&] { return simulated_annealing_optimize(task, sa); }},
    };
    for (const auto& [name, run] : runs) {
        const OptimizationTrace a = run(), b = run();
        if (trace_bytes(a, "a.jsonl") != trace_bytes(b, "b.jsonl")) {
            note = name + " traces differ between runs";
            return false;
        }
        if (heatmap_bytes(a, "a.ppm") != heatmap_bytes(b, "b.ppm")) {
            note = name + " heatmaps differ between runs";
            return false;
        }
    }

    const std::string eval_args =
        "evaluate --plan data/plans/office.json --deployment data/deployments/office_two_ap.json"
        " --threshold 78 --heatmap " +
        (dir / "eval.ppm").string();
    const CommandResult first = run_cli(eval_args);
    const std::string first_map = read_bytes(dir / "eval.ppm");
    const CommandResult second = run_cli(eval_args);
    const std::string second_map = read_bytes(dir / "eval.ppm");
    if (first.exit_code != 0 || second.exit_code != 0) {
        note = "evaluate exited " + std::to_string(first.exit_code) + "/" +
               std::to_string(second.exit_code);
        return false;
    }
    if (first.output != second.output || first_map != second_map) {
        note = "evaluate output or heatmap differs between runs";
        return false;
    }
    note = "3 optimizers and evaluate byte-stable across reruns";
    return true;
}

// ============================================================================
// 8. Chat-endpoint loop against a local mock
// ============================================================================

bool check_llm_loop(std::string& note) {
    PlanningTask task;
    task.plan = empty_room(20.0, 10.0);
    task.coverage_target = 0.95;
    task.threshold_db = 80.0;
    task.max_aps = 1;
    task.max_iterations = 5;
    task.cell_size = 0.5;
    task.radio = obstructed_radio();

    LlmEndpointConfig endpoint;
    endpoint.model = "mock-model";
    endpoint.api_key_env = "IPLAN_ACCEPTANCE_KEY";
    endpoint.timeout_seconds = 2.0;
    endpoint.max_retries = 2;
    endpoint.backoff_base_seconds = 0.01;
    setenv("IPLAN_ACCEPTANCE_KEY", "sk-acceptance-demo-key", 1);

    // A valid proposal converges, and nothing that crosses the wire or lands
    // in the trace contains the key value.
    {
        std::string seen_auth;
        MockServer server([&](const httplib::Request& req, httplib::Response& res) {
            seen_auth = req.get_header_value("Authorization");
            res.set_content(chat_reply(R"({"aps":[{"x":10,"y":5}]})"), "application/json");
        });
        LlmProposerOptions options;
        options.endpoint = endpoint;
        options.endpoint.base_url = server.base_url();
        options.knowledge = "keep units near the room center";
        std::string exchanges;
        options.on_exchange = [&](const PromptBundle& bundle, const std::string& reply) {
            exchanges += bundle.system_preamble + bundle.description + bundle.knowledge +
                         bundle.perception + reply;
        };
        const OptimizationTrace trace = optimize_loop(task, make_llm_proposer(options));
        if (trace.outcome != Outcome::Converged || server.calls() != 1) {
            note = "valid mock proposal did not converge in one exchange";
            return false;
        }
        if (seen_auth != "Bearer sk-acceptance-demo-key") {
            note = "authorization header did not carry the key";
            return false;
        }
        if (exchanges.find("sk-acceptance-demo-key") != std::string::npos) {
            note = "key value leaked into a prompt or reply";
            return false;
        }
        const fs::path p = scratch_dir() / "llm_trace.jsonl";
        save_trace_jsonl(trace, p.string());
        if (read_bytes(p).find("sk-acceptance-demo-key") != std::string::npos) {
            note = "key value leaked into the trace";
            return false;
        }
    }

    // Two 5xx replies burn two retries; the third attempt succeeds.
    {
        std::atomic<int> hits{0};
        MockServer server([&](const httplib::Request&, httplib::Response& res) {
            if (++hits <= 2) {
                res.status = 500;
                res.set_content("boom", "text/plain");
            } else {
                res.set_content(chat_reply(R"({"aps":[{"x":10,"y":5}]})"), "application/json");
            }
        });
        LlmProposerOptions options;
        options.endpoint = endpoint;
        options.endpoint.base_url = server.base_url();
        const OptimizationTrace trace = optimize_loop(task, make_llm_proposer(options));
        if (trace.outcome != Outcome::Converged || server.calls() != 3) {
            note = "retry policy made " + std::to_string(server.calls()) +
                   " calls (expected 3)";
            return false;
        }
    }

    // Nothing listening: the proposer surfaces an unreachable-endpoint error
    // after its attempt budget, flagged as a network failure.
    {
        LlmProposerOptions options;
        options.endpoint = endpoint;
        options.endpoint.base_url = "http://127.0.0.1:9/v1";
        options.endpoint.max_retries = 1;
        const Proposer proposer = make_llm_proposer(options);
        bool surfaced = false;
        try {
            proposer(task, {});
        } catch (const EndpointUnreachable& e) {
            surfaced = e.network_error;
        }
        if (!surfaced) {
            note = "unreachable endpoint was not surfaced as a network failure";
            return false;
        }
    }

    note = "converges on valid reply, retries 5xx per policy, flags unreachable endpoint";
    return true;
}

struct AcceptanceCheck {
    const char* name;
    double budget_seconds;
    std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
    const std::vector<AcceptanceCheck> checks = {
        {"pathloss matches closed form; walls additive", 1.0, check_pathloss_exactness},
        {"optimizers within 1 pt of exhaustive oracle", 30.0, check_optimizers_match_oracle},
        {"randomized monotonicity properties", 60.0, check_monotonicity},
        {"informed greedy converges 10x faster than colony", 300.0, check_greedy_vs_colony},
        {"joint pipeline needs fewer APs than fixed baseline", 600.0, check_joint_beats_baseline},
        {"efficiency and overall score arithmetic", 5.0, check_efficiency_arithmetic},
        {"byte-identical traces, heatmaps, evaluate output", 60.0, check_determinism},
        {"chat-endpoint loop: converge, retry, surface failure", 30.0, check_llm_loop},
    };

    int failures = 0;
    for (const AcceptanceCheck& check : checks) {
        std::string note;
        const auto start = Clock::now();
        bool ok = false;
        try {
            ok = check.run(note);
        } catch (const std::exception& e) {
            note = std::string("threw: ") + e.what();
        }
        const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        if (elapsed > check.budget_seconds) {
            ok = false;
            note += (note.empty() ? "" : "; ") + std::string("over ") +
                    fmt("%.0f", check.budget_seconds) + " s budget";
        }
        std::printf("[%s] %s (%.1fs) — %s\n", ok ? "PASS" : "FAIL", check.name, elapsed,
                    note.c_str());
        std::fflush(stdout);
        failures += ok ? 0 : 1;
    }
    std::printf("%zu checks, %d failed\n", checks.size(), failures);
    return failures;
}
