// iplan — command-line front end for the indoor wireless planning toolkit.
//
//   validate      check a floor plan file against the plan rules
//   evaluate      coverage statistics (and heatmap) for a given deployment
//   optimize      run an AP placement optimizer, persisting the full run
//   joint-design  run the multi-agent layout + placement pipeline
//   reproduce     re-run the two packaged benchmark studies
//
// Exit codes: 0 success (optimizers: converged), 1 domain failure (invalid
// plan or deployment, infeasible design, benchmark miss), 2 malformed input
// or configuration, 3 budget exhausted before the coverage target, 4 network
// failure talking to a chat endpoint (the partial trace is still persisted).

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "iplan/experiments.hpp"
#include "iplan/serialize.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitExhausted = 3;
constexpr int kExitNetwork = 4;

int fail_input(const std::string& why) {
    std::fprintf(stderr, "error: %s\n", why.c_str());
    return kExitBadInput;
}

int fail_domain(const std::string& why) {
    std::fprintf(stderr, "error: %s\n", why.c_str());
    return kExitDomain;
}

const char* pf(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw iplan::IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw iplan::IoError("cannot write " + path.string());
    out << text;
}

// Wall-clock run id; pass a fixed --run-id to keep reruns byte-comparable.
std::string default_run_id(std::uint64_t seed) {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
    return std::string(stamp) + "-s" + std::to_string(seed);
}

// One line, machine-splittable: outcome, iterations, best coverage, AP count.
std::string summary_line(const iplan::OptimizationTrace& trace) {
    const std::size_t aps = trace.steps.empty() ? 0 : trace.best().deployment.aps.size();
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s %zu %.6f %zu", iplan::to_string(trace.outcome),
                  trace.steps.size(), trace.best_coverage(), aps);
    return buf;
}

// trace.jsonl + plan.json + summary.txt + (when a scored best step exists)
// heatmap.ppm under one run directory. Also used for partial traces, so a
// failed run still leaves its evidence on disk.
void persist_run(const fs::path& dir, const iplan::PlanningTask& task,
                 const iplan::OptimizationTrace& trace) {
    fs::create_directories(dir);
    iplan::save_trace_jsonl(trace, (dir / "trace.jsonl").string());
    iplan::save_plan(task.plan, (dir / "plan.json").string());
    write_text_file(dir / "summary.txt", summary_line(trace) + "\n");
    if (!trace.steps.empty() && trace.best().feedback.valid()) {
        const iplan::CoverageGrid grid =
            iplan::compute_grid(task.plan, trace.best().deployment, task.cell_size);
        iplan::export_heatmap(grid, task.threshold_db, (dir / "heatmap.ppm").string());
    }
}

// Radio overrides shared by evaluate / optimize / joint-design.
struct RadioFlags {
    std::optional<double> exponent, ref_loss, ref_dist, frequency;

    void attach(CLI::App& cmd) {
        cmd.add_option("--exponent", exponent, "pathloss exponent");
        cmd.add_option("--ref-loss", ref_loss, "pathloss at the reference distance [dB]");
        cmd.add_option("--ref-dist", ref_dist, "reference distance [m]");
        cmd.add_option("--frequency", frequency, "carrier frequency [MHz]");
    }

    void apply(iplan::RadioConfig& radio) const {
        if (exponent) radio.pathloss_exponent = *exponent;
        if (ref_loss) radio.reference_pathloss_db = *ref_loss;
        if (ref_dist) radio.reference_distance_m = *ref_dist;
        if (frequency) radio.frequency_mhz = *frequency;
    }
};

// ============================================================================
// validate
// ============================================================================

int cmd_validate(const std::string& plan_path, bool structural_only) {
    const iplan::FloorPlan plan = iplan::load_plan(plan_path);
    const std::vector<iplan::PlanViolation> report =
        structural_only ? iplan::validate_plan(plan)
                        : iplan::validate_plan(plan, iplan::ArchitecturalRules{});
    if (report.empty()) {
        std::printf("ok: %zu walls, %zu openings, %zu rooms\n", plan.walls.size(),
                    plan.openings.size(), plan.rooms.size());
        return kExitOk;
    }
    for (const iplan::PlanViolation& v : report) {
        if (v.where.empty())
            std::printf("%s: %s\n", iplan::to_string(v.code), v.detail.c_str());
        else
            std::printf("%s at %s: %s\n", iplan::to_string(v.code), v.where.c_str(),
                        v.detail.c_str());
    }
    return kExitDomain;
}

// ============================================================================
// evaluate
// ============================================================================

struct EvaluateArgs {
    std::string plan_path, deployment_path, heatmap_path;
    std::vector<std::string> inline_aps;
    double threshold_db = 80.0;
    double cell_size = 0.25;
    RadioFlags radio;
};

int cmd_evaluate(const EvaluateArgs& args) {
    const iplan::FloorPlan plan = iplan::load_plan(args.plan_path);

    if (!args.deployment_path.empty() && !args.inline_aps.empty())
        return fail_input("--deployment and --ap are mutually exclusive");
    if (args.deployment_path.empty() && args.inline_aps.empty())
        return fail_input("a deployment is required (--deployment FILE or --ap x,y)");

    iplan::Deployment deployment;
    if (!args.deployment_path.empty()) {
        deployment = iplan::load_deployment(args.deployment_path);
    } else {
        for (const std::string& text : args.inline_aps) {
            double x = 0.0, y = 0.0;
            if (std::sscanf(text.c_str(), "%lf , %lf", &x, &y) != 2)
                return fail_input("--ap expects \"x,y\", got \"" + text + "\"");
            deployment.aps.push_back({x, y});
        }
    }
    args.radio.apply(deployment.config);

    if (const auto why = iplan::deployment_violation(plan, deployment))
        return fail_domain("invalid deployment: " + *why);

    const iplan::CoverageGrid grid = iplan::compute_grid(plan, deployment, args.cell_size);
    const iplan::CoverageStats stats = iplan::coverage_fraction(grid, args.threshold_db);

    std::printf("coverage %.6f\n", stats.coverage_fraction);
    std::printf("covered_cells %zu\n", stats.covered_cells);
    std::printf("total_cells %zu\n", stats.total_cells);
    std::printf("worst_cell %.3f %.3f\n", stats.worst_cell.x, stats.worst_cell.y);
    std::printf("worst_pathloss_db %.3f\n", stats.worst_pathloss_db);

    if (!args.heatmap_path.empty())
        iplan::export_heatmap(grid, args.threshold_db, args.heatmap_path);
    return kExitOk;
}

// ============================================================================
// optimize
// ============================================================================

struct OptimizeArgs {
    std::string config_path, plan_path, optimizer_name, out_dir, run_id, knowledge_path;
    std::string base_url, model;
    std::optional<double> target, threshold_db, cell_size;
    std::optional<std::size_t> max_aps, max_iterations;
    std::optional<std::uint64_t> seed;
    RadioFlags radio;
};

int cmd_optimize(const OptimizeArgs& args) {
    iplan::RunConfig config;
    if (!args.config_path.empty()) config = iplan::load_run_config(args.config_path);

    // Flags beat the config file.
    if (!args.plan_path.empty()) config.plan_path = args.plan_path;
    if (!args.optimizer_name.empty()) {
        const auto kind = iplan::optimizer_kind_from(args.optimizer_name);
        if (!kind) return fail_input("unknown optimizer \"" + args.optimizer_name + "\"");
        config.optimizer = *kind;
    }
    if (!args.out_dir.empty()) config.output_dir = args.out_dir;
    if (!args.run_id.empty()) config.run_id = args.run_id;
    if (!args.knowledge_path.empty()) config.knowledge_path = args.knowledge_path;
    if (!args.base_url.empty()) config.llm.base_url = args.base_url;
    if (!args.model.empty()) config.llm.model = args.model;
    if (args.seed) {
        config.seed = *args.seed;
        config.aco.seed = *args.seed;
        config.anneal.seed = *args.seed;
    }
    if (args.target) config.task.coverage_target = *args.target;
    if (args.threshold_db) config.task.threshold_db = *args.threshold_db;
    if (args.cell_size) config.task.cell_size = *args.cell_size;
    if (args.max_aps) config.task.max_aps = *args.max_aps;
    if (args.max_iterations) config.task.max_iterations = *args.max_iterations;
    args.radio.apply(config.task.radio);

    if (config.plan_path.empty())
        return fail_input("a floor plan is required (--plan or the config's \"plan\")");

    iplan::PlanningTask task = config.task;
    task.plan = iplan::load_plan(config.plan_path);
    if (const auto why = iplan::task_violation(task)) return fail_input(*why);

    const std::string run_id =
        !config.run_id.empty() ? config.run_id : default_run_id(config.seed);
    const fs::path run_dir = fs::path(config.output_dir) / run_id;

    iplan::OptimizationTrace trace;
    try {
        switch (config.optimizer) {
            case iplan::OptimizerKind::Greedy:
                trace = iplan::optimize_loop(task, iplan::greedy_worst_point_proposer);
                break;
            case iplan::OptimizerKind::Aco:
                trace = iplan::aco_optimize(task, config.aco);
                break;
            case iplan::OptimizerKind::Anneal:
                trace = iplan::simulated_annealing_optimize(task, config.anneal);
                break;
            case iplan::OptimizerKind::Scripted:
                trace = iplan::optimize_loop(task, iplan::scripted_proposer(config.script));
                break;
            case iplan::OptimizerKind::Llm: {
                iplan::LlmProposerOptions options;
                options.endpoint = config.llm;
                if (!config.knowledge_path.empty())
                    options.knowledge = read_text_file(config.knowledge_path);
                trace = iplan::optimize_loop(task, iplan::make_llm_proposer(std::move(options)));
                break;
            }
        }
    } catch (const iplan::ProposerFailure& failure) {
        persist_run(run_dir, task, failure.partial_trace);
        std::fprintf(stderr, "error: %s\n", failure.what());
        std::fprintf(stderr, "partial trace: %s\n", (run_dir / "trace.jsonl").string().c_str());
        return failure.network_error ? kExitNetwork : kExitDomain;
    }

    persist_run(run_dir, task, trace);
    std::printf("%s\n", summary_line(trace).c_str());
    std::printf("run: %s\n", run_dir.string().c_str());
    return trace.outcome == iplan::Outcome::Converged ? kExitOk : kExitExhausted;
}

// ============================================================================
// joint-design
// ============================================================================

struct JointArgs {
    std::string config_path, out_dir, run_id, knowledge_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> rounds, candidates, max_aps, max_iterations;
    std::optional<double> target, threshold_db;
    bool llm_layout = false;
    RadioFlags radio;
};

int cmd_joint_design(const JointArgs& args) {
    iplan::RunConfig config;
    if (!args.config_path.empty()) config = iplan::load_run_config(args.config_path);

    iplan::JointDesignTask task = config.joint;
    if (args.seed) task.seed = *args.seed;
    if (args.rounds) task.max_rounds = *args.rounds;
    if (args.candidates) task.n_candidates = *args.candidates;
    if (args.max_aps) task.max_aps = *args.max_aps;
    if (args.max_iterations) task.max_iterations = *args.max_iterations;
    if (args.target) task.coverage_target = *args.target;
    if (args.threshold_db) task.threshold_db = *args.threshold_db;
    args.radio.apply(task.radio);
    if (!(task.coverage_target > 0.0) || task.coverage_target > 1.0)
        return fail_input("coverage target must be in (0, 1]");
    if (const auto why = iplan::task_violation(task)) return fail_input(*why);

    iplan::JointBackends backends;
    const std::string knowledge_path =
        !args.knowledge_path.empty() ? args.knowledge_path : config.knowledge_path;
    if (args.llm_layout || config.optimizer == iplan::OptimizerKind::Llm) {
        backends.layout_endpoint = config.llm;
        if (!knowledge_path.empty()) backends.layout_knowledge = read_text_file(knowledge_path);
    }

    const iplan::JointDesignResult result = iplan::joint_design_pipeline(task, backends);

    const std::string run_id = !args.run_id.empty()
                                   ? args.run_id
                                   : (!config.run_id.empty() ? config.run_id
                                                             : default_run_id(task.seed));
    const fs::path run_dir =
        fs::path(!args.out_dir.empty() ? args.out_dir : config.output_dir) / run_id;
    fs::create_directories(run_dir);

    iplan::save_plan(result.best_layout.plan, (run_dir / "plan.json").string());
    iplan::save_trace_jsonl(result.best_trace, (run_dir / "trace.jsonl").string());
    if (!result.best_trace.steps.empty() && result.best_trace.best().feedback.valid()) {
        const iplan::CoverageGrid grid = iplan::compute_grid(
            result.best_layout.plan, result.best_trace.best().deployment, task.cell_size);
        iplan::export_heatmap(grid, task.threshold_db, (run_dir / "heatmap.ppm").string());
    }

    // Per-candidate audit log: one JSON object per candidate, then a round
    // trailer carrying the pick and the feedback handed to the next round.
    std::ofstream rounds_out(run_dir / "rounds.jsonl", std::ios::binary);
    if (!rounds_out) throw iplan::IoError("cannot write " + (run_dir / "rounds.jsonl").string());
    std::string report;
    for (const iplan::RoundRecord& round : result.rounds) {
        bool any_feasible = false;
        for (std::size_t c = 0; c < round.candidates.size(); ++c) {
            const iplan::CandidateRecord& cand = round.candidates[c];
            nlohmann::json line = {{"round", round.round},
                                   {"candidate", c},
                                   {"provenance", cand.layout.provenance},
                                   {"feasible", cand.feasible}};
            if (cand.feasible) {
                any_feasible = true;
                line["coverage"] = cand.score.coverage;
                line["ap_count"] = cand.score.ap_count;
                line["rationality"] = cand.score.rationality;
                line["overall"] = cand.score.overall;
            } else {
                line["failure"] = cand.failure;
            }
            rounds_out << line.dump() << "\n";
        }
        rounds_out << nlohmann::json{{"round", round.round},
                                     {"best_candidate", round.best_index},
                                     {"feedback", round.feedback}}
                          .dump()
                   << "\n";

        char buf[160];
        if (any_feasible) {
            const iplan::JointScore& s = round.candidates[round.best_index].score;
            std::snprintf(buf, sizeof buf,
                          "round %zu: overall %.4f coverage %.4f aps %zu rationality %.2f\n",
                          round.round, s.overall, s.coverage, s.ap_count, s.rationality);
        } else {
            std::snprintf(buf, sizeof buf, "round %zu: no feasible candidate\n", round.round);
        }
        report += buf;
    }
    report += summary_line(result.best_trace) + "\n";
    write_text_file(run_dir / "summary.txt", report);

    std::fputs(report.c_str(), stdout);
    std::printf("run: %s\n", run_dir.string().c_str());
    return result.best_trace.outcome == iplan::Outcome::Converged ? kExitOk : kExitExhausted;
}

// ============================================================================
// reproduce
// ============================================================================

struct ReproduceArgs {
    std::string which;
    std::optional<double> target, threshold_db;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_iterations;
};

int cmd_reproduce(const ReproduceArgs& args) {
    if (args.which == "case1") {
        iplan::PlanningTask task = iplan::complex_plan_task();
        if (args.target) task.coverage_target = *args.target;
        if (args.threshold_db) task.threshold_db = *args.threshold_db;
        if (args.max_iterations) task.max_iterations = *args.max_iterations;
        if (const auto why = iplan::task_violation(task)) return fail_input(*why);
        iplan::AcoParams params = iplan::complex_plan_aco_params();
        if (args.seed) params.seed = *args.seed;

        const iplan::GreedyVsAcoReport r = iplan::run_greedy_vs_aco_benchmark(task, params);
        std::printf("case1: informed greedy vs pheromone-only colony\n");
        std::printf("  [%s] greedy: %s in %zu iterations, coverage %.4f\n", pf(r.greedy_ok()),
                    r.greedy_converged ? "converged" : "exhausted", r.greedy_iterations,
                    r.greedy_coverage);
        if (r.aco_first_reach)
            std::printf("  [%s] colony: first reached the target at iteration %zu of %zu "
                        "(best %.4f)\n",
                        pf(r.aco_ok()), *r.aco_first_reach, r.aco_budget, r.aco_best_coverage);
        else
            std::printf("  [%s] colony: never reached the target in %zu iterations (best %.4f)\n",
                        pf(r.aco_ok()), r.aco_budget, r.aco_best_coverage);
        std::printf("result: %s\n", pf(r.passed()));
        return r.passed() ? kExitOk : kExitDomain;
    }

    if (args.which == "case2") {
        iplan::JointDesignTask task = iplan::joint_benchmark_task();
        if (args.target) task.coverage_target = *args.target;
        if (args.threshold_db) task.threshold_db = *args.threshold_db;
        if (args.seed) task.seed = *args.seed;
        if (args.max_iterations) task.max_iterations = *args.max_iterations;
        if (!(task.coverage_target > 0.0) || task.coverage_target > 1.0)
            return fail_input("coverage target must be in (0, 1]");
        if (const auto why = iplan::task_violation(task)) return fail_input(*why);

        const iplan::JointVsBaselineReport r = iplan::run_joint_vs_baseline_benchmark(task);
        const bool coverage_ok = r.pipeline_coverage >= 0.95;
        const bool fewer_aps = r.baseline_aps > 0 && r.pipeline_aps + 1 <= r.baseline_aps;
        std::printf("case2: joint layout+placement pipeline vs fixed baseline layout\n");
        std::printf("  [%s] pipeline: coverage %.4f with %zu APs (rationality %.3f)\n",
                    pf(coverage_ok), r.pipeline_coverage, r.pipeline_aps,
                    r.pipeline_rationality);
        std::string by_k;
        for (double cov : r.baseline_coverage_by_k) {
            char buf[16];
            std::snprintf(buf, sizeof buf, " %.4f", cov);
            by_k += buf;
        }
        std::printf("  [%s] baseline layout needs %zu APs (coverage by count:%s)\n",
                    pf(fewer_aps), r.baseline_aps, by_k.c_str());
        if (r.pipeline_aps > 0)
            std::printf("  efficiency: %.3f coverage / %zu APs = %.3f\n", r.pipeline_coverage,
                        r.pipeline_aps,
                        r.pipeline_coverage / static_cast<double>(r.pipeline_aps));
        std::printf("result: %s\n", pf(r.passed()));
        return r.passed() ? kExitOk : kExitDomain;
    }

    return fail_input("unknown case \"" + args.which + "\" (expected case1 or case2)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"indoor wireless network planning toolkit"};
    app.require_subcommand(1);
    int rc = kExitOk;

    std::string validate_path;
    bool structural_only = false;
    CLI::App* validate = app.add_subcommand("validate", "check a floor plan file");
    validate->add_option("plan", validate_path, "floor plan JSON")->required();
    validate->add_flag("--structural", structural_only,
                       "structural invariants only, skip the architectural rules");
    validate->callback([&] { rc = cmd_validate(validate_path, structural_only); });

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand("evaluate", "score a deployment on a plan");
    evaluate->add_option("--plan", eval_args.plan_path, "floor plan JSON")->required();
    evaluate->add_option("--deployment", eval_args.deployment_path, "deployment JSON");
    evaluate->add_option("--ap", eval_args.inline_aps, "AP position \"x,y\" (repeatable)");
    evaluate->add_option("--threshold", eval_args.threshold_db, "coverage threshold [dB]");
    evaluate->add_option("--cell-size", eval_args.cell_size, "evaluation grid cell [m]");
    evaluate->add_option("--heatmap", eval_args.heatmap_path, "write a PPM heatmap here");
    eval_args.radio.attach(*evaluate);
    evaluate->callback([&] { rc = cmd_evaluate(eval_args); });

    OptimizeArgs opt_args;
    CLI::App* optimize = app.add_subcommand("optimize", "run an AP placement optimizer");
    optimize->add_option("--config", opt_args.config_path, "run configuration JSON");
    optimize->add_option("--plan", opt_args.plan_path, "floor plan JSON");
    optimize->add_option("--optimizer", opt_args.optimizer_name,
                         "greedy | aco | anneal | llm | scripted");
    optimize->add_option("--target", opt_args.target, "coverage target in (0, 1]");
    optimize->add_option("--threshold", opt_args.threshold_db, "coverage threshold [dB]");
    optimize->add_option("--cell-size", opt_args.cell_size, "evaluation grid cell [m]");
    optimize->add_option("--max-aps", opt_args.max_aps, "AP budget");
    optimize->add_option("--max-iterations", opt_args.max_iterations, "iteration budget");
    optimize->add_option("--seed", opt_args.seed, "RNG seed (greedy ignores it)");
    optimize->add_option("--out", opt_args.out_dir, "output root (default runs/)");
    optimize->add_option("--run-id", opt_args.run_id, "run directory name (default timestamp)");
    optimize->add_option("--knowledge", opt_args.knowledge_path,
                         "planning-rules text injected into llm prompts");
    optimize->add_option("--base-url", opt_args.base_url, "chat endpoint base URL");
    optimize->add_option("--model", opt_args.model, "chat endpoint model name");
    opt_args.radio.attach(*optimize);
    optimize->callback([&] { rc = cmd_optimize(opt_args); });

    JointArgs joint_args;
    CLI::App* joint =
        app.add_subcommand("joint-design", "run the layout + placement agent pipeline");
    joint->add_option("--config", joint_args.config_path, "run configuration JSON");
    joint->add_option("--seed", joint_args.seed, "layout sampling seed");
    joint->add_option("--rounds", joint_args.rounds, "feedback rounds");
    joint->add_option("--candidates", joint_args.candidates, "layout candidates per round");
    joint->add_option("--max-aps", joint_args.max_aps, "AP budget");
    joint->add_option("--max-iterations", joint_args.max_iterations,
                      "placement iterations per candidate");
    joint->add_option("--target", joint_args.target, "coverage target in (0, 1]");
    joint->add_option("--threshold", joint_args.threshold_db, "coverage threshold [dB]");
    joint->add_option("--out", joint_args.out_dir, "output root (default runs/)");
    joint->add_option("--run-id", joint_args.run_id, "run directory name (default timestamp)");
    joint->add_option("--knowledge", joint_args.knowledge_path,
                      "planning-rules text for the llm layout backend");
    joint->add_flag("--llm-layout", joint_args.llm_layout,
                    "propose layouts through the chat endpoint");
    joint_args.radio.attach(*joint);
    joint->callback([&] { rc = cmd_joint_design(joint_args); });

    ReproduceArgs repro_args;
    CLI::App* reproduce = app.add_subcommand("reproduce", "re-run a packaged benchmark");
    reproduce->add_option("case", repro_args.which, "case1 | case2")->required();
    reproduce->add_option("--target", repro_args.target, "coverage target in (0, 1]");
    reproduce->add_option("--threshold", repro_args.threshold_db, "coverage threshold [dB]");
    reproduce->add_option("--seed", repro_args.seed, "search seed");
    reproduce->add_option("--max-iterations", repro_args.max_iterations, "iteration budget");
    reproduce->callback([&] { rc = cmd_reproduce(repro_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    } catch (const iplan::ProposerFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.network_error ? kExitNetwork : kExitDomain;
    } catch (const iplan::PlanFormatError& e) {
        return fail_input(e.what());
    } catch (const iplan::IoError& e) {
        return fail_input(e.what());
    } catch (const iplan::InvalidParams& e) {
        return fail_input(e.what());
    } catch (const std::exception& e) {
        return fail_domain(e.what());
    }
    return rc;
}
