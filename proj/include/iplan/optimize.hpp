#pragma once

// The planning loop: a proposer suggests deployments, the evaluator grades
// them against the plan, and the loop records every attempt with coverage
// feedback until the target is met or the iteration budget runs out.
//
// Also here: the deterministic greedy baseline proposer, the candidate
// placement lattice, per-candidate coverage masks (a fast exact evaluator for
// subset searches), and the exhaustive oracle used to ground-truth the
// metaheuristics.

#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iplan/geometry.hpp"
#include "iplan/propagation.hpp"

namespace iplan {

struct InvalidParams : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SearchSpaceTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ============================================================================
// Task, feedback, trace
// ============================================================================

struct PlanningTask {
    FloorPlan plan;
    double coverage_target = 0.95;   // fraction in (0, 1]
    double threshold_db = 110.0;     // covered means pathloss strictly below
    std::size_t max_aps = 3;
    std::size_t max_iterations = 30;
    double cell_size = 0.25;
    RadioConfig radio;
};

inline std::optional<std::string> task_violation(const PlanningTask& task) {
    if (!(task.coverage_target > 0.0) || task.coverage_target > 1.0)
        return "coverage_target must be in (0, 1]";
    if (task.max_aps < 1) return "max_aps must be >= 1";
    if (task.max_iterations < 1) return "max_iterations must be >= 1";
    if (!(task.cell_size > 0.0)) return "cell_size must be > 0";
    if (!task.radio.valid()) return "radio config invalid";
    return std::nullopt;
}

struct Feedback {
    std::size_t iteration = 0;              // 1-based, strictly increasing in a trace
    CoverageStats stats;
    std::vector<WorstRegion> grid_summary;  // top worst-covered spots, worst first
    std::string violation;                  // nonempty: proposal rejected, stats zeroed

    bool valid() const { return violation.empty(); }
};

struct Step {
    Deployment deployment;
    Feedback feedback;
};

enum class Outcome { Converged, Exhausted };

inline const char* to_string(Outcome o) {
    return o == Outcome::Converged ? "converged" : "exhausted";
}

struct OptimizationTrace {
    std::uint64_t task_fingerprint = 0;
    std::vector<Step> steps;
    Outcome outcome = Outcome::Exhausted;
    std::size_t best_index = 0;   // first step attaining the maximum coverage

    const Step& best() const { return steps.at(best_index); }

    double best_coverage() const {
        return steps.empty() ? 0.0 : steps[best_index].feedback.stats.coverage_fraction;
    }
};

// Proposers see the task and the full history of prior attempts.
using Proposer = std::function<Deployment(const PlanningTask&, const std::vector<Step>&)>;

// Pluggable evaluation, defaulting to the multi-wall grid.
using GridEvaluator = std::function<CoverageGrid(const PlanningTask&, const Deployment&)>;

inline GridEvaluator default_evaluator() {
    return [](const PlanningTask& task, const Deployment& deployment) {
        return compute_grid(task.plan, deployment, task.cell_size);
    };
}

// Base for proposer-side errors that the loop should surface rather than
// treat as one more bad proposal. network_error distinguishes transport
// problems (retryable by rerunning) from logic errors.
struct ProposerError : std::runtime_error {
    explicit ProposerError(const std::string& msg, bool network = false)
        : std::runtime_error(msg), network_error(network) {}
    bool network_error = false;
};

// Raised by optimize_loop when the proposer fails irrecoverably; carries
// whatever trace had accumulated so callers can persist partial progress.
struct ProposerFailure : std::runtime_error {
    ProposerFailure(const std::string& msg, bool network, OptimizationTrace partial)
        : std::runtime_error(msg), network_error(network), partial_trace(std::move(partial)) {}
    bool network_error = false;
    OptimizationTrace partial_trace;
};

// ============================================================================
// Task fingerprint
// ============================================================================

namespace detail {

inline void fnv1a_append(std::uint64_t& hash, const char* data, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= static_cast<unsigned char>(data[i]);
        hash *= 1099511628211ULL;
    }
}

inline void fnv1a_append(std::uint64_t& hash, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g,", v);
    fnv1a_append(hash, buf, static_cast<std::size_t>(n));
}

inline void fnv1a_append(std::uint64_t& hash, const std::string& s) {
    fnv1a_append(hash, s.data(), s.size());
    fnv1a_append(hash, ";", 1);
}

}  // namespace detail

// Order-sensitive hash of everything that shapes the optimization problem;
// equal tasks hash equal, so traces can be matched back to their task.
inline std::uint64_t task_fingerprint(const PlanningTask& task) {
    std::uint64_t h = 1469598103934665603ULL;   // FNV-1a offset basis
    auto num = [&](double v) { detail::fnv1a_append(h, v); };

    num(task.plan.boundary.origin.x);
    num(task.plan.boundary.origin.y);
    num(task.plan.boundary.width);
    num(task.plan.boundary.depth);
    for (const Material& m : task.plan.materials) {
        detail::fnv1a_append(h, m.name);
        num(m.attenuation_db);
    }
    for (const Wall& w : task.plan.walls) {
        num(w.a.x); num(w.a.y); num(w.b.x); num(w.b.y);
        num(static_cast<double>(w.material));
        num(w.thickness);
    }
    for (const Opening& op : task.plan.openings) {
        num(static_cast<double>(op.wall));
        num(op.offset);
        num(op.width);
        num(op.kind == OpeningKind::Door ? 0.0 : 1.0);
        num(static_cast<double>(op.material));
    }
    for (const Room& r : task.plan.rooms) {
        num(r.origin.x); num(r.origin.y); num(r.width); num(r.depth);
        detail::fnv1a_append(h, r.label);
    }
    num(task.coverage_target);
    num(task.threshold_db);
    num(static_cast<double>(task.max_aps));
    num(static_cast<double>(task.max_iterations));
    num(task.cell_size);
    num(task.radio.frequency_mhz);
    num(task.radio.reference_pathloss_db);
    num(task.radio.reference_distance_m);
    num(task.radio.pathloss_exponent);
    return h;
}

// ============================================================================
// The loop
// ============================================================================

namespace detail {

inline Feedback violation_feedback(const PlanningTask& task, std::size_t iteration,
                                   std::string why) {
    Feedback fb;
    fb.iteration = iteration;
    fb.violation = std::move(why);
    fb.stats.threshold_db = task.threshold_db;
    const int nc = std::max(1, static_cast<int>(std::ceil(task.plan.boundary.width / task.cell_size - 1e-9)));
    const int nr = std::max(1, static_cast<int>(std::ceil(task.plan.boundary.depth / task.cell_size - 1e-9)));
    fb.stats.total_cells = static_cast<std::size_t>(nc) * nr;
    fb.stats.worst_cell = task.plan.boundary.origin;
    return fb;
}

inline Feedback graded_feedback(const PlanningTask& task, std::size_t iteration,
                                const CoverageGrid& grid) {
    Feedback fb;
    fb.iteration = iteration;
    fb.stats = coverage_fraction(grid, task.threshold_db);
    fb.grid_summary = worst_regions(grid);
    return fb;
}

inline void append_step(OptimizationTrace& trace, Step step) {
    trace.steps.push_back(std::move(step));
    const Step& added = trace.steps.back();
    if (trace.steps.size() == 1 ||
        added.feedback.stats.coverage_fraction >
            trace.steps[trace.best_index].feedback.stats.coverage_fraction)
        trace.best_index = trace.steps.size() - 1;
}

}  // namespace detail

// Runs the propose/evaluate loop. Invalid proposals become violation steps
// (the proposer sees them in the history) rather than crashing the run.
// Proposer exceptions abort the run as ProposerFailure with the partial
// trace attached.
inline OptimizationTrace optimize_loop(const PlanningTask& task, const Proposer& proposer,
                                       const GridEvaluator& evaluator = default_evaluator()) {
    if (const auto why = task_violation(task)) throw InvalidParams("optimize_loop: " + *why);

    OptimizationTrace trace;
    trace.task_fingerprint = task_fingerprint(task);
    trace.outcome = Outcome::Exhausted;

    for (std::size_t iter = 1; iter <= task.max_iterations; ++iter) {
        Deployment proposal;
        try {
            proposal = proposer(task, trace.steps);
        } catch (const ProposerError& e) {
            throw ProposerFailure(e.what(), e.network_error, std::move(trace));
        } catch (const std::exception& e) {
            throw ProposerFailure(e.what(), false, std::move(trace));
        }

        Step step;
        step.deployment = proposal;
        if (const auto why = deployment_violation(task.plan, proposal, task.max_aps)) {
            step.feedback = detail::violation_feedback(task, iter, *why);
        } else {
            step.feedback = detail::graded_feedback(task, iter, evaluator(task, proposal));
        }
        detail::append_step(trace, std::move(step));

        const Feedback& fb = trace.steps.back().feedback;
        if (fb.valid() && fb.stats.coverage_fraction >= task.coverage_target) {
            trace.outcome = Outcome::Converged;
            break;
        }
    }
    return trace;
}

// ============================================================================
// Greedy worst-point proposer
// ============================================================================

namespace detail {

// Clamp into the boundary and step off walls; failing that, return the
// point unchanged and let deployment validation flag it.
inline Point2D snap_to_valid(const FloorPlan& plan, Point2D p) {
    if (const auto q = nearest_clear_position(plan, p, 0.05, 0.05)) return *q;
    return p;
}

inline std::optional<std::size_t> best_valid_step(const std::vector<Step>& history) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (!history[i].feedback.valid()) continue;
        if (!best || history[i].feedback.stats.coverage_fraction >
                         history[*best].feedback.stats.coverage_fraction)
            best = i;
    }
    return best;
}

}  // namespace detail

// Deterministic refinement baseline. First proposal: one AP at the plan
// centroid. Afterwards it keeps the best deployment seen and aims at the
// worst-covered spot: while moves keep paying (>= 0.5 percentage points over
// the previous best) or the AP budget is spent, it moves the nearest AP
// halfway toward that spot; once a move stalls and budget remains, it adds
// a new AP there instead.
inline Deployment greedy_worst_point_proposer(const PlanningTask& task,
                                              const std::vector<Step>& history) {
    Deployment proposal;
    proposal.config = task.radio;

    const auto best = detail::best_valid_step(history);
    if (!best) {
        proposal.aps = {detail::snap_to_valid(task.plan, task.plan.boundary.center())};
        return proposal;
    }

    const Step& anchor = history[*best];
    proposal.aps = anchor.deployment.aps;

    Point2D target = anchor.feedback.stats.worst_cell;
    if (!anchor.feedback.grid_summary.empty()) target = anchor.feedback.grid_summary[0].center;

    // Improvement the latest attempt made over the best before it.
    double improvement = std::numeric_limits<double>::infinity();
    if (history.size() >= 2) {
        double before = 0.0;
        for (std::size_t i = 0; i + 1 < history.size(); ++i)
            if (history[i].feedback.valid())
                before = std::max(before, history[i].feedback.stats.coverage_fraction);
        const Feedback& last = history.back().feedback;
        improvement = (last.valid() ? last.stats.coverage_fraction : 0.0) - before;
    }

    if (proposal.aps.size() < task.max_aps && improvement < 0.005) {
        proposal.aps.push_back(detail::snap_to_valid(task.plan, target));
        return proposal;
    }

    // Move the AP nearest the trouble spot halfway toward it; ties break
    // lexicographically by position.
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < proposal.aps.size(); ++i) {
        const double di = distance(proposal.aps[i], target);
        const double dn = distance(proposal.aps[nearest], target);
        if (di < dn || (di == dn && lex_less(proposal.aps[i], proposal.aps[nearest])))
            nearest = i;
    }
    const Point2D ap = proposal.aps[nearest];
    proposal.aps[nearest] = detail::snap_to_valid(task.plan, ap + 0.5 * (target - ap));
    return proposal;
}

// ============================================================================
// Placement lattice and coverage masks
// ============================================================================

// Cell centers of a coarse lattice over the boundary, dropping positions a
// single-AP deployment could not legally use. Lexicographically ordered.
inline std::vector<Point2D> placement_lattice(const FloorPlan& plan, double spacing = 1.0) {
    if (spacing <= 0.0) throw InvalidParams("placement_lattice: spacing must be > 0");
    const int nx = std::max(1, static_cast<int>(std::ceil(plan.boundary.width / spacing - 1e-9)));
    const int ny = std::max(1, static_cast<int>(std::ceil(plan.boundary.depth / spacing - 1e-9)));
    std::vector<Point2D> out;
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            const Point2D p{plan.boundary.origin.x + (ix + 0.5) * spacing,
                            plan.boundary.origin.y + (iy + 0.5) * spacing};
            if (!deployment_violation(plan, {{p}, {}})) out.push_back(p);
        }
    }
    return out;
}

// Per-candidate bitmask of covered grid cells. A deployment's covered set is
// the union of its members' masks — exact, because a cell is covered iff any
// single AP covers it — which makes subset searches cheap.
class CoverageMasks {
  public:
    CoverageMasks(const PlanningTask& task, std::vector<Point2D> candidates)
        : candidates_(std::move(candidates)) {
        const SpatialIndex index(task.plan);
        const int nc = std::max(1, static_cast<int>(std::ceil(task.plan.boundary.width / task.cell_size - 1e-9)));
        const int nr = std::max(1, static_cast<int>(std::ceil(task.plan.boundary.depth / task.cell_size - 1e-9)));
        total_cells_ = static_cast<std::size_t>(nc) * nr;
        words_ = (total_cells_ + 63) / 64;
        bits_.assign(candidates_.size() * words_, 0);

        for (std::size_t c = 0; c < candidates_.size(); ++c) {
            std::uint64_t* row = bits_.data() + c * words_;
            std::size_t cell = 0;
            for (int iy = 0; iy < nr; ++iy) {
                for (int ix = 0; ix < nc; ++ix, ++cell) {
                    const Point2D rx{task.plan.boundary.origin.x + (ix + 0.5) * task.cell_size,
                                     task.plan.boundary.origin.y + (iy + 0.5) * task.cell_size};
                    if (pathloss(candidates_[c], rx, task.plan, index, task.radio) <
                        task.threshold_db)
                        row[cell / 64] |= 1ULL << (cell % 64);
                }
            }
        }
    }

    const std::vector<Point2D>& candidates() const { return candidates_; }
    std::size_t total_cells() const { return total_cells_; }

    // Coverage fraction of the deployment formed by the given candidates.
    double coverage(const std::vector<std::size_t>& chosen) const {
        std::size_t covered = 0;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t u = 0;
            for (std::size_t c : chosen) u |= bits_[c * words_ + w];
            covered += static_cast<std::size_t>(__builtin_popcountll(u));
        }
        return static_cast<double>(covered) / static_cast<double>(total_cells_);
    }

  private:
    std::vector<Point2D> candidates_;
    std::size_t total_cells_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

// ============================================================================
// Exhaustive oracle
// ============================================================================

// Best k-AP deployment over the placement lattice by full enumeration.
// Combinations are visited in lexicographic order and only strict
// improvements are kept, so ties resolve to the lexicographically smallest
// deployment. Guarded against combinatorial blowup.
inline Deployment brute_force_oracle(const PlanningTask& task, double lattice_spacing,
                                     std::size_t k) {
    if (const auto why = task_violation(task)) throw InvalidParams("brute_force_oracle: " + *why);
    if (k < 1) throw InvalidParams("brute_force_oracle: k must be >= 1");

    std::vector<Point2D> lattice = placement_lattice(task.plan, lattice_spacing);
    if (lattice.empty()) throw SearchSpaceTooLarge("brute_force_oracle: no valid lattice positions");
    const std::size_t n = lattice.size();
    if (k > n) k = n;

    double combos = 1.0;   // C(n, k), computed in floating point for the guard
    for (std::size_t i = 0; i < k; ++i) combos = combos * static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (combos > 1e7)
        throw SearchSpaceTooLarge("brute_force_oracle: " + std::to_string(combos) +
                                  " combinations exceed the 1e7 guard");

    const CoverageMasks masks(task, std::move(lattice));

    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<std::size_t> best_pick = pick;
    double best_cov = masks.coverage(pick);

    // Advance to the next k-combination of {0..n-1} in lexicographic order.
    auto next_combination = [&]() {
        std::size_t i = k;
        while (i-- > 0) {
            if (pick[i] != i + n - k) {
                ++pick[i];
                for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
                return true;
            }
        }
        return false;
    };

    while (next_combination()) {
        const double cov = masks.coverage(pick);
        if (cov > best_cov) {
            best_cov = cov;
            best_pick = pick;
        }
    }

    Deployment out;
    out.config = task.radio;
    for (std::size_t c : best_pick) out.aps.push_back(masks.candidates()[c]);
    return out;
}

// ============================================================================
// Lattice set-cover proposer
// ============================================================================

// Deterministic proposer that grows a deployment one AP per iteration along
// the greedy set-cover order of the placement lattice (each step adds the
// lattice position with the largest marginal coverage, ties to the lower
// index), then polishes the full-budget set by single-swap interchange until
// no swap gains coverage. Greedy alone can strand the budget on a first pick
// that pairs badly; the interchange pass recovers near-oracle deployments at
// a fraction of the oracle's cost, which makes this the default
// network-design backend of the joint pipeline. Everything is computed once
// per task and cached inside the returned closure, keyed by task
// fingerprint, so one proposer instance can serve many plans in sequence.
inline Proposer make_lattice_cover_proposer(double lattice_spacing = 1.0) {
    struct Cache {
        std::optional<std::uint64_t> fingerprint;
        std::vector<Point2D> order;     // greedy prefixes, proposed while growing
        std::vector<Point2D> polished;  // interchange-improved full-budget set
    };
    auto cache = std::make_shared<Cache>();

    return [cache, lattice_spacing](const PlanningTask& task,
                                    const std::vector<Step>& history) -> Deployment {
        const std::uint64_t fp = task_fingerprint(task);
        if (cache->fingerprint != fp) {
            std::vector<Point2D> lattice = placement_lattice(task.plan, lattice_spacing);
            if (lattice.empty())
                throw ProposerError("lattice cover proposer: no clear lattice position");
            const CoverageMasks masks(task, std::move(lattice));
            const std::size_t n = masks.candidates().size();

            std::vector<Point2D> order;
            std::vector<std::size_t> chosen;
            for (std::size_t step = 0; step < task.max_aps; ++step) {
                std::size_t best = n;
                double best_cov = chosen.empty() ? 0.0 : masks.coverage(chosen);
                const double floor_cov = best_cov;
                std::vector<std::size_t> trial = chosen;
                trial.push_back(0);
                for (std::size_t c = 0; c < n; ++c) {
                    trial.back() = c;
                    const double cov = masks.coverage(trial);
                    if (cov > best_cov) {
                        best_cov = cov;
                        best = c;
                    }
                }
                // No candidate adds coverage: a larger deployment would only
                // dilute efficiency, so the order ends here.
                if (best == n || best_cov <= floor_cov) break;
                chosen.push_back(best);
                order.push_back(masks.candidates()[best]);
            }
            if (order.empty())
                throw ProposerError("lattice cover proposer: lattice adds no coverage");

            // Interchange pass: best-improvement sweeps until a fixed point
            // (bounded for safety; two or three sweeps is typical).
            double cov_now = masks.coverage(chosen);
            for (int sweep = 0; sweep < 16; ++sweep) {
                double best_gain_cov = cov_now;
                std::size_t swap_slot = chosen.size(), swap_to = n;
                std::vector<std::size_t> trial = chosen;
                for (std::size_t slot = 0; slot < chosen.size(); ++slot) {
                    for (std::size_t c = 0; c < n; ++c) {
                        trial[slot] = c;
                        const double cov = masks.coverage(trial);
                        if (cov > best_gain_cov) {
                            best_gain_cov = cov;
                            swap_slot = slot;
                            swap_to = c;
                        }
                    }
                    trial[slot] = chosen[slot];
                }
                if (swap_slot == chosen.size()) break;
                chosen[swap_slot] = swap_to;
                cov_now = best_gain_cov;
            }
            std::vector<Point2D> polished;
            for (std::size_t c : chosen) polished.push_back(masks.candidates()[c]);

            cache->fingerprint = fp;
            cache->order = std::move(order);
            cache->polished = std::move(polished);
        }

        const std::size_t k =
            std::min({history.size() + 1, cache->order.size(),
                      static_cast<std::size_t>(task.max_aps)});
        Deployment out;
        out.config = task.radio;
        if (k == cache->order.size())
            out.aps = cache->polished;
        else
            out.aps.assign(cache->order.begin(), cache->order.begin() + k);
        return out;
    };
}

}  // namespace iplan
