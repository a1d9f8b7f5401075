#pragma once

// Conventional baseline optimizers: ant colony optimization over a coarse
// placement lattice and simulated annealing over continuous AP positions.
// Both are seeded and fully deterministic: the same seed and task produce
// the same trace. One trace step is recorded per iteration and holds the
// best-so-far deployment, so per-step coverage is non-decreasing.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "iplan/optimize.hpp"

namespace iplan {

// ============================================================================
// Ant colony optimization
// ============================================================================

struct AcoParams {
    std::size_t n_ants = 20;
    double alpha = 1.0;                // pheromone exponent
    double beta = 0.0;                 // heuristic exponent (uniform heuristic by default)
    double evaporation = 0.1;          // in (0,1)
    double lattice_spacing = 1.0;
    double initial_pheromone = 1.0;
    std::uint64_t seed = 0;
    // Optional position desirability; null means uniform.
    std::function<double(const PlanningTask&, Point2D)> heuristic;
};

namespace detail {

// Roulette pick over weights, skipping already-chosen entries. Falls back to
// the first selectable index if every weight underflows to zero.
inline std::size_t roulette_pick(const std::vector<double>& weights,
                                 const std::vector<bool>& taken, std::mt19937_64& rng) {
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (!taken[i]) total += weights[i];
    if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double ticket = u(rng);
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (taken[i]) continue;
            ticket -= weights[i];
            if (ticket <= 0.0) return i;
        }
    }
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (!taken[i]) return i;
    return 0;
}

// Feedback for the best-so-far deployment, recomputing the full grid only
// when the best changed since the last record.
class BestFeedbackCache {
  public:
    Feedback feedback_for(const PlanningTask& task, const Deployment& best, bool changed,
                          std::size_t iteration) {
        if (changed || !have_) {
            cached_ = graded_feedback(task, iteration, compute_grid(task.plan, best, task.cell_size));
            have_ = true;
        }
        Feedback fb = cached_;
        fb.iteration = iteration;
        return fb;
    }

  private:
    Feedback cached_;
    bool have_ = false;
};

}  // namespace detail

// Ants pick AP positions from the placement lattice with probability
// proportional to pheromone^alpha * heuristic^beta (without replacement);
// pheromone evaporates each iteration and every ant deposits its achieved
// coverage on the positions it used.
inline OptimizationTrace aco_optimize(const PlanningTask& task, const AcoParams& params) {
    if (const auto why = task_violation(task)) throw InvalidParams("aco_optimize: " + *why);
    if (params.n_ants == 0) throw InvalidParams("aco_optimize: n_ants must be >= 1");
    if (!(params.evaporation > 0.0) || !(params.evaporation < 1.0))
        throw InvalidParams("aco_optimize: evaporation must be in (0,1)");
    if (!(params.initial_pheromone > 0.0))
        throw InvalidParams("aco_optimize: initial_pheromone must be > 0");
    if (params.alpha < 0.0 || params.beta < 0.0)
        throw InvalidParams("aco_optimize: alpha and beta must be >= 0");

    std::vector<Point2D> lattice = placement_lattice(task.plan, params.lattice_spacing);
    if (lattice.empty()) throw InvalidParams("aco_optimize: no valid lattice positions");
    const CoverageMasks masks(task, std::move(lattice));
    const std::vector<Point2D>& cand = masks.candidates();
    const std::size_t n = cand.size();
    const std::size_t k = std::min(task.max_aps, n);

    std::vector<double> eta(n, 1.0);
    if (params.heuristic)
        for (std::size_t i = 0; i < n; ++i) eta[i] = std::max(0.0, params.heuristic(task, cand[i]));
    std::vector<double> tau(n, params.initial_pheromone);

    std::mt19937_64 rng(params.seed);
    OptimizationTrace trace;
    trace.task_fingerprint = task_fingerprint(task);
    trace.outcome = Outcome::Exhausted;

    std::vector<std::size_t> best_pick;
    double best_cov = -1.0;
    detail::BestFeedbackCache cache;

    std::vector<double> weights(n);
    std::vector<bool> taken(n);
    for (std::size_t iter = 1; iter <= task.max_iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            weights[i] = std::pow(tau[i], params.alpha) * std::pow(eta[i], params.beta);

        bool improved = false;
        std::vector<std::pair<std::vector<std::size_t>, double>> ants;
        ants.reserve(params.n_ants);
        for (std::size_t a = 0; a < params.n_ants; ++a) {
            std::fill(taken.begin(), taken.end(), false);
            std::vector<std::size_t> chosen;
            chosen.reserve(k);
            for (std::size_t j = 0; j < k; ++j) {
                const std::size_t c = detail::roulette_pick(weights, taken, rng);
                taken[c] = true;
                chosen.push_back(c);
            }
            std::sort(chosen.begin(), chosen.end());
            const double cov = masks.coverage(chosen);
            if (cov > best_cov) {
                best_cov = cov;
                best_pick = chosen;
                improved = true;
            }
            ants.emplace_back(std::move(chosen), cov);
        }

        for (double& t : tau) t *= 1.0 - params.evaporation;
        for (const auto& [chosen, cov] : ants)
            for (std::size_t c : chosen) tau[c] += cov;

        Step step;
        step.deployment.config = task.radio;
        for (std::size_t c : best_pick) step.deployment.aps.push_back(cand[c]);
        step.feedback = cache.feedback_for(task, step.deployment, improved, iter);
        detail::append_step(trace, std::move(step));

        if (best_cov >= task.coverage_target) {
            trace.outcome = Outcome::Converged;
            break;
        }
    }
    return trace;
}

// ============================================================================
// Simulated annealing
// ============================================================================

struct AnnealParams {
    double initial_temperature = 1.0;   // 0 degenerates to hill climbing
    double cooling = 0.95;              // geometric schedule, in (0,1)
    double move_scale = 2.0;            // Gaussian step deviation, meters
    std::uint64_t seed = 0;
};

namespace detail {

inline Point2D random_valid_position(const FloorPlan& plan, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(plan.boundary.origin.x, plan.boundary.max_x());
    std::uniform_real_distribution<double> uy(plan.boundary.origin.y, plan.boundary.max_y());
    for (int tries = 0; tries < 1000; ++tries) {
        const Point2D p{ux(rng), uy(rng)};
        if (!deployment_violation(plan, {{p}, {}})) return p;
    }
    return snap_to_valid(plan, plan.boundary.center());
}

}  // namespace detail

// Metropolis search over AP positions: each iteration perturbs one AP with a
// Gaussian step (snapped back to a legal position), accepting improvements
// always and regressions with probability exp(delta / T) under a geometric
// cooling schedule.
inline OptimizationTrace simulated_annealing_optimize(const PlanningTask& task,
                                                      const AnnealParams& params) {
    if (const auto why = task_violation(task))
        throw InvalidParams("simulated_annealing_optimize: " + *why);
    if (!(params.cooling > 0.0) || !(params.cooling < 1.0))
        throw InvalidParams("simulated_annealing_optimize: cooling must be in (0,1)");
    if (!(params.move_scale > 0.0))
        throw InvalidParams("simulated_annealing_optimize: move_scale must be > 0");
    if (params.initial_temperature < 0.0)
        throw InvalidParams("simulated_annealing_optimize: initial_temperature must be >= 0");

    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, params.move_scale);

    auto coverage_of = [&](const Deployment& d) {
        return coverage_fraction(compute_grid(task.plan, d, task.cell_size), task.threshold_db)
            .coverage_fraction;
    };

    Deployment current;
    current.config = task.radio;
    for (std::size_t i = 0; i < task.max_aps; ++i)
        current.aps.push_back(detail::random_valid_position(task.plan, rng));
    double current_cov = coverage_of(current);

    OptimizationTrace trace;
    trace.task_fingerprint = task_fingerprint(task);
    trace.outcome = Outcome::Exhausted;

    Deployment best = current;
    double best_cov = current_cov;
    detail::BestFeedbackCache cache;

    for (std::size_t iter = 1; iter <= task.max_iterations; ++iter) {
        bool improved = iter == 1;
        if (iter > 1) {
            std::uniform_int_distribution<std::size_t> pick(0, current.aps.size() - 1);
            Deployment proposal = current;
            const std::size_t i = pick(rng);
            const Point2D moved{proposal.aps[i].x + gauss(rng), proposal.aps[i].y + gauss(rng)};
            proposal.aps[i] = detail::snap_to_valid(task.plan, moved);

            if (!deployment_violation(task.plan, proposal, task.max_aps)) {
                const double cov = coverage_of(proposal);
                const double delta = cov - current_cov;
                const double temp =
                    params.initial_temperature * std::pow(params.cooling, static_cast<double>(iter - 1));
                bool accept = delta >= 0.0;
                if (!accept && temp > 0.0) accept = u01(rng) < std::exp(delta / temp);
                if (accept) {
                    current = std::move(proposal);
                    current_cov = cov;
                    if (cov > best_cov) {
                        best = current;
                        best_cov = cov;
                        improved = true;
                    }
                }
            }
        }

        Step step;
        step.deployment = best;
        step.feedback = cache.feedback_for(task, best, improved, iter);
        detail::append_step(trace, std::move(step));

        if (best_cov >= task.coverage_target) {
            trace.outcome = Outcome::Converged;
            break;
        }
    }
    return trace;
}

}  // namespace iplan
