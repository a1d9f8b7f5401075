#pragma once

// Joint building + network design: five cooperating agents — layout, entity
// (doors), network design, correction, and evaluation/update — iterate on
// candidate floor plans until the design is both wireless-friendly and
// architecturally sound. Every agent has a deterministic rule backend so the
// whole pipeline runs offline; the layout agent can alternatively consult a
// chat endpoint and falls back to rules when replies are unusable.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iplan/llm.hpp"
#include "iplan/metaheuristics.hpp"
#include "iplan/optimize.hpp"

namespace iplan {

struct NoFeasibleLayout : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoValidDoorPlacement : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoValidPosition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ============================================================================
// Task and score types
// ============================================================================

struct JointDesignTask {
    // Building shell.
    double boundary_width = 20.0;
    double boundary_depth = 10.0;
    std::string outer_wall_material = "brick";
    double outer_door_width = 1.0;     // centered on a width (horizontal) wall
    // Required rooms and their door rule.
    std::vector<std::pair<double, double>> room_sizes = {{4, 3}, {4, 3}, {4, 3}, {4, 3}};
    std::string room_wall_material = "concrete";
    double door_width = 0.8;
    std::string door_material = "wood";
    // Network objective.
    double coverage_target = 0.95;
    double threshold_db = 80.0;
    std::size_t max_aps = 3;
    std::size_t max_iterations = 20;
    double cell_size = 0.25;
    RadioConfig radio;
    // Scoring and search breadth.
    double w_coverage = 0.7;
    double w_rationality = 0.3;
    std::size_t n_candidates = 10;
    std::size_t max_rounds = 5;
    std::uint64_t seed = 0;
};

inline std::optional<std::string> task_violation(const JointDesignTask& task) {
    if (task.room_sizes.empty()) return "at least one room is required";
    for (auto [w, d] : task.room_sizes)
        if (!(w > 0.0) || !(d > 0.0)) return "room sizes must be positive";
    if (task.w_coverage < 0.0 || task.w_rationality < 0.0 ||
        std::abs(task.w_coverage + task.w_rationality - 1.0) > 1e-9)
        return "weights must be nonnegative and sum to 1";
    if (task.n_candidates < 1) return "n_candidates must be >= 1";
    if (task.max_rounds < 1) return "max_rounds must be >= 1";
    if (!(task.door_width > 0.0) || !(task.outer_door_width > 0.0))
        return "door widths must be > 0";
    return std::nullopt;
}

inline ArchitecturalRules rules_of(const JointDesignTask& task) {
    ArchitecturalRules rules;
    rules.room_sizes = task.room_sizes;
    rules.door_width = task.door_width;
    rules.door_material = task.door_material;
    rules.require_outer_door = true;
    rules.require_circulation = true;
    return rules;
}

inline PlanningTask planning_task_for(const JointDesignTask& task, FloorPlan plan) {
    PlanningTask planning;
    planning.plan = std::move(plan);
    planning.coverage_target = task.coverage_target;
    planning.threshold_db = task.threshold_db;
    planning.max_aps = task.max_aps;
    planning.max_iterations = task.max_iterations;
    planning.cell_size = task.cell_size;
    planning.radio = task.radio;
    return planning;
}

struct LayoutProposal {
    FloorPlan plan;
    std::string provenance;   // which agent/backend produced it
    std::string rationale;
};

struct RationalityChecks {
    bool anchoring = false;
    bool door_rule = false;
    bool circulation = false;
    bool non_overlap = false;

    double fraction() const {
        return (static_cast<int>(anchoring) + static_cast<int>(door_rule) +
                static_cast<int>(circulation) + static_cast<int>(non_overlap)) /
               4.0;
    }
};

struct JointScore {
    double coverage = 0.0;
    std::size_t ap_count = 0;
    double iwn_efficiency = 0.0;   // coverage / ap_count
    double rationality = 0.0;      // pass fraction of the four checks
    double overall = 0.0;          // w_coverage * coverage + w_rationality * rationality
    RationalityChecks checks;
};

// ============================================================================
// Plan assembly from room placements
// ============================================================================

namespace detail {

inline std::size_t require_material(FloorPlan& plan, const std::string& name) {
    if (const auto i = plan.find_material(name)) return *i;
    for (const Material& m : default_materials())
        if (m.name == name) return plan.add_material(m.name, m.attenuation_db);
    throw InvalidParams("unknown material '" + name + "'");
}

// Union of 1D intervals, merged when overlapping or touching.
inline std::vector<std::pair<double, double>> merge_intervals(
    std::vector<std::pair<double, double>> spans) {
    std::sort(spans.begin(), spans.end());
    std::vector<std::pair<double, double>> out;
    for (auto [lo, hi] : spans) {
        if (!out.empty() && lo <= out.back().second + kCoordTol)
            out.back().second = std::max(out.back().second, hi);
        else
            out.emplace_back(lo, hi);
    }
    return out;
}

}  // namespace detail

// Builds the full wall set for a set of room rectangles inside the task's
// shell: four outer walls plus interior walls along every room edge that is
// not flush with the boundary, with collinear edges merged so adjacent rooms
// share one wall.
inline FloorPlan build_shell_plan(const JointDesignTask& task, const std::vector<Rect>& rooms) {
    FloorPlan plan;
    plan.boundary = {{0.0, 0.0}, task.boundary_width, task.boundary_depth};
    const std::size_t outer_mat = detail::require_material(plan, task.outer_wall_material);
    const std::size_t room_mat = detail::require_material(plan, task.room_wall_material);
    detail::require_material(plan, task.door_material);

    const double W = task.boundary_width, D = task.boundary_depth;
    plan.add_wall({0, 0}, {W, 0}, outer_mat, 0.2);
    plan.add_wall({W, 0}, {W, D}, outer_mat, 0.2);
    plan.add_wall({W, D}, {0, D}, outer_mat, 0.2);
    plan.add_wall({0, D}, {0, 0}, outer_mat, 0.2);

    for (std::size_t i = 0; i < rooms.size(); ++i)
        plan.add_room(rooms[i].origin, rooms[i].width, rooms[i].depth,
                      "room-" + std::to_string(i));

    auto near = [](double a, double b) { return std::abs(a - b) <= kCoordTol; };
    // Interior wall intervals, keyed by their carrier line.
    std::map<double, std::vector<std::pair<double, double>>> horizontal;   // y -> x spans
    std::map<double, std::vector<std::pair<double, double>>> vertical;     // x -> y spans
    for (const Rect& r : rooms) {
        if (!near(r.origin.y, 0.0)) horizontal[r.origin.y].push_back({r.origin.x, r.max_x()});
        if (!near(r.max_y(), D)) horizontal[r.max_y()].push_back({r.origin.x, r.max_x()});
        if (!near(r.origin.x, 0.0)) vertical[r.origin.x].push_back({r.origin.y, r.max_y()});
        if (!near(r.max_x(), W)) vertical[r.max_x()].push_back({r.origin.y, r.max_y()});
    }
    for (auto& [y, spans] : horizontal)
        for (auto [lo, hi] : detail::merge_intervals(std::move(spans)))
            plan.add_wall({lo, y}, {hi, y}, room_mat, 0.1);
    for (auto& [x, spans] : vertical)
        for (auto [lo, hi] : detail::merge_intervals(std::move(spans)))
            plan.add_wall({x, lo}, {x, hi}, room_mat, 0.1);
    return plan;
}

// ============================================================================
// Layout agent
// ============================================================================

namespace detail {

// Span on the south wall reserved for the outer door (plus swing margin);
// rooms may not cover it.
inline std::pair<double, double> outer_door_keepout(const JointDesignTask& task) {
    const double cx = task.boundary_width / 2.0;
    const double half = task.outer_door_width / 2.0 + 0.5;
    return {cx - half, cx + half};
}

inline bool rects_overlap(const Rect& a, const Rect& b) {
    const double ox = std::min(a.max_x(), b.max_x()) - std::max(a.origin.x, b.origin.x);
    const double oy = std::min(a.max_y(), b.max_y()) - std::max(a.origin.y, b.origin.y);
    return ox > kCoordTol && oy > kCoordTol;
}

inline bool placement_ok(const JointDesignTask& task, const std::vector<Rect>& placed,
                         const Rect& rect) {
    if (rect.origin.x < -kCoordTol || rect.origin.y < -kCoordTol ||
        rect.max_x() > task.boundary_width + kCoordTol ||
        rect.max_y() > task.boundary_depth + kCoordTol)
        return false;
    for (const Rect& other : placed)
        if (rects_overlap(other, rect)) return false;
    // Keep the outer-door stretch of the south wall clear.
    if (rect.origin.y <= kCoordTol) {
        const auto [lo, hi] = outer_door_keepout(task);
        if (rect.origin.x < hi && rect.max_x() > lo) return false;
    }
    return true;
}

// One seeded attempt at anchoring every required room to a boundary edge.
inline std::optional<std::vector<Rect>> try_place_rooms(const JointDesignTask& task,
                                                        std::mt19937_64& rng) {
    std::vector<Rect> placed;
    std::uniform_int_distribution<int> edge_pick(0, 3);       // S, N, W, E
    std::uniform_int_distribution<int> orient_pick(0, 1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    for (auto [rw, rd] : task.room_sizes) {
        bool ok = false;
        for (int attempt = 0; attempt < 40 && !ok; ++attempt) {
            double w = rw, d = rd;
            if (orient_pick(rng) == 1) std::swap(w, d);
            const int edge = edge_pick(rng);
            Rect rect{{0, 0}, w, d};
            // Anchor to the chosen edge and slide along it; offsets snap to a
            // 0.5 m grid so layouts stay readable and reproducible.
            if (edge == 0 || edge == 1) {   // south / north
                const double range = task.boundary_width - w;
                if (range < -kCoordTol) continue;
                rect.origin.x = std::round(u01(rng) * range / 0.5) * 0.5;
                rect.origin.y = edge == 0 ? 0.0 : task.boundary_depth - d;
            } else {                        // west / east
                const double range = task.boundary_depth - d;
                if (range < -kCoordTol) continue;
                rect.origin.y = std::round(u01(rng) * range / 0.5) * 0.5;
                rect.origin.x = edge == 2 ? 0.0 : task.boundary_width - w;
            }
            if (placement_ok(task, placed, rect)) {
                placed.push_back(rect);
                ok = true;
            }
        }
        if (!ok) return std::nullopt;
    }
    return placed;
}

// Slide each room along its anchored edge by a seeded nudge, keeping the
// arrangement legal; used to refine the best layout between rounds.
inline std::optional<std::vector<Rect>> perturb_rooms(const JointDesignTask& task,
                                                      const std::vector<Room>& rooms,
                                                      std::mt19937_64& rng) {
    std::vector<Rect> placed;
    std::uniform_int_distribution<int> nudge(-3, 3);   // multiples of 0.5 m
    for (const Room& room : rooms) {
        Rect rect = room.rect();
        const bool on_horizontal = rect.origin.y <= kCoordTol ||
                                   rect.max_y() >= task.boundary_depth - kCoordTol;
        bool ok = false;
        for (int attempt = 0; attempt < 12 && !ok; ++attempt) {
            Rect moved = rect;
            const double shift = 0.5 * nudge(rng);
            if (on_horizontal)
                moved.origin.x = std::clamp(rect.origin.x + shift, 0.0,
                                            task.boundary_width - rect.width);
            else
                moved.origin.y = std::clamp(rect.origin.y + shift, 0.0,
                                            task.boundary_depth - rect.depth);
            if (placement_ok(task, placed, moved)) {
                placed.push_back(moved);
                ok = true;
            }
        }
        if (!ok) return std::nullopt;
    }
    return placed;
}

inline std::string layout_signature(const std::vector<Rect>& rooms) {
    std::vector<std::string> parts;
    for (const Rect& r : rooms) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "%.2f,%.2f,%.2f,%.2f", r.origin.x, r.origin.y, r.width,
                      r.depth);
        parts.emplace_back(buf);
    }
    std::sort(parts.begin(), parts.end());
    std::string sig;
    for (const std::string& p : parts) sig += p + ";";
    return sig;
}

}  // namespace detail

// Feedback passed between rounds: the evaluation agent's summary text plus
// the best layout so far, which the rule backend refines.
struct GlobalFeedback {
    std::string text;
    std::optional<FloorPlan> best_plan;
};

// Rule backend: seeded anchored placements of the required rooms along the
// boundary edges (both orientations), distinct across candidates where
// possible. With feedback, half the candidates refine the best layout so far
// and the rest explore fresh arrangements.
inline std::vector<LayoutProposal> layout_agent(const JointDesignTask& task,
                                                const std::optional<GlobalFeedback>& feedback,
                                                std::uint64_t seed) {
    if (const auto why = task_violation(task)) throw InvalidParams("layout_agent: " + *why);
    if (!(task.boundary_width > 0.0) || !(task.boundary_depth > 0.0))
        throw NoFeasibleLayout("layout_agent: boundary has no interior");

    double room_area = 0.0;
    for (auto [w, d] : task.room_sizes) room_area += w * d;
    if (room_area > task.boundary_width * task.boundary_depth + kCoordTol)
        throw NoFeasibleLayout("layout_agent: rooms need " + std::to_string(room_area) +
                               " m^2, boundary has " +
                               std::to_string(task.boundary_width * task.boundary_depth));

    std::mt19937_64 rng(seed);
    std::vector<LayoutProposal> out;
    std::set<std::string> seen;

    const bool refine = feedback && feedback->best_plan && !feedback->best_plan->rooms.empty();
    const std::size_t refine_quota = refine ? task.n_candidates / 2 : 0;

    int dry_spell = 0;   // attempts since the last accepted candidate
    while (out.size() < task.n_candidates) {
        std::optional<std::vector<Rect>> rooms;
        std::string provenance = "layout-rule";
        std::string rationale = "anchored placement along boundary walls";
        if (out.size() < refine_quota) {
            rooms = detail::perturb_rooms(task, feedback->best_plan->rooms, rng);
            if (rooms) {
                provenance = "layout-rule-refine";
                rationale = "nudged from the best layout so far";
            }
        }
        if (!rooms) rooms = detail::try_place_rooms(task, rng);

        if (rooms) {
            const std::string sig = detail::layout_signature(*rooms);
            // Prefer distinct layouts; admit repeats only once fresh attempts
            // stop producing new ones.
            if (seen.insert(sig).second || dry_spell > 50) {
                FloorPlan plan = build_shell_plan(task, *rooms);
                if (validate_plan(plan).empty()) {
                    out.push_back({std::move(plan), provenance, rationale});
                    dry_spell = 0;
                    continue;
                }
            }
        }
        if (++dry_spell > 200) {
            if (out.empty())
                throw NoFeasibleLayout("layout_agent: could not place the required rooms");
            // Feasible but not diverse enough: pad with copies of the first.
            while (out.size() < task.n_candidates) out.push_back(out.front());
        }
    }
    return out;
}

// Chat-endpoint layout backend: asks the model for room placements as
// {"layouts": [{"rooms": [{"x", "y", "width", "depth"}, ...]}, ...]},
// validates each against the task, and falls back to the rule backend when
// no usable reply arrives within the retry budget.
inline std::vector<LayoutProposal> layout_agent_llm(const JointDesignTask& task,
                                                    const std::optional<GlobalFeedback>& feedback,
                                                    std::uint64_t seed,
                                                    const LlmEndpointConfig& endpoint,
                                                    const std::string& knowledge = {}) {
    if (const auto why = task_violation(task)) throw InvalidParams("layout_agent: " + *why);
    if (!(task.boundary_width > 0.0) || !(task.boundary_depth > 0.0))
        throw NoFeasibleLayout("layout_agent: boundary has no interior");

    PromptBundle bundle;
    bundle.system_preamble =
        "You are a building layout designer. Respond with a single JSON object of the form "
        "{\"layouts\": [{\"rooms\": [{\"x\": <m>, \"y\": <m>, \"width\": <m>, \"depth\": <m>}, "
        "...]}, ...]} and nothing else.";
    {
        std::string d;
        d += "boundary: " + detail::fmt("%.3f", task.boundary_width) + " x " +
             detail::fmt("%.3f", task.boundary_depth) + " m\n";
        d += "required rooms (width x depth, any orientation):";
        for (auto [w, d2] : task.room_sizes)
            d += " " + detail::fmt("%.1f", w) + "x" + detail::fmt("%.1f", d2) + ",";
        d.pop_back();
        d += "\nrules: every room anchored flush to a boundary wall; no overlaps; keep x in [" +
             detail::fmt("%.2f", detail::outer_door_keepout(task).first) + ", " +
             detail::fmt("%.2f", detail::outer_door_keepout(task).second) +
             "] on the south wall clear for the entrance\n";
        d += "propose " + std::to_string(task.n_candidates) + " layouts";
        bundle.description = std::move(d);
    }
    bundle.knowledge = knowledge;
    bundle.perception = feedback && !feedback->text.empty() ? feedback->text : "no prior attempts";

    const auto accept = [&](const nlohmann::json& doc) -> std::vector<LayoutProposal> {
        std::vector<LayoutProposal> out;
        if (!doc.contains("layouts") || !doc["layouts"].is_array()) return out;
        for (const auto& layout : doc["layouts"]) {
            if (!layout.is_object() || !layout.contains("rooms") || !layout["rooms"].is_array())
                continue;
            std::vector<Rect> rooms;
            bool ok = true;
            for (const auto& r : layout["rooms"]) {
                if (!r.is_object() || !r.contains("x") || !r.contains("y") ||
                    !r.contains("width") || !r.contains("depth") || !r["x"].is_number() ||
                    !r["y"].is_number() || !r["width"].is_number() || !r["depth"].is_number()) {
                    ok = false;
                    break;
                }
                rooms.push_back({{r["x"].get<double>(), r["y"].get<double>()},
                                 r["width"].get<double>(),
                                 r["depth"].get<double>()});
            }
            if (!ok || rooms.size() != task.room_sizes.size()) continue;
            // The room program is fixed: sizes must match the task's multiset
            // (either orientation).
            std::vector<std::pair<double, double>> want = task.room_sizes;
            for (auto& [w, d] : want)
                if (w > d) std::swap(w, d);
            std::sort(want.begin(), want.end());
            std::vector<std::pair<double, double>> got;
            for (const Rect& r : rooms)
                got.emplace_back(std::min(r.width, r.depth), std::max(r.width, r.depth));
            std::sort(got.begin(), got.end());
            for (std::size_t i = 0; ok && i < want.size(); ++i)
                ok = std::abs(want[i].first - got[i].first) <= kCoordTol &&
                     std::abs(want[i].second - got[i].second) <= kCoordTol;
            if (!ok) continue;
            std::vector<Rect> placed;
            for (const Rect& rect : rooms) {
                if (!detail::placement_ok(task, placed, rect)) {
                    ok = false;
                    break;
                }
                placed.push_back(rect);
            }
            if (!ok) continue;
            FloorPlan plan = build_shell_plan(task, rooms);
            if (!validate_plan(plan).empty()) continue;
            out.push_back({std::move(plan), "layout-llm", "proposed by the layout endpoint"});
        }
        return out;
    };

    for (std::size_t attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
        try {
            if (attempt > 0) detail::backoff_sleep(endpoint, attempt - 1);
            const auto outcome = detail::chat_completion_attempt(bundle, endpoint);
            if (!outcome.ok) continue;
            for (const std::string& span : detail::json_object_spans(outcome.text)) {
                const nlohmann::json doc = nlohmann::json::parse(span, nullptr, false);
                if (doc.is_discarded() || !doc.is_object()) continue;
                auto layouts = accept(doc);
                if (!layouts.empty()) {
                    while (layouts.size() < task.n_candidates) layouts.push_back(layouts.front());
                    layouts.resize(task.n_candidates);
                    return layouts;
                }
            }
        } catch (const AuthFailure&) {
            break;   // a bad key will not fix itself; use the offline backend
        }
    }
    return layout_agent(task, feedback, seed);
}

// ============================================================================
// Entity agent (doors)
// ============================================================================

namespace detail {

struct DoorSpot {
    std::size_t wall = 0;     // host wall index
    double offset = 0.0;      // meters along the wall
    double span_lo = 0.0;     // interval (along the edge axis) the door sits in
    double span_hi = 0.0;
    std::size_t component = 0;
    std::size_t component_size = 0;
};

// Free-space (non-room) occupancy over the boundary with connected-component
// labels; doors should open into the biggest free region they can reach.
class CorridorMap {
  public:
    CorridorMap(const FloorPlan& plan, double step = 0.1)
        : origin_(plan.boundary.origin), step_(step),
          nx_(std::max(1, static_cast<int>(std::ceil(plan.boundary.width / step - 1e-9)))),
          ny_(std::max(1, static_cast<int>(std::ceil(plan.boundary.depth / step - 1e-9)))),
          label_(static_cast<std::size_t>(nx_) * ny_, -1) {
        auto in_room = [&](double x, double y) {
            for (const Room& r : plan.rooms)
                if (x > r.origin.x + kCoordTol && x < r.origin.x + r.width - kCoordTol &&
                    y > r.origin.y + kCoordTol && y < r.origin.y + r.depth - kCoordTol)
                    return true;
            return false;
        };
        std::vector<bool> corridor(label_.size(), false);
        for (int iy = 0; iy < ny_; ++iy)
            for (int ix = 0; ix < nx_; ++ix)
                corridor[idx(ix, iy)] =
                    !in_room(origin_.x + (ix + 0.5) * step_, origin_.y + (iy + 0.5) * step_);

        int next = 0;
        for (int iy = 0; iy < ny_; ++iy) {
            for (int ix = 0; ix < nx_; ++ix) {
                if (!corridor[idx(ix, iy)] || label_[idx(ix, iy)] >= 0) continue;
                std::vector<std::pair<int, int>> stack{{ix, iy}};
                label_[idx(ix, iy)] = next;
                std::size_t count = 0;
                while (!stack.empty()) {
                    auto [cx, cy] = stack.back();
                    stack.pop_back();
                    ++count;
                    constexpr int dx[4] = {1, -1, 0, 0};
                    constexpr int dy[4] = {0, 0, 1, -1};
                    for (int d = 0; d < 4; ++d) {
                        const int mx = cx + dx[d], my = cy + dy[d];
                        if (mx < 0 || mx >= nx_ || my < 0 || my >= ny_) continue;
                        if (!corridor[idx(mx, my)] || label_[idx(mx, my)] >= 0) continue;
                        label_[idx(mx, my)] = next;
                        stack.emplace_back(mx, my);
                    }
                }
                sizes_.push_back(count);
                ++next;
            }
        }
    }

    // Component at a point, or nothing when the point is inside a room or
    // out of bounds.
    std::optional<std::size_t> component_at(Point2D p) const {
        const int ix = static_cast<int>(std::floor((p.x - origin_.x) / step_));
        const int iy = static_cast<int>(std::floor((p.y - origin_.y) / step_));
        if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return std::nullopt;
        const int l = label_[idx(ix, iy)];
        if (l < 0) return std::nullopt;
        return static_cast<std::size_t>(l);
    }

    std::size_t component_size(std::size_t c) const { return sizes_[c]; }

  private:
    std::size_t idx(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }

    Point2D origin_;
    double step_;
    int nx_, ny_;
    std::vector<int> label_;
    std::vector<std::size_t> sizes_;
};

// The wall whose segment contains [a, b] collinearly, if any.
inline std::optional<std::size_t> host_wall_for(const FloorPlan& plan, Point2D a, Point2D b) {
    for (std::size_t i = 0; i < plan.walls.size(); ++i) {
        const Wall& w = plan.walls[i];
        const Point2D d = w.b - w.a;
        const double len = w.length();
        if (len <= kMinWallLength) continue;
        if (std::abs(cross(d, a - w.a)) > kCoordTol * len) continue;
        if (std::abs(cross(d, b - w.a)) > kCoordTol * len) continue;
        const double ta = dot(a - w.a, d) / (len * len);
        const double tb = dot(b - w.a, d) / (len * len);
        if (ta >= -kCoordTol / len && ta <= 1.0 + kCoordTol / len && tb >= -kCoordTol / len &&
            tb <= 1.0 + kCoordTol / len)
            return i;
    }
    return std::nullopt;
}

// Candidate door positions on one room edge: maximal runs of the edge whose
// outer side is free space, annotated with the free component they open into.
inline void collect_door_spots(const FloorPlan& plan, const CorridorMap& corridors,
                               Point2D edge_a, Point2D edge_b, Point2D outward,
                               double door_width, std::vector<DoorSpot>& spots) {
    const double len = distance(edge_a, edge_b);
    if (len < door_width - kCoordTol) return;
    const Point2D dir = (1.0 / len) * (edge_b - edge_a);
    const double probe_out = 0.15;
    const double sample = 0.05;

    double run_start = -1.0;
    std::optional<std::size_t> run_component;
    auto flush_run = [&](double run_end) {
        if (run_start < 0.0 || !run_component) return;
        if (run_end - run_start < door_width - kCoordTol) {
            run_start = -1.0;
            run_component.reset();
            return;
        }
        DoorSpot spot;
        spot.span_lo = run_start;
        spot.span_hi = run_end;
        spot.component = *run_component;
        spot.component_size = corridors.component_size(*run_component);

        // Prefer the edge midpoint when the run allows it.
        const double mid = len / 2.0;
        double center = std::clamp(mid, run_start + door_width / 2.0, run_end - door_width / 2.0);
        const Point2D lo_pt = edge_a + (center - door_width / 2.0) * dir;
        const Point2D hi_pt = edge_a + (center + door_width / 2.0) * dir;
        const auto host = host_wall_for(plan, lo_pt, hi_pt);
        if (!host) {
            run_start = -1.0;
            run_component.reset();
            return;
        }
        const Wall& w = plan.walls[*host];
        const Point2D unit = (1.0 / w.length()) * (w.b - w.a);
        spot.wall = *host;
        // The wall may run opposite to the edge; the opening offset is the
        // lower of the two endpoint parameters either way.
        spot.offset = std::min(dot(lo_pt - w.a, unit), dot(hi_pt - w.a, unit));
        spots.push_back(spot);
        run_start = -1.0;
        run_component.reset();
    };

    for (double t = 0.0; t <= len + 1e-9; t += sample) {
        const double tt = std::min(t, len);
        const Point2D p = edge_a + tt * dir + probe_out * outward;
        const auto comp = corridors.component_at(p);
        const bool open = comp.has_value();
        if (open && run_start < 0.0) {
            run_start = tt;
            run_component = comp;
        } else if (open && run_component && comp != run_component) {
            flush_run(tt);             // component changed mid-edge: split the run
            run_start = tt;
            run_component = comp;
        } else if (!open && run_start >= 0.0) {
            flush_run(tt);
        }
    }
    if (run_start >= 0.0) flush_run(len);
}

}  // namespace detail

// Adds one door per room — centered on the room wall adjacent to the largest
// reachable free region — plus the outer entrance door centered on a width
// wall, then verifies the result validates and circulates.
inline LayoutProposal entity_agent(const LayoutProposal& proposal, const JointDesignTask& task) {
    FloorPlan plan = proposal.plan;
    const std::size_t door_mat = detail::require_material(plan, task.door_material);

    // Outer door: centered on the south wall, or the north wall if a room
    // blocks the south center.
    const double cx = plan.boundary.origin.x + plan.boundary.width / 2.0;
    bool outer_placed = false;
    for (const double y : {plan.boundary.origin.y, plan.boundary.max_y()}) {
        const Point2D a{cx - task.outer_door_width / 2.0, y};
        const Point2D b{cx + task.outer_door_width / 2.0, y};
        bool blocked = false;
        for (const Room& r : plan.rooms) {
            const Rect rect = r.rect();
            const bool near_wall = std::abs(y - plan.boundary.origin.y) <= kCoordTol
                                       ? rect.origin.y <= y + 0.15
                                       : rect.max_y() >= y - 0.15;
            if (near_wall && a.x < rect.max_x() + 0.1 && b.x > rect.origin.x - 0.1)
                blocked = true;
        }
        if (blocked) continue;
        if (const auto host = detail::host_wall_for(plan, a, b)) {
            const Wall& w = plan.walls[*host];
            const Point2D unit = (1.0 / w.length()) * (w.b - w.a);
            const double offset = std::min(dot(a - w.a, unit), dot(b - w.a, unit));
            plan.add_opening(*host,
                             std::clamp(offset, 0.0, w.length() - task.outer_door_width),
                             task.outer_door_width, OpeningKind::Door, door_mat);
            outer_placed = true;
            break;
        }
    }
    if (!outer_placed)
        throw NoValidDoorPlacement("entity_agent: no clear stretch for the outer door");

    const detail::CorridorMap corridors(plan);
    for (const Room& room : plan.rooms) {
        const Rect r = room.rect();
        std::vector<detail::DoorSpot> spots;
        auto near = [](double a, double b) { return std::abs(a - b) <= kCoordTol; };
        // Interior-facing edges only (S, N, W, E order).
        if (!near(r.origin.y, plan.boundary.origin.y))
            detail::collect_door_spots(plan, corridors, r.origin, {r.max_x(), r.origin.y},
                                       {0, -1}, task.door_width, spots);
        if (!near(r.max_y(), plan.boundary.max_y()))
            detail::collect_door_spots(plan, corridors, {r.origin.x, r.max_y()},
                                       {r.max_x(), r.max_y()}, {0, 1}, task.door_width, spots);
        if (!near(r.origin.x, plan.boundary.origin.x))
            detail::collect_door_spots(plan, corridors, r.origin, {r.origin.x, r.max_y()},
                                       {-1, 0}, task.door_width, spots);
        if (!near(r.max_x(), plan.boundary.max_x()))
            detail::collect_door_spots(plan, corridors, {r.max_x(), r.origin.y},
                                       {r.max_x(), r.max_y()}, {1, 0}, task.door_width, spots);

        if (spots.empty())
            throw NoValidDoorPlacement("entity_agent: " + room.label +
                                       " has no wall bordering free space");
        std::stable_sort(spots.begin(), spots.end(),
                         [](const detail::DoorSpot& a, const detail::DoorSpot& b) {
                             return a.component_size > b.component_size;
                         });
        const detail::DoorSpot& pick = spots.front();
        plan.add_opening(pick.wall, pick.offset, task.door_width, OpeningKind::Door, door_mat);
    }

    LayoutProposal out;
    out.plan = std::move(plan);
    out.provenance = proposal.provenance + "+entity-rule";
    out.rationale = "one door per room toward the largest free region, entrance centered";

    if (!validate_plan(out.plan, rules_of(task)).empty())
        throw NoValidDoorPlacement("entity_agent: door placement failed validation for " +
                                   proposal.provenance);
    return out;
}

// ============================================================================
// Network design and correction agents
// ============================================================================

// Runs the configured proposer against the finished plan.
inline OptimizationTrace iwn_design_agent(const FloorPlan& plan, const JointDesignTask& task,
                                          const Proposer& proposer) {
    return optimize_loop(planning_task_for(task, plan), proposer);
}

// Moves illegal APs (outside the boundary or hugging a wall) to the nearest
// position with at least 0.1 m clearance on a 0.05 m local lattice; legal
// APs pass through untouched, so the agent is idempotent.
inline Deployment correction_agent(const FloorPlan& plan, const Deployment& deployment) {
    Deployment out = deployment;
    for (Point2D& ap : out.aps) {
        if (!deployment_violation(plan, {{ap}, deployment.config})) continue;
        const auto fixed = nearest_clear_position(plan, ap, 0.1, 0.05);
        if (!fixed)
            throw NoValidPosition("correction_agent: plan has no free space for an AP");
        ap = *fixed;
    }
    return out;
}

// ============================================================================
// Evaluation / update agent
// ============================================================================

inline RationalityChecks run_rationality_checks(const FloorPlan& plan,
                                                const JointDesignTask& task) {
    RationalityChecks checks;

    checks.anchoring = !plan.rooms.empty();
    for (const Room& room : plan.rooms)
        if (!detail::room_anchored_to_boundary(plan, room)) checks.anchoring = false;

    checks.non_overlap = true;
    for (std::size_t i = 0; i < plan.rooms.size(); ++i)
        for (std::size_t j = i + 1; j < plan.rooms.size(); ++j)
            if (detail::rooms_overlap(plan.rooms[i], plan.rooms[j])) checks.non_overlap = false;

    bool has_outer = detail::find_outer_door(plan).has_value();
    checks.door_rule = has_outer;
    for (const Room& room : plan.rooms) {
        int doors = 0;
        for (const Opening& op : plan.openings) {
            if (op.kind != OpeningKind::Door) continue;
            const Segment span = detail::opening_span(plan, op);
            if (detail::on_boundary_edge(plan, span)) continue;
            if (!detail::on_room_perimeter(room, span)) continue;
            ++doors;
            if (std::abs(op.width - task.door_width) > kCoordTol) checks.door_rule = false;
            if (op.material >= plan.materials.size() ||
                plan.materials[op.material].name != task.door_material)
                checks.door_rule = false;
        }
        if (doors != 1) checks.door_rule = false;
    }

    checks.circulation = false;
    if (has_outer) {
        try {
            checks.circulation = check_circulation(plan);
        } catch (const InvalidPlan&) {
            checks.circulation = false;
        }
    }
    return checks;
}

inline JointScore score_candidate(const FloorPlan& plan, const OptimizationTrace& trace,
                                  const JointDesignTask& task) {
    JointScore score;
    score.checks = run_rationality_checks(plan, task);
    score.rationality = score.checks.fraction();
    if (!trace.steps.empty() && trace.best().feedback.valid()) {
        score.coverage = trace.best().feedback.stats.coverage_fraction;
        score.ap_count = trace.best().deployment.aps.size();
    }
    score.iwn_efficiency =
        score.ap_count > 0 ? score.coverage / static_cast<double>(score.ap_count) : 0.0;
    score.overall = task.w_coverage * score.coverage + task.w_rationality * score.rationality;
    return score;
}

struct EvaluationResult {
    std::vector<JointScore> scores;
    std::size_t best_index = 0;
    std::string feedback;   // becomes the next round's GlobalFeedback text
};

// Scores every candidate, picks the best (ties: fewer APs, then lower index),
// and writes the between-round feedback summary.
inline EvaluationResult evaluation_update_agent(
    const std::vector<std::pair<LayoutProposal, OptimizationTrace>>& candidates,
    const JointDesignTask& task) {
    if (candidates.empty())
        throw InvalidParams("evaluation_update_agent: candidates must be nonempty");

    EvaluationResult result;
    for (const auto& [layout, trace] : candidates)
        result.scores.push_back(score_candidate(layout.plan, trace, task));

    std::size_t best = 0, worst = 0;
    for (std::size_t i = 1; i < result.scores.size(); ++i) {
        const JointScore& s = result.scores[i];
        const JointScore& b = result.scores[best];
        if (s.overall > b.overall ||
            (s.overall == b.overall && s.ap_count < b.ap_count))
            best = i;
        if (s.overall < result.scores[worst].overall) worst = i;
    }
    result.best_index = best;

    int failed_counts[4] = {0, 0, 0, 0};
    for (const JointScore& s : result.scores) {
        if (!s.checks.anchoring) ++failed_counts[0];
        if (!s.checks.door_rule) ++failed_counts[1];
        if (!s.checks.circulation) ++failed_counts[2];
        if (!s.checks.non_overlap) ++failed_counts[3];
    }
    static const char* kCheckNames[4] = {"anchoring", "door-rule", "circulation", "non-overlap"};
    int dominant = 0;
    for (int i = 1; i < 4; ++i)
        if (failed_counts[i] > failed_counts[dominant]) dominant = i;

    const JointScore& bs = result.scores[best];
    std::string text =
        "best candidate " + std::to_string(best) + ": overall " + detail::fmt("%.3f", bs.overall) +
        " (coverage " + detail::fmt("%.1f", bs.coverage * 100.0) + "% with " +
        std::to_string(bs.ap_count) + " APs, rationality " + detail::fmt("%.2f", bs.rationality) +
        "); worst candidate " + std::to_string(worst) + ": overall " +
        detail::fmt("%.3f", result.scores[worst].overall);
    if (failed_counts[dominant] > 0)
        text += "; most failed check: " + std::string(kCheckNames[dominant]) + " (" +
                std::to_string(failed_counts[dominant]) + " of " +
                std::to_string(result.scores.size()) + " candidates)";
    else
        text += "; all checks passed";
    result.feedback = std::move(text);
    return result;
}

// ============================================================================
// Joint pipeline
// ============================================================================

struct JointBackends {
    Proposer iwn_proposer = make_lattice_cover_proposer();
    std::optional<LlmEndpointConfig> layout_endpoint;   // engages the llm layout backend
    std::string layout_knowledge;
};

struct CandidateRecord {
    LayoutProposal layout;
    OptimizationTrace trace;      // empty when the candidate never reached design
    JointScore score;
    bool feasible = false;
    std::string failure;          // why an infeasible candidate dropped out
};

struct RoundRecord {
    std::size_t round = 0;
    std::vector<CandidateRecord> candidates;
    std::size_t best_index = 0;
    std::string feedback;
};

struct JointDesignResult {
    LayoutProposal best_layout;
    OptimizationTrace best_trace;
    JointScore best_score;
    std::vector<RoundRecord> rounds;
};

// Full loop: layout -> entity -> network design -> correction -> evaluation,
// feeding each round's summary (and best layout) back into the next. The
// returned best is retained across rounds, so its overall score never
// decreases round over round.
inline JointDesignResult joint_design_pipeline(const JointDesignTask& task,
                                               const JointBackends& backends = {}) {
    if (const auto why = task_violation(task))
        throw InvalidParams("joint_design_pipeline: " + *why);

    JointDesignResult result;
    bool have_best = false;
    std::optional<GlobalFeedback> feedback;

    for (std::size_t round = 1; round <= task.max_rounds; ++round) {
        const std::uint64_t round_seed = task.seed + 7919 * (round - 1);
        std::vector<LayoutProposal> layouts =
            backends.layout_endpoint
                ? layout_agent_llm(task, feedback, round_seed, *backends.layout_endpoint,
                                   backends.layout_knowledge)
                : layout_agent(task, feedback, round_seed);

        RoundRecord record;
        record.round = round;
        std::vector<std::pair<LayoutProposal, OptimizationTrace>> scored;
        std::vector<std::size_t> scored_to_record;

        for (std::size_t c = 0; c < layouts.size(); ++c) {
            CandidateRecord cr;
            cr.layout = layouts[c];
            try {
                LayoutProposal furnished = entity_agent(layouts[c], task);
                OptimizationTrace trace =
                    iwn_design_agent(furnished.plan, task, backends.iwn_proposer);
                if (!trace.steps.empty()) {
                    // Correction pass; optimizer output is already legal, so
                    // this is the identity unless a backend misbehaved.
                    const Deployment fixed =
                        correction_agent(furnished.plan, trace.best().deployment);
                    Step& best_step = trace.steps[trace.best_index];
                    if (fixed.aps != best_step.deployment.aps) {
                        best_step.deployment = fixed;
                        best_step.feedback = detail::graded_feedback(
                            planning_task_for(task, furnished.plan),
                            best_step.feedback.iteration,
                            compute_grid(furnished.plan, fixed, task.cell_size));
                    }
                }
                cr.layout = std::move(furnished);
                cr.trace = std::move(trace);
                cr.feasible = true;
            } catch (const NoValidDoorPlacement& e) {
                cr.failure = e.what();
            }
            if (cr.feasible) {
                scored.emplace_back(cr.layout, cr.trace);
                scored_to_record.push_back(record.candidates.size());
            }
            record.candidates.push_back(std::move(cr));
        }

        if (!scored.empty()) {
            const EvaluationResult eval = evaluation_update_agent(scored, task);
            for (std::size_t i = 0; i < eval.scores.size(); ++i)
                record.candidates[scored_to_record[i]].score = eval.scores[i];
            record.best_index = scored_to_record[eval.best_index];
            record.feedback = eval.feedback;

            const CandidateRecord& round_best = record.candidates[record.best_index];
            const bool better =
                !have_best || round_best.score.overall > result.best_score.overall ||
                (round_best.score.overall == result.best_score.overall &&
                 round_best.score.ap_count < result.best_score.ap_count);
            if (better) {
                result.best_layout = round_best.layout;
                result.best_trace = round_best.trace;
                result.best_score = round_best.score;
                have_best = true;
            }
            feedback = GlobalFeedback{record.feedback, result.best_layout.plan};
        } else {
            record.feedback = "no feasible candidates this round";
            if (feedback) feedback->text = record.feedback;
        }
        result.rounds.push_back(std::move(record));

        if (have_best && result.best_score.rationality == 1.0 &&
            result.best_score.coverage >= task.coverage_target)
            break;   // design satisfies every requirement; later rounds cannot lose it
    }

    if (!have_best)
        throw NoFeasibleLayout("joint_design_pipeline: no candidate survived any round");
    return result;
}

}  // namespace iplan
