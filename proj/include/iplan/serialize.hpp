#pragma once

// File formats: floor plans and deployments as JSON documents, optimization
// traces as JSONL (one step per line plus a trailer), and the run
// configuration consumed by the command-line tool. Field names and number
// formatting are stable so identical inputs serialize to identical bytes.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iplan/agents.hpp"
#include "iplan/metaheuristics.hpp"
#include "iplan/optimize.hpp"

namespace iplan {

// Shape or type problem in an input document; the message names the
// offending field.
struct PlanFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

using nlohmann::json;

inline double number_at(const json& node, const std::string& where) {
    if (!node.is_number()) throw PlanFormatError(where + " must be a number");
    return node.get<double>();
}

inline double number_field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw PlanFormatError(where + " is missing '" + key + "'");
    return number_at(obj[key], where + "." + key);
}

inline std::string string_field(const json& obj, const std::string& key,
                                const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw PlanFormatError(where + " is missing '" + key + "'");
    if (!obj[key].is_string()) throw PlanFormatError(where + "." + key + " must be a string");
    return obj[key].get<std::string>();
}

inline Point2D point_field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw PlanFormatError(where + " is missing '" + key + "'");
    const json& p = obj[key];
    return {number_field(p, "x", where + "." + key), number_field(p, "y", where + "." + key)};
}

inline const json& array_field(const json& obj, const std::string& key,
                               const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw PlanFormatError(where + " is missing '" + key + "'");
    if (!obj[key].is_array()) throw PlanFormatError(where + "." + key + " must be an array");
    return obj[key];
}

inline json point_json(Point2D p) { return json{{"x", p.x}, {"y", p.y}}; }

}  // namespace detail

// ============================================================================
// Floor plans
// ============================================================================

inline nlohmann::json plan_to_json(const FloorPlan& plan) {
    using nlohmann::json;
    json doc;
    doc["boundary"] = {{"origin", detail::point_json(plan.boundary.origin)},
                       {"width", plan.boundary.width},
                       {"depth", plan.boundary.depth}};
    doc["materials"] = json::array();
    for (const Material& m : plan.materials)
        doc["materials"].push_back({{"name", m.name}, {"attenuation_db", m.attenuation_db}});
    doc["walls"] = json::array();
    for (const Wall& w : plan.walls)
        doc["walls"].push_back({{"a", detail::point_json(w.a)},
                                {"b", detail::point_json(w.b)},
                                {"material", plan.materials[w.material].name},
                                {"thickness", w.thickness}});
    doc["openings"] = json::array();
    for (const Opening& op : plan.openings)
        doc["openings"].push_back({{"wall", op.wall},
                                   {"offset", op.offset},
                                   {"width", op.width},
                                   {"kind", op.kind == OpeningKind::Door ? "door" : "window"},
                                   {"material", plan.materials[op.material].name}});
    doc["rooms"] = json::array();
    for (const Room& r : plan.rooms)
        doc["rooms"].push_back({{"x", r.origin.x},
                                {"y", r.origin.y},
                                {"width", r.width},
                                {"depth", r.depth},
                                {"label", r.label}});
    return doc;
}

inline FloorPlan plan_from_json(const nlohmann::json& doc) {
    using nlohmann::json;
    if (!doc.is_object()) throw PlanFormatError("plan document must be an object");

    FloorPlan plan;
    if (!doc.contains("boundary")) throw PlanFormatError("plan is missing 'boundary'");
    const json& boundary = doc["boundary"];
    plan.boundary = {detail::point_field(boundary, "origin", "boundary"),
                     detail::number_field(boundary, "width", "boundary"),
                     detail::number_field(boundary, "depth", "boundary")};

    const json& materials = detail::array_field(doc, "materials", "plan");
    for (std::size_t i = 0; i < materials.size(); ++i) {
        const std::string where = "materials[" + std::to_string(i) + "]";
        plan.add_material(detail::string_field(materials[i], "name", where),
                          detail::number_field(materials[i], "attenuation_db", where));
    }

    auto material_index = [&](const json& obj, const std::string& where) {
        const std::string name = detail::string_field(obj, "material", where);
        if (const auto idx = plan.find_material(name)) return *idx;
        throw PlanFormatError(where + ".material names unknown material '" + name + "'");
    };

    if (doc.contains("walls")) {
        const json& walls = detail::array_field(doc, "walls", "plan");
        for (std::size_t i = 0; i < walls.size(); ++i) {
            const std::string where = "walls[" + std::to_string(i) + "]";
            const double thickness = walls[i].is_object() && walls[i].contains("thickness")
                                         ? detail::number_field(walls[i], "thickness", where)
                                         : 0.1;
            plan.add_wall(detail::point_field(walls[i], "a", where),
                          detail::point_field(walls[i], "b", where),
                          material_index(walls[i], where), thickness);
        }
    }
    if (doc.contains("openings")) {
        const json& openings = detail::array_field(doc, "openings", "plan");
        for (std::size_t i = 0; i < openings.size(); ++i) {
            const std::string where = "openings[" + std::to_string(i) + "]";
            const std::string kind = detail::string_field(openings[i], "kind", where);
            if (kind != "door" && kind != "window")
                throw PlanFormatError(where + ".kind must be 'door' or 'window'");
            const double wall_idx = detail::number_field(openings[i], "wall", where);
            if (wall_idx < 0 || wall_idx != std::floor(wall_idx) ||
                wall_idx >= static_cast<double>(plan.walls.size()))
                throw PlanFormatError(where + ".wall must index one of the " +
                                      std::to_string(plan.walls.size()) + " walls");
            plan.add_opening(static_cast<std::size_t>(wall_idx),
                             detail::number_field(openings[i], "offset", where),
                             detail::number_field(openings[i], "width", where),
                             kind == "door" ? OpeningKind::Door : OpeningKind::Window,
                             material_index(openings[i], where));
        }
    }
    if (doc.contains("rooms")) {
        const json& rooms = detail::array_field(doc, "rooms", "plan");
        for (std::size_t i = 0; i < rooms.size(); ++i) {
            const std::string where = "rooms[" + std::to_string(i) + "]";
            plan.add_room({detail::number_field(rooms[i], "x", where),
                           detail::number_field(rooms[i], "y", where)},
                          detail::number_field(rooms[i], "width", where),
                          detail::number_field(rooms[i], "depth", where),
                          rooms[i].is_object() && rooms[i].contains("label")
                              ? detail::string_field(rooms[i], "label", where)
                              : "");
        }
    }
    return plan;
}

inline FloorPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read plan file '" + path + "'");
    const nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw PlanFormatError("file '" + path + "' is not valid JSON");
    return plan_from_json(doc);
}

inline void save_plan(const FloorPlan& plan, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write plan file '" + path + "'");
    out << plan_to_json(plan).dump(2) << "\n";
    if (!out) throw IoError("failed while writing '" + path + "'");
}

// ============================================================================
// Deployments
// ============================================================================

inline nlohmann::json deployment_to_json(const Deployment& deployment) {
    nlohmann::json doc;
    doc["aps"] = nlohmann::json::array();
    for (const Point2D& ap : deployment.aps) doc["aps"].push_back(detail::point_json(ap));
    doc["radio"] = {{"frequency_mhz", deployment.config.frequency_mhz},
                    {"reference_pathloss_db", deployment.config.reference_pathloss_db},
                    {"reference_distance_m", deployment.config.reference_distance_m},
                    {"pathloss_exponent", deployment.config.pathloss_exponent}};
    return doc;
}

inline RadioConfig radio_from_json(const nlohmann::json& node, const std::string& where) {
    RadioConfig config;
    if (!node.is_object()) throw PlanFormatError(where + " must be an object");
    if (node.contains("frequency_mhz"))
        config.frequency_mhz = detail::number_field(node, "frequency_mhz", where);
    if (node.contains("reference_pathloss_db"))
        config.reference_pathloss_db = detail::number_field(node, "reference_pathloss_db", where);
    if (node.contains("reference_distance_m"))
        config.reference_distance_m = detail::number_field(node, "reference_distance_m", where);
    if (node.contains("pathloss_exponent"))
        config.pathloss_exponent = detail::number_field(node, "pathloss_exponent", where);
    if (!config.valid()) throw PlanFormatError(where + " has non-physical radio parameters");
    return config;
}

inline Deployment deployment_from_json(const nlohmann::json& doc) {
    Deployment deployment;
    const nlohmann::json& aps = detail::array_field(doc, "aps", "deployment");
    for (std::size_t i = 0; i < aps.size(); ++i) {
        const std::string where = "aps[" + std::to_string(i) + "]";
        deployment.aps.push_back({detail::number_field(aps[i], "x", where),
                                  detail::number_field(aps[i], "y", where)});
    }
    if (doc.contains("radio")) deployment.config = radio_from_json(doc["radio"], "radio");
    return deployment;
}

inline Deployment load_deployment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read deployment file '" + path + "'");
    const nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw PlanFormatError("file '" + path + "' is not valid JSON");
    return deployment_from_json(doc);
}

inline void save_deployment(const Deployment& deployment, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write deployment file '" + path + "'");
    out << deployment_to_json(deployment).dump(2) << "\n";
    if (!out) throw IoError("failed while writing '" + path + "'");
}

// ============================================================================
// Traces (JSONL: one step per line, then a trailer object)
// ============================================================================

namespace detail {

inline std::string fingerprint_hex(std::uint64_t fp) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(fp));
    return buf;
}

}  // namespace detail

inline nlohmann::json step_to_json(const Step& step) {
    nlohmann::json line;
    line["iteration"] = step.feedback.iteration;
    line["aps"] = nlohmann::json::array();
    for (const Point2D& ap : step.deployment.aps) line["aps"].push_back(detail::point_json(ap));
    if (step.feedback.valid()) {
        const CoverageStats& s = step.feedback.stats;
        line["stats"] = {{"coverage", s.coverage_fraction},
                         {"covered_cells", s.covered_cells},
                         {"total_cells", s.total_cells},
                         {"worst_cell", detail::point_json(s.worst_cell)},
                         {"worst_pathloss_db", s.worst_pathloss_db}};
    } else {
        line["violation"] = step.feedback.violation;
    }
    if (!step.feedback.grid_summary.empty()) {
        line["worst_regions"] = nlohmann::json::array();
        for (const WorstRegion& region : step.feedback.grid_summary)
            line["worst_regions"].push_back({{"center", detail::point_json(region.center)},
                                             {"pathloss_db", region.pathloss_db}});
    }
    return line;
}

inline void save_trace_jsonl(const OptimizationTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write trace file '" + path + "'");
    for (const Step& step : trace.steps) out << step_to_json(step).dump() << "\n";
    nlohmann::json trailer;
    trailer["outcome"] = to_string(trace.outcome);
    trailer["best_iteration"] = trace.steps.empty() ? 0 : trace.best().feedback.iteration;
    trailer["task_fingerprint"] = detail::fingerprint_hex(trace.task_fingerprint);
    out << trailer.dump() << "\n";
    if (!out) throw IoError("failed while writing '" + path + "'");
}

inline OptimizationTrace load_trace_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read trace file '" + path + "'");

    OptimizationTrace trace;
    std::optional<nlohmann::json> trailer;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded())
            throw PlanFormatError("trace line " + std::to_string(lineno) + " is not valid JSON");
        if (doc.contains("outcome")) {
            trailer = doc;
            continue;
        }
        const std::string where = "trace line " + std::to_string(lineno);
        Step step;
        step.feedback.iteration =
            static_cast<std::size_t>(detail::number_field(doc, "iteration", where));
        for (const auto& ap : detail::array_field(doc, "aps", where))
            step.deployment.aps.push_back(
                {detail::number_field(ap, "x", where), detail::number_field(ap, "y", where)});
        if (doc.contains("violation")) {
            step.feedback.violation = detail::string_field(doc, "violation", where);
        } else if (doc.contains("stats")) {
            const nlohmann::json& s = doc["stats"];
            step.feedback.stats.coverage_fraction = detail::number_field(s, "coverage", where);
            step.feedback.stats.covered_cells =
                static_cast<std::size_t>(detail::number_field(s, "covered_cells", where));
            step.feedback.stats.total_cells =
                static_cast<std::size_t>(detail::number_field(s, "total_cells", where));
            step.feedback.stats.worst_cell = detail::point_field(s, "worst_cell", where);
            step.feedback.stats.worst_pathloss_db =
                detail::number_field(s, "worst_pathloss_db", where);
        } else {
            throw PlanFormatError(where + " has neither 'stats' nor 'violation'");
        }
        if (doc.contains("worst_regions"))
            for (const auto& region : detail::array_field(doc, "worst_regions", where)) {
                WorstRegion r;
                r.center = detail::point_field(region, "center", where + ".worst_regions");
                r.pathloss_db =
                    detail::number_field(region, "pathloss_db", where + ".worst_regions");
                step.feedback.grid_summary.push_back(r);
            }
        trace.steps.push_back(std::move(step));
    }
    if (!trailer) throw PlanFormatError("trace file '" + path + "' has no trailer line");

    const std::string outcome = detail::string_field(*trailer, "outcome", "trace trailer");
    if (outcome == "converged")
        trace.outcome = Outcome::Converged;
    else if (outcome == "exhausted")
        trace.outcome = Outcome::Exhausted;
    else
        throw PlanFormatError("trace trailer outcome '" + outcome + "' is unknown");
    const std::string fp = detail::string_field(*trailer, "task_fingerprint", "trace trailer");
    trace.task_fingerprint = std::strtoull(fp.c_str(), nullptr, 16);

    const auto best_iter =
        static_cast<std::size_t>(detail::number_field(*trailer, "best_iteration", "trailer"));
    trace.best_index = 0;
    for (std::size_t i = 0; i < trace.steps.size(); ++i)
        if (trace.steps[i].feedback.iteration == best_iter) trace.best_index = i;
    return trace;
}

// ============================================================================
// Run configuration
// ============================================================================

enum class OptimizerKind { Greedy, Aco, Anneal, Llm, Scripted };

inline std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::Greedy: return "greedy";
        case OptimizerKind::Aco: return "aco";
        case OptimizerKind::Anneal: return "anneal";
        case OptimizerKind::Llm: return "llm";
        case OptimizerKind::Scripted: return "scripted";
    }
    return "greedy";
}

inline std::optional<OptimizerKind> optimizer_kind_from(const std::string& name) {
    if (name == "greedy") return OptimizerKind::Greedy;
    if (name == "aco") return OptimizerKind::Aco;
    if (name == "anneal") return OptimizerKind::Anneal;
    if (name == "llm") return OptimizerKind::Llm;
    if (name == "scripted") return OptimizerKind::Scripted;
    return std::nullopt;
}

struct RunConfig {
    std::string plan_path;
    PlanningTask task;            // task.plan filled after loading plan_path
    OptimizerKind optimizer = OptimizerKind::Greedy;
    AcoParams aco;
    AnnealParams anneal;
    std::vector<Deployment> script;   // optimizer=scripted plays these back in order
    LlmEndpointConfig llm;
    std::string knowledge_path;   // optional planning-rules text for llm prompts
    std::uint64_t seed = 0;
    std::string output_dir = "runs";
    std::string run_id;           // empty: derived from wall clock + seed at run time
    JointDesignTask joint;
};

// Merges a config document onto defaults. Unknown sections are rejected so a
// typo cannot silently fall back to defaults.
inline RunConfig run_config_from_json(const nlohmann::json& doc) {
    using nlohmann::json;
    if (!doc.is_object()) throw PlanFormatError("config document must be an object");

    static const std::vector<std::string> known = {"plan",      "task",   "radio", "optimizer",
                                                   "llm",       "joint",  "seed",  "output_dir",
                                                   "knowledge", "run_id"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        bool ok = false;
        for (const std::string& k : known) ok = ok || k == key;
        if (!ok) throw PlanFormatError("config has unknown section '" + key + "'");
    }

    RunConfig config;
    if (doc.contains("plan")) {
        if (!doc["plan"].is_string()) throw PlanFormatError("config.plan must be a path string");
        config.plan_path = doc["plan"].get<std::string>();
    }
    if (doc.contains("task")) {
        const json& t = doc["task"];
        if (!t.is_object()) throw PlanFormatError("config.task must be an object");
        if (t.contains("coverage_target"))
            config.task.coverage_target = detail::number_field(t, "coverage_target", "task");
        if (t.contains("threshold_db"))
            config.task.threshold_db = detail::number_field(t, "threshold_db", "task");
        if (t.contains("max_aps"))
            config.task.max_aps =
                static_cast<std::size_t>(detail::number_field(t, "max_aps", "task"));
        if (t.contains("max_iterations"))
            config.task.max_iterations =
                static_cast<std::size_t>(detail::number_field(t, "max_iterations", "task"));
        if (t.contains("cell_size"))
            config.task.cell_size = detail::number_field(t, "cell_size", "task");
    }
    if (doc.contains("radio")) config.task.radio = radio_from_json(doc["radio"], "radio");
    if (doc.contains("optimizer")) {
        const json& o = doc["optimizer"];
        if (!o.is_object()) throw PlanFormatError("config.optimizer must be an object");
        if (o.contains("kind")) {
            const std::string name = detail::string_field(o, "kind", "optimizer");
            const auto kind = optimizer_kind_from(name);
            if (!kind) throw PlanFormatError("optimizer.kind '" + name + "' is unknown");
            config.optimizer = *kind;
        }
        if (o.contains("n_ants"))
            config.aco.n_ants =
                static_cast<std::size_t>(detail::number_field(o, "n_ants", "optimizer"));
        if (o.contains("alpha")) config.aco.alpha = detail::number_field(o, "alpha", "optimizer");
        if (o.contains("beta")) config.aco.beta = detail::number_field(o, "beta", "optimizer");
        if (o.contains("evaporation"))
            config.aco.evaporation = detail::number_field(o, "evaporation", "optimizer");
        if (o.contains("lattice_spacing"))
            config.aco.lattice_spacing =
                detail::number_field(o, "lattice_spacing", "optimizer");
        if (o.contains("initial_temperature"))
            config.anneal.initial_temperature =
                detail::number_field(o, "initial_temperature", "optimizer");
        if (o.contains("cooling"))
            config.anneal.cooling = detail::number_field(o, "cooling", "optimizer");
        if (o.contains("move_scale"))
            config.anneal.move_scale = detail::number_field(o, "move_scale", "optimizer");
        if (o.contains("script"))
            for (const auto& entry : detail::array_field(o, "script", "optimizer")) {
                Deployment d;
                for (const auto& ap : detail::array_field(entry, "aps", "optimizer.script"))
                    d.aps.push_back({detail::number_field(ap, "x", "optimizer.script"),
                                     detail::number_field(ap, "y", "optimizer.script")});
                config.script.push_back(std::move(d));
            }
    }
    if (doc.contains("llm")) {
        const json& l = doc["llm"];
        if (!l.is_object()) throw PlanFormatError("config.llm must be an object");
        if (l.contains("base_url")) config.llm.base_url = detail::string_field(l, "base_url", "llm");
        if (l.contains("model")) config.llm.model = detail::string_field(l, "model", "llm");
        if (l.contains("api_key_env"))
            config.llm.api_key_env = detail::string_field(l, "api_key_env", "llm");
        if (l.contains("temperature"))
            config.llm.temperature = detail::number_field(l, "temperature", "llm");
        if (l.contains("timeout_seconds"))
            config.llm.timeout_seconds = detail::number_field(l, "timeout_seconds", "llm");
        if (l.contains("max_retries"))
            config.llm.max_retries =
                static_cast<std::size_t>(detail::number_field(l, "max_retries", "llm"));
        if (l.contains("backoff_base_seconds"))
            config.llm.backoff_base_seconds =
                detail::number_field(l, "backoff_base_seconds", "llm");
    }
    if (doc.contains("joint")) {
        const json& j = doc["joint"];
        if (!j.is_object()) throw PlanFormatError("config.joint must be an object");
        JointDesignTask& joint = config.joint;
        if (j.contains("boundary_width"))
            joint.boundary_width = detail::number_field(j, "boundary_width", "joint");
        if (j.contains("boundary_depth"))
            joint.boundary_depth = detail::number_field(j, "boundary_depth", "joint");
        if (j.contains("outer_wall_material"))
            joint.outer_wall_material = detail::string_field(j, "outer_wall_material", "joint");
        if (j.contains("outer_door_width"))
            joint.outer_door_width = detail::number_field(j, "outer_door_width", "joint");
        if (j.contains("room_wall_material"))
            joint.room_wall_material = detail::string_field(j, "room_wall_material", "joint");
        if (j.contains("door_width"))
            joint.door_width = detail::number_field(j, "door_width", "joint");
        if (j.contains("door_material"))
            joint.door_material = detail::string_field(j, "door_material", "joint");
        if (j.contains("room_sizes")) {
            joint.room_sizes.clear();
            for (const auto& r : detail::array_field(j, "room_sizes", "joint"))
                joint.room_sizes.emplace_back(
                    detail::number_field(r, "width", "joint.room_sizes"),
                    detail::number_field(r, "depth", "joint.room_sizes"));
        }
        if (j.contains("coverage_target"))
            joint.coverage_target = detail::number_field(j, "coverage_target", "joint");
        if (j.contains("threshold_db"))
            joint.threshold_db = detail::number_field(j, "threshold_db", "joint");
        if (j.contains("max_aps"))
            joint.max_aps = static_cast<std::size_t>(detail::number_field(j, "max_aps", "joint"));
        if (j.contains("max_iterations"))
            joint.max_iterations =
                static_cast<std::size_t>(detail::number_field(j, "max_iterations", "joint"));
        if (j.contains("cell_size"))
            joint.cell_size = detail::number_field(j, "cell_size", "joint");
        if (j.contains("w_coverage"))
            joint.w_coverage = detail::number_field(j, "w_coverage", "joint");
        if (j.contains("w_rationality"))
            joint.w_rationality = detail::number_field(j, "w_rationality", "joint");
        if (j.contains("n_candidates"))
            joint.n_candidates =
                static_cast<std::size_t>(detail::number_field(j, "n_candidates", "joint"));
        if (j.contains("max_rounds"))
            joint.max_rounds =
                static_cast<std::size_t>(detail::number_field(j, "max_rounds", "joint"));
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned())
            throw PlanFormatError("config.seed must be an integer");
        config.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string())
            throw PlanFormatError("config.output_dir must be a string");
        config.output_dir = doc["output_dir"].get<std::string>();
    }
    if (doc.contains("knowledge")) {
        if (!doc["knowledge"].is_string())
            throw PlanFormatError("config.knowledge must be a path string");
        config.knowledge_path = doc["knowledge"].get<std::string>();
    }
    if (doc.contains("run_id")) {
        if (!doc["run_id"].is_string()) throw PlanFormatError("config.run_id must be a string");
        config.run_id = doc["run_id"].get<std::string>();
    }

    config.aco.seed = config.seed;
    config.anneal.seed = config.seed;
    config.joint.seed = config.seed;
    config.joint.radio = config.task.radio;
    // Script entries carry only positions; they transmit with the run's radio.
    for (Deployment& d : config.script) d.config = config.task.radio;
    return config;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    const nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw PlanFormatError("file '" + path + "' is not valid JSON");
    return run_config_from_json(doc);
}

}  // namespace iplan
