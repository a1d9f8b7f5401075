#pragma once

// LLM-backed proposer: assembles description / knowledge / perception prompts
// from the task and feedback history, talks to any OpenAI-compatible
// chat-completions endpoint, and parses strict JSON proposals out of free-form
// model replies. A scripted stand-in keeps the full pipeline testable offline.
//
// Secret handling: the API key is read from the environment variable named in
// the endpoint config at request time, used only for the Authorization
// header, and never copied into prompts, traces, or logs.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "iplan/optimize.hpp"

namespace iplan {

// ============================================================================
// Prompt assembly
// ============================================================================

struct PromptBundle {
    std::string description;      // serialized plan + objective
    std::string knowledge;        // domain rules of thumb, from the knowledge file
    std::string perception;       // rendered recent feedback history
    std::string system_preamble;

    std::size_t total_size() const {
        return description.size() + knowledge.size() + perception.size() +
               system_preamble.size();
    }
};

struct PromptOptions {
    std::size_t history_window = 5;    // perception renders the last m steps
    std::size_t char_budget = 24000;   // token-budget proxy over all sections
};

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::string fmt_point(Point2D p) {
    return "(" + fmt("%.3f", p.x) + ", " + fmt("%.3f", p.y) + ")";
}

inline std::string render_description(const PlanningTask& task) {
    const FloorPlan& plan = task.plan;
    std::string out;
    out += "boundary: " + fmt("%.3f", plan.boundary.width) + " x " +
           fmt("%.3f", plan.boundary.depth) + " m, origin " + fmt_point(plan.boundary.origin) +
           "\n";

    out += "materials:";
    for (const Material& m : plan.materials)
        out += " " + m.name + " " + fmt("%.1f", m.attenuation_db) + " dB,";
    if (!plan.materials.empty()) out.pop_back();
    out += "\n";

    out += "walls:\n";
    for (std::size_t i = 0; i < plan.walls.size(); ++i) {
        const Wall& w = plan.walls[i];
        out += "  " + std::to_string(i) + ": " + fmt_point(w.a) + "-" + fmt_point(w.b) + " " +
               plan.materials[w.material].name + "\n";
    }
    if (!plan.openings.empty()) {
        out += "openings:\n";
        for (std::size_t i = 0; i < plan.openings.size(); ++i) {
            const Opening& op = plan.openings[i];
            out += "  " + std::to_string(i) + ": " +
                   (op.kind == OpeningKind::Door ? std::string("door") : std::string("window")) +
                   " on wall " + std::to_string(op.wall) + ", offset " + fmt("%.3f", op.offset) +
                   " m, width " + fmt("%.3f", op.width) + " m, " +
                   plan.materials[op.material].name + "\n";
        }
    }
    if (!plan.rooms.empty()) {
        out += "rooms:\n";
        for (std::size_t i = 0; i < plan.rooms.size(); ++i) {
            const Room& r = plan.rooms[i];
            out += "  " + std::to_string(i) + ": " + (r.label.empty() ? "room" : r.label) +
                   " at " + fmt_point(r.origin) + ", " + fmt("%.3f", r.width) + " x " +
                   fmt("%.3f", r.depth) + " m\n";
        }
    }

    out += "objective: cover >= " + fmt("%.1f", task.coverage_target * 100.0) +
           "% of cells with pathloss < " + fmt("%.1f", task.threshold_db) + " dB\n";
    out += "budget: at most " + std::to_string(task.max_aps) + " APs\n";
    out += "radio: exponent " + fmt("%.2f", task.radio.pathloss_exponent) + ", reference " +
           fmt("%.2f", task.radio.reference_pathloss_db) + " dB at " +
           fmt("%.2f", task.radio.reference_distance_m) + " m, " +
           fmt("%.0f", task.radio.frequency_mhz) + " MHz";
    return out;
}

inline std::string render_step_line(const Step& step) {
    std::string out = "iteration " + std::to_string(step.feedback.iteration) + ": APs [";
    for (std::size_t i = 0; i < step.deployment.aps.size(); ++i) {
        if (i > 0) out += ", ";
        out += fmt_point(step.deployment.aps[i]);
    }
    out += "]";
    if (!step.feedback.valid()) {
        out += " → rejected: " + step.feedback.violation;
        return out;
    }
    out += " → coverage " + fmt("%.1f", step.feedback.stats.coverage_fraction * 100.0) +
           "%, worst regions [";
    for (std::size_t i = 0; i < step.feedback.grid_summary.size(); ++i) {
        if (i > 0) out += ", ";
        out += fmt_point(step.feedback.grid_summary[i].center) + " " +
               fmt("%.1f", step.feedback.grid_summary[i].pathloss_db) + " dB";
    }
    out += "]";
    return out;
}

}  // namespace detail

inline const char* default_system_preamble() {
    return "You are an indoor wireless network planner. Given a floor plan, a coverage "
           "objective, and feedback on earlier attempts, propose access point positions. "
           "Respond with a single JSON object of the form "
           "{\"aps\": [{\"x\": <meters>, \"y\": <meters>}, ...]} and nothing else.";
}

// Deterministic prompt renderer. The perception section shows the last
// `history_window` steps in chronological order; when the character budget
// is exceeded, the knowledge tail is trimmed first, then the oldest rendered
// steps are dropped.
inline PromptBundle build_prompt(const PlanningTask& task, const std::vector<Step>& history,
                                 const std::string& knowledge,
                                 const PromptOptions& options = {}) {
    PromptBundle bundle;
    bundle.system_preamble = default_system_preamble();
    bundle.description = detail::render_description(task);
    bundle.knowledge = knowledge;

    std::vector<std::string> lines;
    const std::size_t from =
        history.size() > options.history_window ? history.size() - options.history_window : 0;
    for (std::size_t i = from; i < history.size(); ++i)
        lines.push_back(detail::render_step_line(history[i]));

    auto render_perception = [&]() {
        if (lines.empty()) return std::string("no prior attempts");
        std::string out;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (i > 0) out += "\n";
            out += lines[i];
        }
        return out;
    };
    bundle.perception = render_perception();

    // Budget enforcement: knowledge first, then the oldest history lines.
    const std::size_t fixed = bundle.description.size() + bundle.system_preamble.size();
    if (bundle.total_size() > options.char_budget) {
        const std::size_t rest = fixed + bundle.perception.size();
        bundle.knowledge =
            rest >= options.char_budget
                ? std::string()
                : bundle.knowledge.substr(0, options.char_budget - rest);
    }
    while (bundle.total_size() > options.char_budget && !lines.empty()) {
        lines.erase(lines.begin());
        bundle.perception = render_perception();
    }
    return bundle;
}

// ============================================================================
// Proposal parsing
// ============================================================================

struct ParseResult {
    bool ok = false;
    Deployment deployment;
    std::string error;   // human-readable reason, fed back into the next prompt
};

namespace detail {

// Balanced top-level {...} spans, string-literal aware, in order of appearance.
inline std::vector<std::string> json_object_spans(const std::string& text) {
    std::vector<std::string> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{') {
            ++i;
            continue;
        }
        int depth = 0;
        bool in_string = false;
        std::size_t j = i;
        for (; j < text.size(); ++j) {
            const char c = text[j];
            if (in_string) {
                if (c == '\\')
                    ++j;
                else if (c == '"')
                    in_string = false;
            } else if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) break;
            }
        }
        if (j < text.size()) {
            spans.push_back(text.substr(i, j - i + 1));
            i = j + 1;
        } else {
            ++i;   // unbalanced; skip this brace
        }
    }
    return spans;
}

}  // namespace detail

// Extracts the first JSON object shaped {"aps": [{"x": ..., "y": ...}, ...]}
// from the reply (prose and code fences around it are fine) and validates it
// as a deployment for the task. Failures return a reason instead of a
// deployment; the proposer puts that reason in front of the model on retry.
inline ParseResult parse_proposal(const std::string& response_text, const PlanningTask& task) {
    ParseResult result;
    bool saw_aps = false;
    for (const std::string& span : detail::json_object_spans(response_text)) {
        nlohmann::json doc = nlohmann::json::parse(span, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("aps")) continue;
        saw_aps = true;

        const nlohmann::json& aps = doc["aps"];
        if (!aps.is_array() || aps.empty()) {
            result.error = "proposal field \"aps\" must be a nonempty array";
            return result;
        }
        Deployment d;
        d.config = task.radio;
        for (std::size_t i = 0; i < aps.size(); ++i) {
            const nlohmann::json& ap = aps[i];
            if (!ap.is_object() || !ap.contains("x") || !ap.contains("y") ||
                !ap["x"].is_number() || !ap["y"].is_number()) {
                result.error =
                    "proposal aps[" + std::to_string(i) + "] must have numeric x and y";
                return result;
            }
            d.aps.push_back({ap["x"].get<double>(), ap["y"].get<double>()});
        }
        if (const auto why = deployment_violation(task.plan, d, task.max_aps)) {
            result.error = *why;
            return result;
        }
        result.ok = true;
        result.deployment = std::move(d);
        return result;
    }
    result.error = saw_aps ? "proposal could not be interpreted"
                           : "no JSON object with an \"aps\" array found in the reply";
    return result;
}

// ============================================================================
// Endpoint client
// ============================================================================

struct LlmEndpointConfig {
    std::string base_url = "http://127.0.0.1:8080";   // scheme://host[:port][/prefix]
    std::string model = "local-model";
    std::string api_key_env = "IPLAN_API_KEY";        // name only; value never stored
    double temperature = 0.2;
    double timeout_seconds = 30.0;
    std::size_t max_retries = 2;              // extra attempts after the first call
    double backoff_base_seconds = 1.0;        // doubles per retry
};

struct EndpointUnreachable : ProposerError {
    explicit EndpointUnreachable(const std::string& msg) : ProposerError(msg, true) {}
};

struct AuthFailure : ProposerError {
    explicit AuthFailure(const std::string& msg) : ProposerError(msg, false) {}
};

struct RateLimited : ProposerError {
    explicit RateLimited(const std::string& msg) : ProposerError(msg, true) {}
};

namespace detail {

struct ParsedUrl {
    std::string host_port;   // scheme://host[:port]
    std::string prefix;      // path prefix, possibly empty
};

inline ParsedUrl split_base_url(const std::string& base_url) {
    const std::size_t scheme = base_url.find("://");
    const std::size_t path_start =
        scheme == std::string::npos ? base_url.find('/') : base_url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

// One HTTP attempt. Outcomes: assistant text, a retryable failure message,
// or a thrown non-retryable error (auth).
struct AttemptOutcome {
    bool ok = false;
    bool rate_limited = false;   // retryable, but reported as RateLimited when final
    std::string text;            // assistant text or failure description
};

inline AttemptOutcome chat_completion_attempt(const PromptBundle& bundle,
                                              const LlmEndpointConfig& endpoint) {
    const ParsedUrl url = split_base_url(endpoint.base_url);
    httplib::Client client(url.host_port);
    const auto timeout_s = static_cast<time_t>(endpoint.timeout_seconds);
    const auto timeout_us =
        static_cast<time_t>((endpoint.timeout_seconds - static_cast<double>(timeout_s)) * 1e6);
    client.set_connection_timeout(timeout_s, timeout_us);
    client.set_read_timeout(timeout_s, timeout_us);
    client.set_write_timeout(timeout_s, timeout_us);

    httplib::Headers headers;
    if (!endpoint.api_key_env.empty()) {
        if (const char* key = std::getenv(endpoint.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    nlohmann::json body = {
        {"model", endpoint.model},
        {"temperature", endpoint.temperature},
        {"messages",
         {{{"role", "system"}, {"content", bundle.system_preamble}},
          {{"role", "user"},
           {"content", bundle.description + "\n\n" + bundle.knowledge + "\n\n" +
                           bundle.perception}}}},
    };

    const httplib::Result res = client.Post(url.prefix + "/chat/completions", headers,
                                            body.dump(), "application/json");
    AttemptOutcome out;
    if (!res) {
        out.text = "no response from " + endpoint.base_url + " (" + to_string(res.error()) + ")";
        return out;
    }
    if (res->status == 401 || res->status == 403)
        throw AuthFailure("authentication rejected (HTTP " + std::to_string(res->status) +
                          "); check the key in $" + endpoint.api_key_env);
    if (res->status == 429) {
        out.rate_limited = true;
        out.text = "rate limited (HTTP 429)";
        return out;
    }
    if (res->status < 200 || res->status >= 300) {
        out.text = "HTTP " + std::to_string(res->status) + " from " + endpoint.base_url;
        return out;
    }

    const nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty() || !doc["choices"][0].contains("message") ||
        !doc["choices"][0]["message"].contains("content")) {
        out.text = "malformed completion payload";
        return out;
    }
    out.ok = true;
    out.text = doc["choices"][0]["message"]["content"].get<std::string>();
    return out;
}

inline void backoff_sleep(const LlmEndpointConfig& endpoint, std::size_t attempt) {
    const double seconds =
        endpoint.backoff_base_seconds * static_cast<double>(1ULL << attempt);
    if (seconds > 0.0)
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

}  // namespace detail

// Sends one chat-completion request, retrying timeouts, 5xx, and 429 with
// exponential backoff (base doubles per retry) up to max_retries extra
// attempts. Auth rejections abort immediately. Returns the assistant text.
inline std::string llm_propose(const PromptBundle& bundle, const LlmEndpointConfig& endpoint) {
    std::string last;
    bool rate_limited = false;
    for (std::size_t attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
        if (attempt > 0) detail::backoff_sleep(endpoint, attempt - 1);
        const auto outcome = detail::chat_completion_attempt(bundle, endpoint);
        if (outcome.ok) return outcome.text;
        last = outcome.text;
        rate_limited = outcome.rate_limited;
    }
    const std::string msg =
        last + " after " + std::to_string(endpoint.max_retries + 1) + " attempts";
    if (rate_limited) throw RateLimited(msg);
    throw EndpointUnreachable(msg);
}

// ============================================================================
// Proposer adapters
// ============================================================================

struct LlmProposerOptions {
    LlmEndpointConfig endpoint;
    PromptOptions prompt;
    std::string knowledge;
    // Observers for the trace log; receives prompt and raw reply, never any
    // credential material.
    std::function<void(const PromptBundle&, const std::string& reply)> on_exchange;
};

// Proposer backed by the endpoint. Each iteration spends a unified budget of
// max_retries + 1 HTTP calls covering both transport failures and parse
// failures (the parse reason is appended to the perception section before the
// next call), so a full run never exceeds max_iterations * (max_retries + 1)
// network calls.
inline Proposer make_llm_proposer(LlmProposerOptions options) {
    return [options = std::move(options)](const PlanningTask& task,
                                          const std::vector<Step>& history) -> Deployment {
        const PromptBundle base = build_prompt(task, history, options.knowledge, options.prompt);
        PromptBundle bundle = base;

        std::string last_failure;
        bool transport_failure = false;
        bool rate_limited = false;
        const std::size_t budget = options.endpoint.max_retries + 1;
        for (std::size_t attempt = 0; attempt < budget; ++attempt) {
            if (attempt > 0) detail::backoff_sleep(options.endpoint, attempt - 1);

            detail::AttemptOutcome outcome;
            outcome = detail::chat_completion_attempt(bundle, options.endpoint);
            if (!outcome.ok) {
                last_failure = outcome.text;
                transport_failure = true;
                rate_limited = outcome.rate_limited;
                continue;
            }
            if (options.on_exchange) options.on_exchange(bundle, outcome.text);

            const ParseResult parsed = parse_proposal(outcome.text, task);
            if (parsed.ok) return parsed.deployment;

            last_failure = parsed.error;
            transport_failure = false;
            bundle = base;
            bundle.perception +=
                "\nyour previous reply was rejected: " + parsed.error +
                "\nreply with only the JSON object, e.g. {\"aps\": [{\"x\": 1.0, \"y\": 2.0}]}";
        }

        const std::string msg =
            last_failure + " after " + std::to_string(budget) + " attempts";
        if (transport_failure && rate_limited) throw RateLimited(msg);
        if (transport_failure) throw EndpointUnreachable(msg);
        throw ProposerError("proposal rejected: " + msg, false);
    };
}

// Offline stand-in: plays back a fixed sequence of deployments, repeating the
// last one once the script runs out.
inline Proposer scripted_proposer(std::vector<Deployment> script) {
    if (script.empty()) throw InvalidParams("scripted_proposer: script must be nonempty");
    return [script = std::move(script)](const PlanningTask&,
                                        const std::vector<Step>& history) -> Deployment {
        const std::size_t i = std::min(history.size(), script.size() - 1);
        return script[i];
    };
}

}  // namespace iplan
