#ifndef GERBEJLO_REPORT_HPP
#define GERBEJLO_REPORT_HPP

// Versioned JSON reports. Keys keep insertion order and timings are opt-in,
// so a fixed scenario and seed always give the same bytes.

#include <string>

#include <json.hpp>

#include "checks.hpp"

namespace gerbejlo {

inline constexpr const char* report_schema = "gerbejlo-report";
inline constexpr int report_schema_version = 1;

struct ReportContext {
    std::string scenario_name;
    std::string scenario_digest;
    RunOptions options;
    bool timings = false;
};

inline nlohmann::ordered_json to_json(const CheckResult& c, bool timings) {
    nlohmann::ordered_json j;
    j["id"] = c.id;
    j["anchor"] = c.anchor;
    j["inputs_digest"] = c.inputs_digest;
    j["status"] = to_string(c.status);
    j["cases"] = c.cases;
    j["witness"] = c.witness.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.witness);
    if (!c.note.empty()) j["note"] = c.note;
    if (timings) j["seconds"] = c.seconds;
    return j;
}

inline nlohmann::ordered_json to_json(const RunResult& r, const ReportContext& ctx) {
    nlohmann::ordered_json j;
    j["schema"] = report_schema;
    j["schema_version"] = report_schema_version;
    j["command"] = r.command;
    j["scenario"] = {{"name", ctx.scenario_name}, {"digest", ctx.scenario_digest}};
    j["options"] = {{"seed", ctx.options.seed},
                    {"kmax", ctx.options.kmax},
                    {"nmax", ctx.options.nmax},
                    {"samples", ctx.options.samples},
                    {"pipeline_samples", ctx.options.pipeline_samples},
                    {"sign_convention", to_string(ctx.options.sign_convention)}};
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) j["checks"].push_back(to_json(c, ctx.timings));
    j["observations"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.observations) j["observations"][k] = v;
    j["summary"] = {{"pass", r.count(CheckStatus::pass)},
                    {"fail", r.count(CheckStatus::fail)},
                    {"skip", r.count(CheckStatus::skip)},
                    {"ok", r.passed()}};
    return j;
}

inline std::string render_report(const RunResult& r, const ReportContext& ctx) { return to_json(r, ctx).dump(2) + "\n"; }

}  // namespace gerbejlo

#endif
