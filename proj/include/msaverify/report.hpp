#pragma once

// Text and JSON renderings of verdicts and repair plans. Both renderings are
// produced from the same values; the JSON form parses back losslessly.

#include <string>

#include "msaverify/model.hpp"
#include "msaverify/solver.hpp"

namespace msaverify {

/// Per-concern breakdown with witnesses named by (method, path).
std::string render_verdict_text(const SystemModel& model, const Verdict& verdict);

/// One line per change, e.g. "remove call E_0→E_1".
std::string render_change(const Change& change);
std::string render_plan_text(const SystemModel& model, const RepairPlan& plan);

std::string verdict_to_json(const Verdict& verdict);
std::string plan_to_json(const RepairPlan& plan);

/// Throw SchemaError on malformed input.
Verdict verdict_from_json(const std::string& text);
RepairPlan plan_from_json(const std::string& text);

}  // namespace msaverify
