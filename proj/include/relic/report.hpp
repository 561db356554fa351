#pragma once

#include "relic/induction.hpp"
#include "relic/rangeprop.hpp"
#include "relic/smt.hpp"

#include <json.hpp>

#include <string>

namespace relic
{

inline constexpr const char* report_schema = "relic.report/v1";

/// Reports are built as structured documents; the text form is rendered from them,
/// so the structured form always carries at least what the text shows.
using Report = nlohmann::ordered_json;

Report new_report(const std::string& command);
Report value_json(const Value& v);
Report assignment_json(const Assignment& a);
Report diagnostics_json(const std::vector<Diagnostic>& d);
Report composition_json(const SystemModel& s, const CompositionResult& c, bool timed);
Report verdict_json(const Formula& postulate, const Verdict& v);
Report smt_json(const SmtProblem& p, const SmtResult& r);
Report range_json(const std::string& target, const RangeResult& r);
Report interval_json(const Interval& i);

std::string render_text(const Report& r);

} // namespace relic
