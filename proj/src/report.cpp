#include "relic/report.hpp"

#include <sstream>

namespace relic
{

Report new_report(const std::string& command)
{
    Report r;
    r["schema"] = report_schema;
    r["command"] = command;
    return r;
}

Report value_json(const Value& v)
{
    if (const auto* b = std::get_if<bool>(&v))
        return *b;
    return std::get<Rational>(v).get_str();
}

Report assignment_json(const Assignment& a)
{
    Report out = Report::object();
    for (const auto& [v, x] : a.values())
        out[to_string(v)] = value_json(x);
    return out;
}

Report diagnostics_json(const std::vector<Diagnostic>& d)
{
    Report out = Report::array();
    for (const auto& x : d)
        out.push_back({{"rule", x.rule}, {"message", x.message}});
    return out;
}

Report composition_json(const SystemModel& s, const CompositionResult& c, bool timed)
{
    Report r;
    r["system"] = s.name;
    r["domain"] = to_string(s.domain);
    r["path"] = timed ? "timed" : "static";
    r["order_bound"] = system_order_bound(s);
    r["pruned_order"] = c.pruned_order;
    r["pruning_applied"] = c.pruning_applied;
    r["ssp"] = to_string(c.ssp);
    r["unpruned"] = to_string(c.unpruned);
    r["init"] = to_string(c.init);
    return r;
}

Report verdict_json(const Formula& postulate, const Verdict& v)
{
    Report r;
    r["postulate"] = to_string(postulate);
    r["verdict"] = to_string(v.kind);
    if (v.kind == Verdict::Kind::Valid)
        r["k"] = v.k;
    if (v.kind == Verdict::Kind::Invalid) {
        Report trace = Report::array();
        for (std::size_t i = 0; i < v.trace.size(); ++i)
            trace.push_back({{"step", i}, {"values", assignment_json(v.trace[i])}});
        r["trace"] = trace;
        if (!v.symbolic.empty())
            r["symbolic"] = v.symbolic;
    }
    if (v.kind == Verdict::Kind::Unknown) {
        r["reason"] = v.reason;
        r["detail"] = v.detail;
    }
    return r;
}

Report smt_json(const SmtProblem& p, const SmtResult& r)
{
    Report out;
    out["logic"] = p.logic;
    out["status"] = to_string(r.status);
    if (r.status == SmtResult::Status::Sat) {
        Report m = Report::object();
        for (const auto& v : p.declarations)
            if (const Value* x = r.model.find(v))
                m[v.name] = value_json(*x);
        out["model"] = m;
    }
    if (!r.reason.empty())
        out["reason"] = r.reason;
    out["refinements"] = r.refinements;
    return out;
}

Report interval_json(const Interval& i)
{
    Report r;
    r["lo"] = i.lo ? Report(i.lo->get_str()) : Report(nullptr);
    r["lo_closed"] = i.lo_closed;
    r["hi"] = i.hi ? Report(i.hi->get_str()) : Report(nullptr);
    r["hi_closed"] = i.hi_closed;
    r["text"] = to_string(i);
    return r;
}

Report range_json(const std::string& target, const RangeResult& r)
{
    Report out;
    out["output"] = target;
    out["formula"] = to_string(r.formula);
    out["set"] = to_string(r.set);
    Report pieces = Report::array();
    for (const auto& i : r.set.parts())
        pieces.push_back(interval_json(i));
    out["intervals"] = pieces;
    return out;
}

namespace
{

std::string str(const Report& j)
{
    if (j.is_string())
        return j.get<std::string>();
    return j.dump();
}

void render_composition(std::ostream& out, const Report& c)
{
    out << "system " << str(c["system"]) << " (" << str(c["domain"]) << " domain, " << str(c["path"])
        << " composition)\n";
    out << "order bound: " << str(c["order_bound"]) << ", strongest system-property order: "
        << str(c["pruned_order"]) << (c["pruning_applied"].get<bool>() ? " (redundant shifts pruned)" : "") << "\n";
    out << "strongest system-property:\n  " << str(c["ssp"]) << "\n";
    if (c["pruning_applied"].get<bool>())
        out << "before pruning:\n  " << str(c["unpruned"]) << "\n";
    out << "system initial condition:\n  " << str(c["init"]) << "\n";
}

void render_verdict(std::ostream& out, const Report& v)
{
    out << "postulate: " << str(v["postulate"]) << "\n  result: " << str(v["verdict"]);
    if (v.contains("k"))
        out << " (k = " << str(v["k"]) << ")";
    if (v.contains("reason"))
        out << " (" << str(v["reason"]) << (str(v["detail"]).empty() ? "" : ": " + str(v["detail"])) << ")";
    out << "\n";
    if (v.contains("trace") && !v["trace"].empty()) {
        out << "  counterexample:\n";
        for (const auto& step : v["trace"]) {
            out << "    step " << str(step["step"]) << ":";
            bool first = true;
            for (const auto& [name, x] : step["values"].items()) {
                out << (first ? " " : ", ") << name << " = " << str(x);
                first = false;
            }
            out << "\n";
        }
    }
    if (v.contains("symbolic"))
        out << "  counterexample (nonstandard): " << str(v["symbolic"]) << "\n";
}

} // namespace

std::string render_text(const Report& r)
{
    std::ostringstream out;
    if (r.contains("diagnostics"))
        for (const auto& d : r["diagnostics"])
            out << "diagnostic [" << str(d["rule"]) << "] " << str(d["message"]) << "\n";
    if (r.contains("error"))
        out << "error: " << str(r["error"]) << "\n";
    if (r.contains("composition"))
        render_composition(out, r["composition"]);
    if (r.contains("results"))
        for (const auto& v : r["results"])
            render_verdict(out, v);
    if (r.contains("smt")) {
        const Report& s = r["smt"];
        out << str(s["status"]) << "\n";
        if (s.contains("model"))
            for (const auto& [name, x] : s["model"].items()) {
                std::string text = str(x);
                if (x.is_string() && text.find('/') == std::string::npos)
                    text += "/1";
                out << name << " " << text << "\n";
            }
        if (s.contains("reason"))
            out << "reason: " << str(s["reason"]) << "\n";
    }
    if (r.contains("range")) {
        const Report& g = r["range"];
        out << "range of " << str(g["output"]) << ": " << str(g["set"]) << "\n  " << str(g["formula"]) << "\n";
    }
    if (r.contains("baseline"))
        out << "interval-arithmetic baseline: " << str(r["baseline"]["text"]) << "\n";
    if (r.contains("timing_ms")) {
        out << "timing:";
        bool first = true;
        for (const auto& [phase, ms] : r["timing_ms"].items()) {
            out << (first ? " " : ", ") << phase << " " << str(ms) << " ms";
            first = false;
        }
        out << "\n";
    }
    return out.str();
}

} // namespace relic
