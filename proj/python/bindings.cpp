#include "relic/report.hpp"
#include "relic/spec.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace relic;

namespace
{

BuiltSpec built(const std::string& text)
{
    BuiltSpec b = build_model(parse_spec(text));
    if (!b.diagnostics.empty()) {
        std::string msg;
        for (const auto& d : b.diagnostics)
            msg += (msg.empty() ? "" : "\n") + d.rule + ": " + d.message;
        throw Error(msg);
    }
    return b;
}

std::string compose(const std::string& text)
{
    BuiltSpec b = built(text);
    const SystemModel& s = b.model;
    bool timed = max_property_order(s) > 0;
    CompositionResult c;
    if (timed) {
        c = strongest_property_timed(s);
    } else {
        c.ssp = strongest_property_static(s);
        c.unpruned = c.ssp;
        c.init = Formula::top();
    }
    return composition_json(s, c, timed).dump();
}

std::string verify(const std::string& text, int k_max)
{
    BuiltSpec b = built(text);
    InductionConfig cfg;
    cfg.k_max = k_max;
    Report out = Report::array();
    std::vector<Formula> postulates = b.postulates;
    if (postulates.empty())
        postulates.push_back(Formula::top());
    for (const auto& p : postulates)
        out.push_back(verdict_json(p, run_pipeline(b.model, p, cfg).verdict));
    return out.dump();
}

std::string check_sat_text(const std::string& text)
{
    SmtProblem p = parse_smtlib(text);
    return smt_json(p, solve(p)).dump();
}

std::map<std::string, Sort> sort_map(const std::map<std::string, std::string>& sorts)
{
    std::map<std::string, Sort> out;
    for (const auto& [name, s] : sorts) {
        auto sort = parse_sort(s);
        if (!sort)
            throw Error("unknown sort '" + s + "'");
        out[name] = *sort;
    }
    return out;
}

std::string eliminate(const std::string& formula, const std::vector<std::string>& names,
                      const std::map<std::string, std::string>& sorts)
{
    Formula f = parse_formula(formula, sort_map(sorts));
    std::vector<TimedVar> vs;
    for (const auto& v : free_vars(f))
        if (std::find(names.begin(), names.end(), v.name) != names.end())
            vs.push_back(v);
    return to_string(eliminate_all(exists_closure(vs, f)));
}

bool valid(const std::string& formula, const std::map<std::string, std::string>& sorts)
{
    return is_valid(parse_formula(formula, sort_map(sorts)));
}

std::string range(const std::string& graph, const std::string& output, bool baseline)
{
    BlockGraph g = parse_graph(graph);
    Report r = range_json(output, output_range(g, output));
    if (baseline)
        r["baseline"] = interval_json(naive_interval_range(g, output));
    return r.dump();
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Compositional verification by quantifier elimination";
    py::register_exception<Error>(m, "RelicError");
    m.def("compose", &compose, py::arg("spec"), "Strongest system-property of a spec, as JSON text");
    m.def("verify", &verify, py::arg("spec"), py::arg("k_max") = 10, "Verdicts for the spec's postulates, as JSON text");
    m.def("check_sat", &check_sat_text, py::arg("smtlib"), "Satisfiability of an SMT-LIB script, as JSON text");
    m.def("eliminate", &eliminate, py::arg("formula"), py::arg("variables"),
          py::arg("sorts") = std::map<std::string, std::string>{},
          "Eliminates the named variables existentially and returns the quantifier-free result");
    m.def("is_valid", &valid, py::arg("formula"), py::arg("sorts") = std::map<std::string, std::string>{});
    m.def("output_range", &range, py::arg("graph"), py::arg("output"), py::arg("baseline") = false,
          "Precise output range of a block graph, as JSON text");
}
