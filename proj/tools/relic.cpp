#include "relic/report.hpp"
#include "relic/spec.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace relic;

namespace
{

enum Exit
{
    Ok = 0,
    Negative = 1,
    Undecided = 2,
    Failure = 3
};

class Stopwatch
{
public:
    double lap()
    {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - start_).count();
        start_ = now;
        return std::round(ms * 1000) / 1000;
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string read_input(const std::string& path)
{
    std::stringstream buf;
    if (path == "-") {
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read '" + path + "'");
    buf << in.rdbuf();
    return buf.str();
}

int exit_for(Verdict::Kind k)
{
    switch (k) {
    case Verdict::Kind::Valid:
        return Ok;
    case Verdict::Kind::Invalid:
        return Negative;
    case Verdict::Kind::Unknown:
        return Undecided;
    }
    return Failure;
}

int exit_for(SmtResult::Status s)
{
    switch (s) {
    case SmtResult::Status::Sat:
        return Ok;
    case SmtResult::Status::Unsat:
        return Negative;
    case SmtResult::Status::Unknown:
        return Undecided;
    }
    return Failure;
}

// Loads and builds a spec; on diagnostics the report carries them and nullopt is returned.
std::optional<BuiltSpec> load_model(const std::string& path, Report& report)
{
    BuiltSpec built = build_model(parse_spec(read_input(path)));
    if (!built.diagnostics.empty()) {
        report["diagnostics"] = diagnostics_json(built.diagnostics);
        return std::nullopt;
    }
    return built;
}

std::string fragment(const SystemModel& s, const CompositionResult& c)
{
    std::ostringstream out;
    out << "// composed from system " << s.name << "\n";
    out << "component " << s.name << "_composed {\n";
    for (const auto& e : s.externals) {
        const Port* p = s.find_port(e.port);
        out << "  " << (p->direction == Direction::In ? "in " : "out ") << e.alias << ": " << to_string(p->sort)
            << ";\n";
    }
    out << "  guarantee " << to_string(c.ssp) << ";\n";
    if (!c.init.is_true())
        out << "  initially " << to_string(c.init) << ";\n";
    out << "}\n";
    return out.str();
}

CompositionResult compose_any(const SystemModel& s, bool& timed, const QeOptions& qe)
{
    timed = max_property_order(s) > 0;
    if (timed)
        return strongest_property_timed(s, qe);
    CompositionResult c;
    c.ssp = strongest_property_static(s, qe);
    c.unpruned = c.ssp;
    c.init = Formula::top();
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"relic: compositional verification by quantifier elimination"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "structured"}));
    long cap = 100000;
    app.add_option("--cooper-cap", cap, "Largest candidate set tried by integer elimination");

    std::string spec_path, fragment_path, smt_path, logic = "auto", graph_path, output;
    int k_max = 10;
    bool parallel = false, baseline = false;

    auto* compose = app.add_subcommand("compose", "Strongest system-property and initial condition of a spec");
    compose->add_option("SPEC", spec_path)->required();
    compose->add_option("--emit-fragment", fragment_path, "Write the composed system as a spec component");
    auto* verify = app.add_subcommand("verify", "Verify the postulates of a spec");
    verify->add_option("SPEC", spec_path)->required();
    verify->add_option("--k-max", k_max, "Largest induction depth")->check(CLI::PositiveNumber);
    verify->add_flag("--parallel", parallel, "Discharge base and inductive obligations concurrently");
    auto* order = app.add_subcommand("order", "Order bound and pruned order of a spec");
    order->add_option("SPEC", spec_path)->required();
    auto* sat = app.add_subcommand("sat", "Satisfiability of an SMT-LIB script (- for standard input)");
    sat->add_option("FILE", smt_path)->required();
    sat->add_option("--logic", logic, "Procedure to use")->check(CLI::IsMember({"auto", "real", "int", "mixed"}));
    auto* range = app.add_subcommand("range", "Output range of a block graph");
    range->add_option("GRAPH", graph_path)->required();
    range->add_option("--output", output, "Output block")->required();
    range->add_flag("--baseline", baseline, "Also report interval arithmetic");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? Ok : Failure;
    }

    QeOptions qe;
    qe.cooper_cap = cap;
    CLI::App* cmd = app.get_subcommands().front();
    Report report = new_report(cmd->get_name());
    Report timing = Report::object();
    Stopwatch clock;
    int code = Ok;

    try {
        if (cmd == compose || cmd == order || cmd == verify) {
            auto built = load_model(spec_path, report);
            timing["parse"] = clock.lap();
            if (!built) {
                code = Failure;
            } else if (cmd == verify) {
                InductionConfig cfg;
                cfg.k_max = k_max;
                cfg.parallel = parallel;
                cfg.qe = qe;
                std::vector<Formula> postulates = built->postulates;
                if (postulates.empty())
                    postulates.push_back(Formula::top());
                Report results = Report::array();
                bool any_invalid = false, any_unknown = false;
                for (const auto& p : postulates) {
                    PipelineResult r = run_pipeline(built->model, p, cfg);
                    if (!report.contains("composition"))
                        report["composition"] = composition_json(built->model, r.composition, r.timed);
                    results.push_back(verdict_json(p, r.verdict));
                    any_invalid = any_invalid || r.verdict.kind == Verdict::Kind::Invalid;
                    any_unknown = any_unknown || r.verdict.kind == Verdict::Kind::Unknown;
                }
                timing["verify"] = clock.lap();
                report["results"] = results;
                code = exit_for(any_invalid   ? Verdict::Kind::Invalid
                                : any_unknown ? Verdict::Kind::Unknown
                                              : Verdict::Kind::Valid);
            } else {
                bool timed = false;
                CompositionResult c = compose_any(built->model, timed, qe);
                timing["compose"] = clock.lap();
                report["composition"] = composition_json(built->model, c, timed);
                if (cmd == compose && !fragment_path.empty()) {
                    std::ofstream out(fragment_path);
                    if (!out)
                        throw Error("cannot write '" + fragment_path + "'");
                    out << fragment(built->model, c);
                    report["fragment"] = fragment_path;
                }
            }
        } else if (cmd == sat) {
            SmtProblem p = parse_smtlib(read_input(smt_path));
            timing["parse"] = clock.lap();
            SmtOptions opt;
            opt.qe = qe;
            if (logic == "real" && p.has_sort(Sort::Int))
                throw Error("--logic real given, but the script declares Int symbols");
            if (logic == "int" && p.has_sort(Sort::Real))
                throw Error("--logic int given, but the script declares Real symbols");
            SmtResult r = logic == "mixed" ? check_sat_mixed(p, opt) : logic == "auto" ? solve(p, opt) : check_sat(p, opt);
            timing["solve"] = clock.lap();
            report["smt"] = smt_json(p, r);
            code = exit_for(r.status);
        } else if (cmd == range) {
            BlockGraph g = load_graph(graph_path);
            timing["parse"] = clock.lap();
            auto diags = validate_graph(g);
            if (!diags.empty()) {
                report["diagnostics"] = diagnostics_json(diags);
                code = Failure;
            } else {
                report["range"] = range_json(output, output_range(g, output, qe));
                timing["range"] = clock.lap();
                if (baseline)
                    report["baseline"] = interval_json(naive_interval_range(g, output));
            }
        }
    } catch (const UnsupportedTheory& e) {
        report["error"] = std::string("unsupported: ") + e.what();
        code = cmd == sat ? Undecided : Failure;
    } catch (const std::exception& e) {
        report["error"] = e.what();
        code = Failure;
    }
    report["timing_ms"] = timing;
    report["exit_code"] = code;

    if (format == "structured")
        std::cout << report.dump(2) << "\n";
    else
        std::cout << render_text(report);
    return code;
}
