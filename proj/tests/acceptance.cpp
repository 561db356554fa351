// Acceptance run: one PASS/FAIL line per criterion, with wall time against its limit.
#include "relic/induction.hpp"
#include "relic/rangeprop.hpp"
#include "relic/smt.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace relic;
using namespace relic::testing;

namespace
{

struct Outcome
{
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

struct Fixture
{
    SystemModel model;
    Formula postulate;
};

Fixture fixture(const std::string& file)
{
    BuiltSpec b = load_fixture_spec(file);
    if (!b.diagnostics.empty())
        throw Error(file + ": " + b.diagnostics.front().message);
    return {b.model, b.postulates.empty() ? Formula::top() : b.postulates.front()};
}

bool timed(const SystemModel& s)
{
    return system_order_bound(s) > 0;
}

std::vector<Rational> grid(const Rational& lo, const Rational& hi, int points)
{
    std::vector<Rational> out;
    for (int i = 0; i < points; ++i) {
        Rational q = lo + (hi - lo) * Rational(i, points - 1);
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

Outcome cascade()
{
    Outcome o;
    Fixture f = fixture("cascade.rlc");
    Formula ssp = strongest_property_static(f.model);
    Formula expected = make_static(F("in1 - out2 < 2*B"), {"B"});
    o.check(eliminate_all(Formula::iff(ssp, expected)).is_true(), "ssp not equivalent to in1 - out2 < 2*B");
    return o;
}

Outcome abc_real()
{
    Outcome o;
    Fixture f = fixture("abc.rlc");
    Formula ssp = strongest_property_static(f.model);
    o.check(equivalent(ssp, F("In_S <= 10 => Out_S < 4*In_S + 15")), "ssp mismatch");
    Verdict v = verify_postulated_static(ssp, f.postulate);
    o.check(v.kind == Verdict::Kind::Invalid, "verdict " + to_string(v.kind));
    if (v.kind == Verdict::Kind::Invalid) {
        o.check(!v.trace.empty(), "no concrete counterexample");
        if (!v.trace.empty()) {
            o.check(evaluate(ssp, v.trace.front()), "counterexample violates ssp");
            o.check(!evaluate(f.postulate, v.trace.front()), "counterexample satisfies postulate");
        }
    }
    return o;
}

Outcome abc_int()
{
    Outcome o;
    Fixture f = fixture("abc_int.rlc");
    Formula ssp = strongest_property_static(f.model);
    Formula target = F("In_S <= 10 => Out_S <= 4*In_S + 12", {}, Sort::Int);
    Formula closed = Formula::implies(ssp, target);
    for (const auto& v : free_vars(closed))
        closed = Formula::forall(v, closed);
    o.check(decide_sentence_int(closed), "ssp does not imply Out_S <= 4*In_S + 12");
    Verdict v = verify_postulated_static(ssp, f.postulate);
    o.check(v.kind == Verdict::Kind::Valid, "verdict " + to_string(v.kind));
    return o;
}

Outcome delay()
{
    Outcome o;
    Fixture f = fixture("delay.rlc");
    CompositionResult r = strongest_property_timed(f.model);
    o.check(r.ssp == F("y2 = u1[k-2]"), "ssp is " + to_string(r.ssp));
    o.check(equivalent(r.init, F("y2[0] = 0 and y2[1] = 1")), "init is " + to_string(r.init));
    return o;
}

Outcome example6()
{
    Outcome o;
    Fixture f = fixture("example6.rlc");
    CompositionResult r = strongest_property_timed(f.model);
    o.check(r.used_order_bound == 2, "order bound " + std::to_string(r.used_order_bound));
    o.check(equivalent(r.unpruned, F("z = u[k-1] + w[k-1] and z[k-1] = u[k-2] + w[k-2]")), "unpruned mismatch");
    o.check(equivalent(r.ssp, F("z = u[k-1] + w[k-1]")), "pruned mismatch");
    return o;
}

Outcome vehicle()
{
    Outcome o;
    Fixture f = fixture("vehicle.rlc");
    o.check(system_order_bound(f.model) == 3, "order bound " + std::to_string(system_order_bound(f.model)));
    PipelineResult p = run_pipeline(f.model, f.postulate);
    o.check(equivalent(p.composition.ssp,
                       F("51*ActualSpeed - 49*ActualSpeed[k-1] - TargetSpeed[k-1] - TargetSpeed = 0")),
            "ssp mismatch");
    o.check(equivalent(p.composition.init, F("51*ActualSpeed[0] - TargetSpeed[0] = 0")), "init mismatch");
    o.check(p.verdict.kind == Verdict::Kind::Valid && p.verdict.k == 1,
            "verdict " + to_string(p.verdict.kind) + " k=" + std::to_string(p.verdict.k));
    return o;
}

Outcome ranges()
{
    Outcome o;
    BlockGraph abs = load_graph(fixture_path("absval.json"));
    RangeResult r = output_range(abs, "outport");
    o.check(r.set == IntervalSet::of(Interval::closed(0, 5)), "absval range " + to_string(r.set));
    for (const auto& x : grid(-5, 5, 21))
        o.check(r.set.contains(x >= 0 ? x : Rational(-x)), "grid point outside range");
    o.check(naive_interval_range(abs, "outport") == Interval::closed(-5, 5), "absval baseline");

    BlockGraph relu = load_graph(fixture_path("relu2.json"));
    RangeResult q = output_range(relu, "y");
    o.check(q.set == IntervalSet::of(Interval::closed(0, 1)), "relu2 range " + to_string(q.set));
    o.check(naive_interval_range(relu, "y") == Interval::closed(0, 2), "relu2 baseline");
    return o;
}

Outcome lag_filter()
{
    Outcome o;
    BlockGraph g = load_graph(fixture_path("lagfilter.json"));
    CompositionResult r = io_relation(g);
    o.check(equivalent(r.ssp, F("41*out - 39*out[k-1] - in - in[k-1] = 0")), "relation " + to_string(r.ssp));
    o.check(equivalent(r.init, F("41*out[0] - in[0] = 0")), "init " + to_string(r.init));

    Rng rng(71);
    Rational d1 = 0, d2 = 0;
    Assignment a;
    for (std::int64_t t = 0; t < 10; ++t) {
        Rational in(rng.uniform(-20, 20), 3);
        in.canonicalize();
        Rational out = (in + d1 + 39 * d2) / 41;
        a.set(at("in", t), in);
        a.set(at("out", t), out);
        d1 = in;
        d2 = out;
    }
    o.check(evaluate(r.init, a), "simulated step 0 violates init");
    for (std::int64_t t = 1; t < 10; ++t)
        o.check(evaluate(instantiate_at(r.ssp, t), a), "simulated step " + std::to_string(t) + " violates relation");
    return o;
}

Outcome suite_fm()
{
    Outcome o;
    Rng rng(101);
    std::vector<TimedVar> vars{var("w"), var("x"), var("y"), var("z")};
    int bad = 0;
    for (int i = 0; i < 500; ++i) {
        Formula f = rng.conjunction(vars, 2, 5);
        const TimedVar& v = rng.pick(vars);
        if (!equivalent(eliminate_exists(v, f), naive_fm(v, f)))
            ++bad;
    }
    o.check(bad == 0, std::to_string(bad) + "/500 disagree");
    return o;
}

Outcome suite_cooper()
{
    Outcome o;
    Rng rng(102);
    std::vector<TimedVar> vars{var("x", 0, Sort::Int), var("y", 0, Sort::Int), var("z", 0, Sort::Int)};
    int bad = 0;
    for (int i = 0; i < 500; ++i) {
        Formula f = rng.int_formula(vars, 3);
        Formula r = eliminate_exists_int(vars[0], f);
        bool ok = !free_vars(r).count(vars[0]);
        for (int j = 0; j < 8 && ok; ++j) {
            Assignment a = rng.assignment(vars);
            ok = evaluate(r, a) == exists_int_by_enumeration(vars[0], f, a);
        }
        bad += !ok;
    }
    o.check(bad == 0, std::to_string(bad) + "/500 disagree");
    return o;
}

Outcome suite_smt()
{
    Outcome o;
    Rng rng(103);
    int sat = 0, unsat = 0, unknown = 0, bad = 0;
    for (int i = 0; i < 500; ++i) {
        SmtProblem p = parse_smtlib(random_smt_script(rng));
        SmtResult r = solve(p);
        if (r.status == SmtResult::Status::Sat) {
            ++sat;
            bool ok = model_satisfies(p, r.model);
            for (const auto& d : p.declarations)
                ok = ok && r.model.contains(d);
            bad += !ok;
        } else if (r.status == SmtResult::Status::Unsat) {
            ++unsat;
            Assignment a;
            bad += box_witness(p, 0, a);
        } else {
            ++unknown;
        }
    }
    o.check(bad == 0, std::to_string(bad) + " unsound answers");
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(sat) + " sat, " + std::to_string(unsat) + " unsat, " +
                std::to_string(unknown) + " unknown";
    return o;
}

Outcome suite_strongest()
{
    Outcome o;
    Rng rng(104);
    for (const std::string file :
         {"cascade.rlc", "abc.rlc", "abc_int.rlc", "loop.rlc", "delay.rlc", "example6.rlc", "vehicle.rlc"}) {
        Fixture f = fixture(file);
        Formula phi;
        Formula ssp;
        if (timed(f.model)) {
            phi = replica_conjunction(f.model);
            CompositionResult r = strongest_property_timed(f.model);
            ssp = shifted_closure(r.ssp, r.used_order_bound);
        } else {
            std::vector<Formula> parts;
            for (const auto& p : f.model.properties)
                parts.push_back(p.body);
            for (const auto& c : f.model.connections)
                parts.push_back(f.model.connection_formula(c));
            phi = Formula::conjunction(std::move(parts));
            ssp = strongest_property_static(f.model);
        }
        o.check(entails(phi, ssp), file + ": ssp not implied");
        auto hidden = hidden_variables(f.model, phi);
        std::set<TimedVar> visible;
        for (const auto& v : free_vars(phi))
            if (std::find(hidden.begin(), hidden.end(), v) == hidden.end())
                visible.insert(v);
        int positives = 0, bad = 0;
        for (int i = 0; i < 60; ++i) {
            Assignment a = random_visible(visible, rng);
            if (i % 2 == 0) {
                std::vector<Formula> pins{ssp};
                for (const auto& [v, x] : a.values())
                    if (v.sort != Sort::Bool && rng.coin(0.3))
                        pins.push_back(Formula::compare(T(v), Rel::Eq, C(std::get<Rational>(x))));
                if (auto m = find_model(Formula::conjunction(pins)))
                    for (const auto& [v, x] : m->values())
                        a.set(v, x);
            }
            bool holds = evaluate(ssp, a);
            positives += holds;
            bad += holds != exists_completion(phi, hidden, a);
        }
        o.check(bad == 0, file + ": " + std::to_string(bad) + " grid points disagree");
        o.check(positives >= 10, file + ": only " + std::to_string(positives) + " points inside the ssp");
    }
    return o;
}

Outcome suite_simulation()
{
    Outcome o;
    Rng rng(105);
    for (const std::string file : {"cascade.rlc", "abc_int.rlc", "loop.rlc", "delay.rlc", "example6.rlc", "vehicle.rlc"}) {
        Fixture f = fixture(file);
        PipelineResult r = run_pipeline(f.model, f.postulate);
        o.check(r.verdict.kind == Verdict::Kind::Valid, file + ": verdict " + to_string(r.verdict.kind));
        int steps = timed(f.model) ? 20 : 3;
        int runs = 0, violated = 0;
        for (int attempt = 0; attempt < 1500 && runs < 1000; ++attempt) {
            auto trace = simulate(f.model, steps, rng);
            if (!trace)
                continue;
            ++runs;
            violated += !violations(f.postulate, *trace, steps).empty();
        }
        o.check(runs == 1000, file + ": only " + std::to_string(runs) + " traces completed");
        o.check(violated == 0, file + ": " + std::to_string(violated) + " traces violate the postulate");
    }
    return o;
}

struct Criterion
{
    std::string id;
    std::string title;
    double limit_s; // 0: no runtime bound
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    std::vector<Criterion> criteria{
        {"AC1", "cascade composition", 1, cascade},
        {"AC2", "ABC real domain", 1, abc_real},
        {"AC3", "ABC integer domain", 5, abc_int},
        {"AC4", "delay cascade", 0, delay},
        {"AC5", "shift pruning pair", 0, example6},
        {"AC6", "vehicle benchmark", 10, vehicle},
        {"AC7", "range propagation", 0, ranges},
        {"AC8", "lag filter", 0, lag_filter},
        {"AC9a", "qe-real vs naive FM (500)", 60, suite_fm},
        {"AC9b", "qe-int vs enumeration (500)", 60, suite_cooper},
        {"AC9c", "smt model soundness (500)", 60, suite_smt},
        {"AC9d", "strongestness grid, all fixtures", 60, suite_strongest},
        {"AC9e", "1000 simulated traces per valid fixture", 60, suite_simulation},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0 && secs >= c.limit_s)
            o.check(false, "over the " + std::to_string(static_cast<int>(c.limit_s)) + " s limit");
        failed += !o.pass;
        std::printf("%-5s %s  %-42s %8.3f s%s%s\n", c.id.c_str(), o.pass ? "PASS" : "FAIL", c.title.c_str(), secs,
                    c.limit_s > 0 ? (" (< " + std::to_string(static_cast<int>(c.limit_s)) + " s)").c_str() : "",
                    o.detail.empty() ? "" : ("  " + o.detail).c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
