#pragma once

#include "relic/compose.hpp"
#include "relic/expr.hpp"
#include "relic/formula.hpp"
#include "relic/qe.hpp"
#include "relic/smt.hpp"
#include "relic/spec.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace relic::testing
{

#ifdef RELIC_MODELS_DIR
inline std::string fixture_path(const std::string& file)
{
    return std::string(RELIC_MODELS_DIR) + "/" + file;
}

inline BuiltSpec load_fixture_spec(const std::string& file)
{
    return build_model(load_spec(fixture_path(file)));
}
#endif

inline Formula F(const std::string& text, const std::map<std::string, Sort>& sorts = {},
                 Sort default_sort = Sort::Real)
{
    return parse_formula(text, sorts, default_sort);
}

/// Rebinds the named variables as static (time-independent) parameters.
inline Formula make_static(const Formula& f, const std::set<std::string>& names)
{
    return map_vars(f, [&](const TimedVar& v) { return names.count(v.name) ? v.at(TimeIndex::fixed()) : v; });
}

inline TimedVar var(const std::string& name, std::int64_t offset = 0, Sort s = Sort::Real)
{
    return TimedVar(name, TimeIndex::relative(offset), s);
}

inline TimedVar at(const std::string& name, std::int64_t step, Sort s = Sort::Real)
{
    return TimedVar(name, TimeIndex::absolute(step), s);
}

inline LinearTerm T(const TimedVar& v)
{
    return LinearTerm::variable(v);
}

inline LinearTerm C(const Rational& q)
{
    return LinearTerm(q);
}

inline Rational Q(const std::string& s)
{
    return parse_rational(s);
}

class Rng
{
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }
    template <class T>
    const T& pick(const std::vector<T>& xs)
    {
        return xs[static_cast<std::size_t>(uniform(0, static_cast<int>(xs.size()) - 1))];
    }

    LinearTerm term(const std::vector<TimedVar>& vars, int max_coeff = 5)
    {
        LinearTerm t(Rational(uniform(-max_coeff, max_coeff)));
        for (const auto& v : vars)
            if (coin(0.6))
                t = t + T(v) * Rational(uniform(-max_coeff, max_coeff));
        return t;
    }

    Rel rel()
    {
        static const std::vector<Rel> rels{Rel::Eq, Rel::Ne, Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge};
        return pick(rels);
    }

    Formula atom(const std::vector<TimedVar>& vars, int max_coeff = 5)
    {
        return Formula::compare(term(vars, max_coeff), rel());
    }

    /// Random quantifier-free formula built from all connectives.
    Formula formula(const std::vector<TimedVar>& vars, int depth)
    {
        if (depth <= 0 || coin(0.3))
            return atom(vars);
        switch (uniform(0, 4)) {
        case 0:
            return Formula::negation(formula(vars, depth - 1));
        case 1:
            return Formula::conjunction({formula(vars, depth - 1), formula(vars, depth - 1)});
        case 2:
            return Formula::disjunction({formula(vars, depth - 1), formula(vars, depth - 1)});
        case 3:
            return Formula::implies(formula(vars, depth - 1), formula(vars, depth - 1));
        default:
            return Formula::iff(formula(vars, depth - 1), formula(vars, depth - 1));
        }
    }


    /// Comparison literal without disequality, for conjunctions fed to FM.
    Formula bound_literal(const std::vector<TimedVar>& vars, int max_coeff = 5)
    {
        static const std::vector<Rel> rels{Rel::Eq, Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge};
        return Formula::compare(term(vars, max_coeff), pick(rels));
    }

    Formula conjunction(const std::vector<TimedVar>& vars, int min_size, int max_size)
    {
        std::vector<Formula> parts;
        int n = uniform(min_size, max_size);
        for (int i = 0; i < n; ++i)
            parts.push_back(bound_literal(vars));
        return Formula::conjunction(std::move(parts));
    }

    /// Presburger atom: comparison, or divisibility with modulus in {2, 3, 4}.
    Formula int_atom(const std::vector<TimedVar>& vars)
    {
        if (coin(0.25))
            return Formula::divides(Integer(uniform(2, 4)), term(vars, 4));
        return Formula::compare(term(vars, 4), rel());
    }

    Formula int_formula(const std::vector<TimedVar>& vars, int depth)
    {
        if (depth <= 0 || coin(0.3))
            return int_atom(vars);
        switch (uniform(0, 2)) {
        case 0:
            return Formula::negation(int_formula(vars, depth - 1));
        case 1:
            return Formula::conjunction({int_formula(vars, depth - 1), int_formula(vars, depth - 1)});
        default:
            return Formula::disjunction({int_formula(vars, depth - 1), int_formula(vars, depth - 1)});
        }
    }

    /// Values in {-3, -5/2, ..., 3} for reals, integers in [-3, 3] for ints.
    Assignment assignment(const std::vector<TimedVar>& vars)
    {
        Assignment a;
        for (const auto& v : vars) {
            if (v.sort == Sort::Bool)
                a.set(v, coin());
            else if (v.sort == Sort::Int)
                a.set(v, Rational(uniform(-3, 3)));
            else
                a.set(v, Rational(uniform(-6, 6), 2));
        }
        return a;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};


/// Independent all-pairs Fourier-Motzkin shadow of ∃v over a conjunction of
/// comparison literals (no disequalities).
inline Formula naive_fm(const TimedVar& v, const Formula& conj)
{
    struct Bound
    {
        LinearTerm value;
        bool strict;
    };
    std::vector<Bound> lower, upper;
    std::vector<Formula> rest;
    for (const auto& lit : conjuncts(conj)) {
        const auto* cmp = lit.is_atom() ? std::get_if<Compare>(&lit.atom()) : nullptr;
        if (!cmp || !cmp->term.contains(v)) {
            rest.push_back(lit);
            continue;
        }
        Rational c = cmp->term.coefficient(v);
        LinearTerm b = cmp->term.without(v) * (Rational(-1) / c);
        Rel r = c > 0 ? cmp->rel : mirror(cmp->rel);
        switch (r) {
        case Rel::Eq:
            lower.push_back({b, false});
            upper.push_back({b, false});
            break;
        case Rel::Lt:
        case Rel::Le:
            upper.push_back({b, r == Rel::Lt});
            break;
        case Rel::Gt:
        case Rel::Ge:
            lower.push_back({b, r == Rel::Gt});
            break;
        case Rel::Ne:
            throw std::logic_error("naive_fm: disequality");
        }
    }
    for (const auto& l : lower)
        for (const auto& u : upper)
            rest.push_back(Formula::compare(l.value, l.strict || u.strict ? Rel::Lt : Rel::Le, u.value));
    return Formula::conjunction(std::move(rest));
}

/// ∃v.f decided by enumerating v over a window that provably contains a solution
/// when one exists: every boundary point of f's atoms, widened by the lcm of the moduli.
inline bool exists_int_by_enumeration(const TimedVar& v, const Formula& f, const Assignment& rest)
{
    Integer period = 1;
    Rational reach = 0;
    std::function<void(const Formula&)> scan = [&](const Formula& g) {
        if (!g.is_atom()) {
            for (const auto& c : g.children())
                scan(c);
            return;
        }
        if (const auto* cmp = std::get_if<Compare>(&g.atom())) {
            if (cmp->term.contains(v)) {
                Rational c = cmp->term.coefficient(v);
                Rational r = evaluate(cmp->term.without(v), rest);
                reach = std::max(reach, Rational(abs(r / c)));
            }
        } else if (const auto* d = std::get_if<Divides>(&g.atom())) {
            Rational c = d->term.coefficient(v);
            period = lcm(period, Integer(d->modulus * (c == 0 ? Integer(1) : Integer(abs(c.get_num())))));
        }
    };
    scan(f);
    Integer lim = ceil(reach) + period + 1;
    Assignment a = rest;
    for (Integer x = -lim; x <= lim; ++x) {
        a.set(v, Rational(x));
        if (evaluate(f, a))
            return true;
    }
    return false;
}

/// The replica conjunction of a timed composition, rebuilt from the model: every property
/// shifted back by i in [0, M - order], every connection by i in [0, M].
inline Formula replica_conjunction(const SystemModel& s)
{
    std::int64_t m = system_order_bound(s);
    std::vector<Formula> parts;
    for (const auto& p : s.properties)
        for (std::int64_t i = 0; i <= m - p.order; ++i)
            parts.push_back(shift(p.body, -i));
    for (const auto& c : s.connections)
        for (std::int64_t i = 0; i <= m; ++i)
            parts.push_back(shift(s.connection_formula(c), -i));
    return Formula::conjunction(std::move(parts));
}

/// Whether the hidden variables of f can be completed, given values for the others.
/// Top-level equalities are solved first; the rest goes through naive FM for reals and
/// through enumeration over [-radius, radius] for integers (exact only within that box).
inline bool exists_completion(const Formula& f, std::vector<TimedVar> hidden, const Assignment& visible,
                              int radius = 40)
{
    auto is_hidden = [&](const TimedVar& v) { return std::find(hidden.begin(), hidden.end(), v) != hidden.end(); };
    Formula g = f;
    for (const auto& v : free_vars(f))
        if (!is_hidden(v)) {
            const Value* x = visible.find(v);
            if (!x)
                throw UnboundVariable(to_string(v));
            g = v.sort == Sort::Bool ? substitute(g, v, std::get<bool>(*x))
                                     : substitute(g, v, C(std::get<Rational>(*x)));
        }

    for (bool progress = true; progress;) {
        progress = false;
        for (const auto& c : conjuncts(g)) {
            const auto* cmp = c.is_atom() ? std::get_if<Compare>(&c.atom()) : nullptr;
            if (!cmp || cmp->rel != Rel::Eq)
                continue;
            for (const auto& [v, coeff] : cmp->term.coefficients()) {
                if (!is_hidden(v) || (v.sort == Sort::Int && abs(coeff) != 1))
                    continue;
                g = substitute(g, v, cmp->term.without(v) * (Rational(-1) / coeff));
                hidden.erase(std::find(hidden.begin(), hidden.end(), v));
                progress = true;
                break;
            }
            if (progress)
                break;
        }
    }
    auto fv = free_vars(g);
    std::vector<TimedVar> rest(fv.begin(), fv.end());
    if (rest.empty())
        return evaluate(g, Assignment{});
    bool all_int = std::all_of(rest.begin(), rest.end(), [](const TimedVar& v) { return v.sort == Sort::Int; });

    std::vector<TimedVar> ints, reals;
    for (const auto& v : rest)
        (v.sort == Sort::Int ? ints : reals).push_back(v);
    std::function<bool(std::size_t, Assignment&)> enumerate = [&](std::size_t i, Assignment& a) {
        if (i == ints.size()) {
            if (all_int)
                return evaluate(g, a);
            Formula h = g;
            for (const auto& [v, x] : a.values())
                h = substitute(h, v, C(std::get<Rational>(x)));
            for (const auto& d : disjuncts(to_dnf(h))) {
                Formula shadow = d;
                for (const auto& v : reals)
                    shadow = naive_fm(v, shadow);
                if (evaluate(shadow, Assignment{}))
                    return true;
            }
            return false;
        }
        for (int x = -radius; x <= radius; ++x) {
            a.set(ints[i], Rational(x));
            if (enumerate(i + 1, a))
                return true;
        }
        return false;
    };
    Assignment a;
    return enumerate(0, a);
}

/// Whether the relative formula f can be read at absolute step t (no index before step 0).
inline bool fits_at(const Formula& f, std::int64_t t)
{
    return !has_relative(f) || t + offset_range(f).first >= 0;
}

inline std::int64_t last_step(const Formula& f)
{
    std::int64_t m = 0;
    for (const auto& v : free_vars(f))
        if (v.index.is_absolute())
            m = std::max(m, v.index.value);
    return m;
}

/// One random run of the component relations (not the composed property): external
/// inputs are drawn at random, every other value is solved step by step.
/// Returns nullopt when some step has no consistent continuation.
inline std::optional<Assignment> simulate(const SystemModel& s, int steps, Rng& rng)
{
    auto random_value = [&](Sort sort) -> Value {
        if (sort == Sort::Bool)
            return rng.coin();
        if (sort == Sort::Int)
            return Rational(rng.uniform(-10, 10));
        return Rational(rng.uniform(-20, 20), 2);
    };
    auto bind = [](const Formula& f, const Assignment& known) {
        Formula g = f;
        for (const auto& v : free_vars(f))
            if (const Value* x = known.find(v))
                g = v.sort == Sort::Bool ? substitute(g, v, std::get<bool>(*x)) : substitute(g, v, C(std::get<Rational>(*x)));
        return g;
    };

    std::set<std::string> inputs;
    for (const auto& e : s.externals)
        if (const Port* p = s.find_port(e.port); p && p->direction == Direction::In)
            inputs.insert(e.alias);

    Assignment trace;
    for (const auto& p : s.parameters)
        trace.set(TimedVar(p.name, TimeIndex::fixed(), p.sort), random_value(p.sort));

    for (std::int64_t t = 0; t < steps; ++t) {
        std::vector<Formula> parts;
        for (const auto& p : s.properties)
            if (t >= p.order && fits_at(p.body, t))
                parts.push_back(instantiate_at(p.body, t));
        for (const auto& c : s.connections)
            parts.push_back(instantiate_at(s.connection_formula(c), t));
        for (const auto& a : s.assumptions)
            if (fits_at(a, t))
                parts.push_back(instantiate_at(a, t));
        for (const auto& i : s.initials)
            if (last_step(i.body) == t)
                parts.push_back(i.body);
        Formula step = bind(Formula::conjunction(parts), trace);

        std::vector<TimedVar> open;
        for (const auto& v : free_vars(step))
            open.push_back(v);
        for (const auto& name : inputs) {
            const Port* p = nullptr;
            for (const auto& e : s.externals)
                if (e.alias == name)
                    p = s.find_port(e.port);
            TimedVar v(name, TimeIndex::absolute(t), p ? p->sort : Sort::Real);
            if (std::find(open.begin(), open.end(), v) == open.end())
                open.push_back(v);
        }

        Assignment pins_all, pins_inputs;
        for (const auto& v : open) {
            bool input = inputs.count(v.name) != 0;
            if (input || rng.coin(0.3)) {
                Value x = random_value(v.sort);
                pins_all.set(v, x);
                if (input)
                    pins_inputs.set(v, x);
            }
        }
        std::optional<Assignment> chosen;
        for (const Assignment* pins : {&pins_all, &pins_inputs}) {
            Formula g = bind(step, *pins);
            if (auto m = find_model(g)) {
                for (const auto& [v, x] : pins->values())
                    m->set(v, x);
                chosen = m;
                break;
            }
        }
        if (!chosen) {
            chosen = find_model(step);
            if (!chosen)
                return std::nullopt;
        }
        for (const auto& v : open)
            if (!chosen->contains(v))
                chosen->set(v, random_value(v.sort));
        for (const auto& [v, x] : chosen->values())
            trace.set(v, x);
    }
    return trace;
}

/// Steps at which the relative postulate is violated by a simulated trace.
inline std::vector<std::int64_t> violations(const Formula& postl, const Assignment& trace, int steps)
{
    std::vector<std::int64_t> out;
    for (std::int64_t t = 0; t < steps; ++t) {
        if (!fits_at(postl, t))
            continue;
        Formula f = instantiate_at(postl, t);
        bool bound = true;
        for (const auto& v : free_vars(f))
            bound = bound && trace.contains(v);
        if (bound && !evaluate(f, trace))
            out.push_back(t);
    }
    return out;
}

/// Random SMT-LIB script over up to three symbols of mixed sorts.
inline std::string random_smt_script(Rng& rng)
{
    static const std::vector<std::string> sorts{"Real", "Int", "Bool"};
    static const std::vector<std::string> names{"a", "b", "c"};
    std::vector<std::pair<std::string, std::string>> decls;
    int n = rng.uniform(1, 3);
    for (int i = 0; i < n; ++i)
        decls.emplace_back(names[static_cast<std::size_t>(i)], rng.pick(sorts));
    bool any_real = std::any_of(decls.begin(), decls.end(), [](const auto& d) { return d.second == "Real"; });
    std::vector<std::string> numeric, booleans;
    for (const auto& [name, sort] : decls) {
        if (sort == "Bool")
            booleans.push_back(name);
        else
            numeric.push_back(sort == "Int" && any_real ? "(to_real " + name + ")" : name);
    }
    auto literal = [&](int v) {
        std::string text = std::to_string(std::abs(v)) + (any_real ? ".0" : "");
        return v < 0 ? "(- " + text + ")" : text;
    };
    auto term = [&]() {
        std::string t = "(+ " + literal(rng.uniform(-5, 5));
        for (const auto& x : numeric)
            if (rng.coin(0.7))
                t += " (* " + literal(rng.uniform(-4, 4)) + " " + x + ")";
        return t + ")";
    };
    std::function<std::string(int)> formula = [&](int depth) -> std::string {
        if (!booleans.empty() && rng.coin(0.2))
            return rng.pick(booleans);
        if (numeric.empty() || depth <= 0 || rng.coin(0.4)) {
            if (numeric.empty())
                return booleans.empty() ? "true" : rng.pick(booleans);
            static const std::vector<std::string> ops{"<", "<=", ">", ">=", "=", "distinct"};
            return "(" + rng.pick(ops) + " " + term() + " " + term() + ")";
        }
        switch (rng.uniform(0, 3)) {
        case 0:
            return "(not " + formula(depth - 1) + ")";
        case 1:
            return "(and " + formula(depth - 1) + " " + formula(depth - 1) + ")";
        case 2:
            return "(or " + formula(depth - 1) + " " + formula(depth - 1) + ")";
        default:
            return "(=> " + formula(depth - 1) + " " + formula(depth - 1) + ")";
        }
    };
    std::string text;
    for (const auto& [name, sort] : decls)
        text += "(declare-fun " + name + " () " + sort + ")\n";
    for (int i = rng.uniform(1, 3); i > 0; --i)
        text += "(assert " + formula(2) + ")\n";
    return text + "(check-sat)\n(get-model)\n";
}

inline bool model_satisfies(const SmtProblem& p, const Assignment& m)
{
    for (const auto& a : p.assertions)
        if (!evaluate(a, m))
            return false;
    return true;
}

// Exhaustive over integers in [-6, 6] and reals in halves of [-6, 6].
inline bool box_witness(const SmtProblem& p, std::size_t i, Assignment& a)
{
    if (i == p.declarations.size())
        return model_satisfies(p, a);
    const TimedVar& v = p.declarations[i];
    if (v.sort == Sort::Bool) {
        for (bool b : {false, true}) {
            a.set(v, b);
            if (box_witness(p, i + 1, a))
                return true;
        }
        return false;
    }
    int step = v.sort == Sort::Int ? 2 : 1;
    for (int x = -12; x <= 12; x += step) {
        a.set(v, Rational(x, 2));
        if (box_witness(p, i + 1, a))
            return true;
    }
    return false;
}

/// Random values for interface variables: ints in [-10, 10], reals in halves of [-30, 30].
inline Assignment random_visible(const std::set<TimedVar>& vars, Rng& rng)
{
    Assignment a;
    for (const auto& v : vars) {
        if (v.sort == Sort::Bool)
            a.set(v, rng.coin());
        else if (v.sort == Sort::Int)
            a.set(v, Rational(rng.uniform(-10, 10)));
        else
            a.set(v, Rational(rng.uniform(-60, 60), 2));
    }
    return a;
}

} // namespace relic::testing
