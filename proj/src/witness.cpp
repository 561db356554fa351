#include "relic/qe.hpp"

#include <algorithm>

namespace relic
{

int compare(const WitnessValue& a, const WitnessValue& b)
{
    if (int c = cmp(a.inf, b.inf); c != 0)
        return c < 0 ? -1 : 1;
    if (int c = cmp(a.fin, b.fin); c != 0)
        return c < 0 ? -1 : 1;
    if (int c = cmp(a.eps, b.eps); c != 0)
        return c < 0 ? -1 : 1;
    return 0;
}

std::string to_string(const WitnessValue& w)
{
    std::string out;
    auto part = [&](const Rational& k, const std::string& unit) {
        if (k == 0)
            return;
        Rational mag = abs(k);
        if (out.empty())
            out += k < 0 ? "-" : "";
        else
            out += k < 0 ? " - " : " + ";
        if (unit.empty())
            out += to_string(mag);
        else
            out += (mag == 1 ? "" : to_string(mag) + "*") + unit;
    };
    part(w.inf, "oo");
    part(w.fin, "");
    part(w.eps, "eps");
    return out.empty() ? "0" : out;
}

namespace
{

// term rel 0 with rel in {Eq, Lt, Le}
struct Lit
{
    LinearTerm term;
    Rel rel;
};

std::optional<Lit> to_lit(const Formula& f)
{
    const auto* c = std::get_if<Compare>(&f.atom());
    if (!c)
        return std::nullopt;
    switch (c->rel) {
    case Rel::Gt:
        return Lit{-c->term, Rel::Lt};
    case Rel::Ge:
        return Lit{-c->term, Rel::Le};
    default:
        return Lit{c->term, c->rel};
    }
}

bool ground_holds(const Lit& l)
{
    return holds(l.rel, sgn(l.term.constant()));
}

std::vector<Lit> project(const std::vector<Lit>& lits, const TimedVar& v)
{
    std::vector<Lit> rest, with;
    for (const auto& l : lits)
        (l.term.contains(v) ? with : rest).push_back(l);
    auto eq = std::find_if(with.begin(), with.end(), [](const Lit& l) { return l.rel == Rel::Eq; });
    if (eq != with.end()) {
        Rational a = eq->term.coefficient(v);
        LinearTerm t = eq->term.without(v) * Rational(-1 / a);
        for (const auto& l : with)
            if (&l != &*eq)
                rest.push_back({l.term.substitute(v, t), l.rel});
        return rest;
    }
    std::vector<std::pair<LinearTerm, bool>> lower, upper;
    for (const auto& l : with) {
        Rational a = l.term.coefficient(v);
        LinearTerm b = l.term.without(v) * Rational(-1 / a);
        (a > 0 ? upper : lower).emplace_back(b, l.rel == Rel::Lt);
    }
    for (const auto& [lo, ls] : lower)
        for (const auto& [hi, hs] : upper)
            rest.push_back({lo - hi, ls || hs ? Rel::Lt : Rel::Le});
    return rest;
}

WitnessValue value_of(const LinearTerm& t, const std::map<TimedVar, WitnessValue>& env)
{
    WitnessValue sum = WitnessValue::finite(t.constant());
    for (const auto& [v, c] : t.coefficients()) {
        auto it = env.find(v);
        sum = sum + (it == env.end() ? WitnessValue{} : it->second) * c;
    }
    return sum;
}

WitnessValue choose(const std::vector<Lit>& lits, const TimedVar& v, const std::map<TimedVar, WitnessValue>& env)
{
    std::optional<WitnessValue> lo, hi;
    bool lo_strict = false, hi_strict = false;
    for (const auto& l : lits) {
        Rational a = l.term.coefficient(v);
        if (a == 0)
            continue;
        WitnessValue b = value_of(l.term.without(v), env) * Rational(-1 / a);
        if (l.rel == Rel::Eq)
            return b;
        bool strict = l.rel == Rel::Lt;
        if (a > 0) {
            int c = hi ? compare(b, *hi) : -1;
            if (c < 0 || (c == 0 && strict)) {
                hi = b;
                hi_strict = strict;
            }
        } else {
            int c = lo ? compare(b, *lo) : 1;
            if (c > 0 || (c == 0 && strict)) {
                lo = b;
                lo_strict = strict;
            }
        }
    }
    WitnessValue eps{Rational(0), Rational(0), Rational(1)};
    if (lo && hi) {
        if (!lo_strict)
            return *lo;
        if (!hi_strict)
            return *hi;
        return (*lo + *hi) * Rational(1, 2);
    }
    if (lo)
        return lo_strict ? *lo + eps : *lo;
    if (hi)
        return hi_strict ? *hi - eps : *hi;
    return {};
}

std::optional<Witness> clause_witness(const Formula& clause, const std::vector<TimedVar>& order)
{
    Witness w;
    std::vector<Lit> lits;
    for (const auto& l : conjuncts(clause)) {
        if (l.is_atom()) {
            if (const auto* b = std::get_if<BoolAtom>(&l.atom())) {
                auto [it, fresh] = w.boolean.emplace(b->var, true);
                if (!fresh && !it->second)
                    return std::nullopt;
                continue;
            }
            if (auto lit = to_lit(l)) {
                lits.push_back(*lit);
                continue;
            }
        } else if (l.kind() == Formula::Kind::Not && l.child(0).is_atom()) {
            if (const auto* b = std::get_if<BoolAtom>(&l.child(0).atom())) {
                auto [it, fresh] = w.boolean.emplace(b->var, false);
                if (!fresh && it->second)
                    return std::nullopt;
                continue;
            }
        }
        throw UnsupportedTheory("witness extraction does not handle " + to_string(l));
    }

    std::vector<TimedVar> numeric;
    for (const auto& v : order)
        if (v.sort != Sort::Bool)
            numeric.push_back(v);

    std::vector<std::vector<Lit>> stages{lits};
    for (const auto& v : numeric)
        stages.push_back(project(stages.back(), v));
    for (const auto& l : stages.back())
        if (!ground_holds(l))
            return std::nullopt;
    for (std::size_t i = numeric.size(); i-- > 0;)
        w.numeric[numeric[i]] = choose(stages[i], numeric[i], w.numeric);
    for (const auto& v : order)
        if (v.sort == Sort::Bool)
            w.boolean.emplace(v, false);
    return w;
}

} // namespace

std::optional<Witness> extract_witness(const Formula& f, const std::vector<TimedVar>& vars)
{
    std::vector<TimedVar> order = vars;
    for (const auto& v : free_vars(f))
        if (std::find(order.begin(), order.end(), v) == order.end())
            order.push_back(v);
    for (const auto& clause : disjuncts(to_dnf(simplify(f)))) {
        Formula c = simplify(clause);
        if (c.is_false())
            continue;
        if (auto w = clause_witness(c, order))
            return w;
    }
    return std::nullopt;
}

std::optional<Assignment> concretize_witness(const Witness& w, const Formula& f)
{
    Rational big(0);
    for (const auto& [v, x] : w.numeric)
        big = std::max(big, Rational(abs(x.fin)));
    for (int round = 0; round < 64; ++round) {
        Integer p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(round));
        Rational eps(Integer(1), p);
        eps.canonicalize();
        Rational inf = Rational(p) * (big + 1);
        Assignment a;
        for (const auto& [v, x] : w.numeric) {
            Rational q = x.fin + x.eps * eps + x.inf * inf;
            a.set(v, q);
        }
        for (const auto& [v, b] : w.boolean)
            a.set(v, b);
        try {
            if (evaluate(f, a))
                return a;
        } catch (const UnboundVariable&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

} // namespace relic
