#include "relic/qe.hpp"

#include <algorithm>

namespace relic
{

namespace
{

bool term_mentions(const Formula& f, const TimedVar& v)
{
    if (f.is_atom()) {
        const Atom& a = f.atom();
        if (const auto* c = std::get_if<Compare>(&a))
            return c->term.contains(v);
        if (const auto* d = std::get_if<Divides>(&a))
            return d->term.contains(v);
        if (const auto* b = std::get_if<BoolAtom>(&a))
            return b->var == v;
        return false;
    }
    if (f.is_quantifier() && f.bound() == v)
        return false;
    for (const auto& c : f.children())
        if (term_mentions(c, v))
            return true;
    return false;
}

std::size_t occurrences(const Formula& f, const TimedVar& v)
{
    if (f.is_atom())
        return term_mentions(f, v) ? 1 : 0;
    std::size_t n = 0;
    for (const auto& c : f.children())
        n += occurrences(c, v);
    return n;
}

std::optional<Compare> compare_atom(const Formula& f)
{
    if (!f.is_atom())
        return std::nullopt;
    if (const auto* c = std::get_if<Compare>(&f.atom()))
        return *c;
    return std::nullopt;
}

// The equality among `lits` best suited to eliminate v: fewest variables, then unit coefficient.
std::optional<std::size_t> pick_equality(const std::vector<Formula>& lits, const TimedVar& v)
{
    std::optional<std::size_t> best;
    std::pair<std::size_t, int> best_key{0, 0};
    for (std::size_t i = 0; i < lits.size(); ++i) {
        auto c = compare_atom(lits[i]);
        if (!c || c->rel != Rel::Eq || !c->term.contains(v))
            continue;
        Rational a = c->term.coefficient(v);
        std::pair<std::size_t, int> key{c->term.coefficients().size(), abs(a) == 1 ? 0 : 1};
        if (!best || key < best_key) {
            best = i;
            best_key = key;
        }
    }
    return best;
}

LinearTerm solve_for(const Compare& eq, const TimedVar& v)
{
    Rational a = eq.term.coefficient(v);
    return eq.term.without(v) * Rational(-1 / a);
}

// ∃v over a conjunction of literals, v real.
Formula fm_clause(const TimedVar& v, const std::vector<Formula>& lits)
{
    std::vector<Formula> rest;
    std::vector<Formula> with;
    for (const auto& l : lits) {
        if (!term_mentions(l, v))
            rest.push_back(l);
        else if (compare_atom(l))
            with.push_back(l);
        else
            throw UnsupportedTheory("real variable '" + to_string(v) + "' occurs in " + to_string(l));
    }
    if (with.empty())
        return Formula::conjunction(std::move(rest));

    if (auto eq = pick_equality(with, v)) {
        LinearTerm t = solve_for(*compare_atom(with[*eq]), v);
        for (std::size_t i = 0; i < with.size(); ++i) {
            if (i == *eq)
                continue;
            auto c = *compare_atom(with[i]);
            rest.push_back(Formula::compare(c.term.substitute(v, t), c.rel));
        }
        return Formula::conjunction(std::move(rest));
    }

    struct Bound
    {
        LinearTerm value;
        bool strict;
    };
    std::vector<Bound> lower, upper;
    for (const auto& l : with) {
        auto c = *compare_atom(l);
        Rational a = c.term.coefficient(v);
        LinearTerm b = c.term.without(v) * Rational(-1 / a);
        Rel rel = a > 0 ? c.rel : mirror(c.rel);
        switch (rel) {
        case Rel::Lt:
            upper.push_back({b, true});
            break;
        case Rel::Le:
            upper.push_back({b, false});
            break;
        case Rel::Gt:
            lower.push_back({b, true});
            break;
        case Rel::Ge:
            lower.push_back({b, false});
            break;
        case Rel::Ne:
            // a single disequality never constrains a dense variable on its own
            if (with.size() == 1)
                return Formula::conjunction(std::move(rest));
            return Formula::disjunction(
                {fm_clause(v, [&] {
                     auto alt = lits;
                     for (auto& x : alt)
                         if (x == l)
                             x = Formula::compare(c.term, Rel::Lt);
                     return alt;
                 }()),
                 fm_clause(v, [&] {
                     auto alt = lits;
                     for (auto& x : alt)
                         if (x == l)
                             x = Formula::compare(c.term, Rel::Gt);
                     return alt;
                 }())});
        case Rel::Eq:
            break;
        }
    }
    for (const auto& lo : lower)
        for (const auto& hi : upper)
            rest.push_back(Formula::compare(lo.value - hi.value, lo.strict || hi.strict ? Rel::Lt : Rel::Le));
    return Formula::conjunction(std::move(rest));
}

Formula eliminate_real(const TimedVar& v, const Formula& f);

Formula eliminate_in_conjunction(const TimedVar& v, const std::vector<Formula>& parts)
{
    std::vector<Formula> without, with;
    for (const auto& p : parts)
        (term_mentions(p, v) ? with : without).push_back(p);
    if (with.empty())
        return Formula::conjunction(std::move(without));

    // Gauss step on a top-level equality: no case split needed
    if (auto eq = pick_equality(with, v)) {
        LinearTerm t = solve_for(*compare_atom(with[*eq]), v);
        for (std::size_t i = 0; i < with.size(); ++i)
            if (i != *eq)
                without.push_back(substitute(with[i], v, t));
        return Formula::conjunction(std::move(without));
    }

    if (with.size() == 1 && with[0].kind() == Formula::Kind::Or) {
        without.push_back(eliminate_real(v, with[0]));
        return Formula::conjunction(std::move(without));
    }

    bool all_literals = std::all_of(with.begin(), with.end(), [](const Formula& p) { return p.is_literal(); });
    if (all_literals) {
        without.push_back(fm_clause(v, with));
        return Formula::conjunction(std::move(without));
    }

    Formula dnf = to_dnf(Formula::conjunction(with));
    std::vector<Formula> alts;
    for (const auto& clause : disjuncts(dnf)) {
        Formula c = simplify(clause);
        if (c.is_false())
            continue;
        alts.push_back(simplify(fm_clause(v, conjuncts(c))));
        if (alts.back().is_true())
            break;
    }
    without.push_back(Formula::disjunction(std::move(alts)));
    return Formula::conjunction(std::move(without));
}

Formula eliminate_real(const TimedVar& v, const Formula& f)
{
    if (!term_mentions(f, v))
        return f;
    switch (f.kind()) {
    case Formula::Kind::Or: {
        std::vector<Formula> alts;
        for (const auto& c : f.children())
            alts.push_back(eliminate_real(v, c));
        return Formula::disjunction(std::move(alts));
    }
    case Formula::Kind::And:
        return eliminate_in_conjunction(v, {f.children().begin(), f.children().end()});
    default:
        if (f.is_literal())
            return eliminate_in_conjunction(v, {f});
        throw Error("eliminate_exists expects a quantifier-free formula");
    }
}

// Best candidate for the next elimination.
TimedVar pick_next(const std::vector<TimedVar>& pending, const Formula& f)
{
    auto top = conjuncts(f);
    for (const auto& v : pending) {
        for (const auto& c : top) {
            auto a = compare_atom(c);
            if (!a || a->rel != Rel::Eq || !a->term.contains(v))
                continue;
            // for integers only a unit coefficient keeps the substitution free of side conditions
            if (v.sort != Sort::Int || abs(a->term.coefficient(v)) == 1)
                return v;
        }
    }
    const TimedVar* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& v : pending) {
        std::size_t n = occurrences(f, v);
        // integers go last: Cooper is the expensive step
        if (v.sort == Sort::Int)
            n += 1000000;
        if (!best || n < best_count) {
            best = &v;
            best_count = n;
        }
    }
    return *best;
}

Formula eliminate_block(std::vector<TimedVar> vs, Formula f, const QeOptions& opt)
{
    while (true) {
        vs.erase(std::remove_if(vs.begin(), vs.end(), [&](const TimedVar& v) { return !term_mentions(f, v); }),
                 vs.end());
        if (vs.empty() || f.is_true() || f.is_false())
            return f;
        TimedVar v = pick_next(vs, f);
        f = eliminate_exists(v, f, opt);
    }
}

Formula eliminate_rec(const Formula& f, const QeOptions& opt)
{
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::Atom:
        return f;
    case K::Not:
        return Formula::negation(eliminate_rec(f.child(0), opt));
    case K::And:
    case K::Or: {
        std::vector<Formula> kids;
        for (const auto& c : f.children())
            kids.push_back(eliminate_rec(c, opt));
        return f.kind() == K::And ? Formula::conjunction(std::move(kids)) : Formula::disjunction(std::move(kids));
    }
    case K::Implies:
        return Formula::implies(eliminate_rec(f.child(0), opt), eliminate_rec(f.child(1), opt));
    case K::Iff:
        return Formula::iff(eliminate_rec(f.child(0), opt), eliminate_rec(f.child(1), opt));
    case K::Exists:
    case K::Forall: {
        std::vector<TimedVar> block;
        Formula body = f;
        while (body.kind() == f.kind()) {
            block.push_back(body.bound());
            body = body.body();
        }
        Formula inner = eliminate_rec(body, opt);
        if (f.kind() == K::Exists)
            return eliminate_block(block, simplify(inner), opt);
        return simplify(Formula::negation(eliminate_block(block, simplify(Formula::negation(inner)), opt)));
    }
    }
    return f;
}

} // namespace

Formula eliminate_exists(const TimedVar& v, const Formula& f, const QeOptions& opt)
{
    if (v.sort == Sort::Int)
        return eliminate_exists_int(v, f, opt);
    Formula g = simplify(f);
    if (!term_mentions(g, v))
        return g;
    if (v.sort == Sort::Bool)
        return simplify(Formula::disjunction({substitute(g, v, true), substitute(g, v, false)}));
    return simplify(eliminate_real(v, g));
}

Formula eliminate_exists(const std::vector<TimedVar>& vs, const Formula& f, const QeOptions& opt)
{
    return eliminate_block(vs, simplify(f), opt);
}

Formula eliminate_all(const Formula& f, const QeOptions& opt)
{
    check_sorts(f);
    return simplify(eliminate_rec(f, opt));
}

bool is_valid(const Formula& f, const QeOptions& opt)
{
    auto fv = free_vars(f);
    Formula r = eliminate_all(forall_closure({fv.begin(), fv.end()}, f), opt);
    if (!r.is_true() && !r.is_false())
        throw Error("elimination left a residue: " + to_string(r));
    return r.is_true();
}

bool is_satisfiable(const Formula& f, const QeOptions& opt)
{
    auto fv = free_vars(f);
    Formula r = eliminate_all(exists_closure({fv.begin(), fv.end()}, f), opt);
    if (!r.is_true() && !r.is_false())
        throw Error("elimination left a residue: " + to_string(r));
    return r.is_true();
}

bool equivalent(const Formula& a, const Formula& b, const QeOptions& opt)
{
    return is_valid(Formula::iff(a, b), opt);
}

bool entails(const Formula& a, const Formula& b, const QeOptions& opt)
{
    return is_valid(Formula::implies(a, b), opt);
}

} // namespace relic
