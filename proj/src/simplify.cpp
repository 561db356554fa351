#include "relic/interval.hpp"
#include "relic/qe.hpp"

#include <algorithm>

namespace relic
{

namespace
{

// A Compare literal read as a one-dimensional constraint s ∈ set, where s is the
// primitive linear form (integer coefficients, gcd 1, positive leading coefficient).
struct Linear1D
{
    LinearTerm form;
    IntervalSet set;
    bool integral = false;
};

std::optional<Linear1D> as_1d(const Formula& f)
{
    if (!f.is_atom())
        return std::nullopt;
    const auto* c = std::get_if<Compare>(&f.atom());
    if (!c)
        return std::nullopt;
    Integer g = 0;
    bool integral = true;
    for (const auto& [v, q] : c->term.coefficients()) {
        g = gcd(g, q.get_num());
        integral = integral && v.sort == Sort::Int;
    }
    LinearTerm form;
    for (const auto& [v, q] : c->term.coefficients())
        form.add(v, q / Rational(g));
    Rational bound = -c->term.constant() / Rational(g);
    IntervalSet set = IntervalSet::from_rel(c->rel, bound);
    if (integral)
        set = set.integral();
    return Linear1D{form, set, integral};
}

struct FormKey
{
    bool operator()(const LinearTerm& a, const LinearTerm& b) const { return compare(a, b) < 0; }
};

struct FormulaLess
{
    bool operator()(const Formula& a, const Formula& b) const { return compare(a, b) < 0; }
};

// Bool literal: variable and polarity.
std::optional<std::pair<TimedVar, bool>> as_bool_literal(const Formula& f)
{
    if (f.is_atom()) {
        if (const auto* b = std::get_if<BoolAtom>(&f.atom()))
            return std::make_pair(b->var, true);
        return std::nullopt;
    }
    if (f.kind() == Formula::Kind::Not && f.child(0).is_atom())
        if (const auto* b = std::get_if<BoolAtom>(&f.child(0).atom()))
            return std::make_pair(b->var, false);
    return std::nullopt;
}

// Unit literals of one connective, merged per linear form / boolean variable.
struct Units
{
    bool conj = true;
    bool contradiction = false; // the connective collapsed to its absorbing constant
    std::map<LinearTerm, std::pair<IntervalSet, bool>, FormKey> forms;
    std::map<TimedVar, int> bools; // bit 1: positive seen, bit 2: negative seen
    std::set<Formula, FormulaLess> others;

    void add_form(const Linear1D& l)
    {
        auto it = forms.find(l.form);
        if (it == forms.end()) {
            forms.emplace(l.form, std::make_pair(l.set, l.integral));
            return;
        }
        IntervalSet merged = conj ? it->second.first.intersect(l.set) : it->second.first.unite(l.set);
        if (l.integral)
            merged = merged.integral();
        it->second.first = merged;
    }

    void add_bool(const TimedVar& v, bool positive)
    {
        bools[v] |= positive ? 1 : 2;
    }

    // truth of literal `f` under the assumption that the units hold (conj) or fail (disj):
    // 1 true, 0 false, -1 unknown
    int assess(const Formula& f) const
    {
        if (auto l = as_1d(f)) {
            auto it = forms.find(l->form);
            if (it == forms.end())
                return -1;
            IntervalSet ctx = conj ? it->second.first : it->second.first.complement();
            if (l->integral)
                ctx = ctx.integral();
            if (ctx.intersect(l->set).is_empty())
                return 0;
            if (ctx.subset_of(l->set))
                return 1;
            return -1;
        }
        if (auto b = as_bool_literal(f)) {
            auto it = bools.find(b->first);
            if (it == bools.end() || it->second == 3)
                return -1;
            bool known = (it->second == 1) == conj; // value the variable takes in context
            return known == b->second ? 1 : 0;
        }
        if (others.count(f))
            return conj ? 1 : 0;
        Formula neg = f.kind() == Formula::Kind::Not ? f.child(0) : Formula::negation(f);
        if (f.is_literal() && others.count(neg))
            return conj ? 0 : 1;
        return -1;
    }
};

Formula simp(const Formula& f);

// Literals for s ∈ set inside a conjunction: hull bounds plus excluded holes.
void emit_conj(const LinearTerm& s, const IntervalSet& set, bool integral, std::vector<Formula>& out)
{
    if (set.is_full())
        return;
    const auto& parts = set.parts();
    Interval hull{parts.front().lo, parts.front().lo_closed, parts.back().hi, parts.back().hi_closed};
    auto lit = [&](Rel rel, const Rational& c) { return Formula::compare(s - LinearTerm(c), rel); };
    std::vector<Formula> holes;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        const Rational& a = *parts[i].hi;
        const Rational& b = *parts[i + 1].lo;
        if (a == b) {
            holes.push_back(lit(Rel::Ne, a));
        } else if (integral && b - a <= 9) {
            for (Rational x = a + 1; x < b; x += 1)
                holes.push_back(lit(Rel::Ne, x));
        } else {
            out.push_back(set.to_formula(s));
            return;
        }
    }
    if (hull.lo && hull.hi && *hull.lo == *hull.hi) {
        out.push_back(lit(Rel::Eq, *hull.lo));
        return;
    }
    if (hull.lo)
        out.push_back(lit(hull.lo_closed ? Rel::Ge : Rel::Gt, *hull.lo));
    if (hull.hi)
        out.push_back(lit(hull.hi_closed ? Rel::Le : Rel::Lt, *hull.hi));
    for (auto& h : holes)
        out.push_back(std::move(h));
}

Formula combine(std::vector<Formula> children, bool conj)
{
    using K = Formula::Kind;
    const K self = conj ? K::And : K::Or;
    const K dual = conj ? K::Or : K::And;

    for (int round = 0; round < 6; ++round) {
        Units units;
        units.conj = conj;
        std::set<Formula, FormulaLess> composites;
        std::vector<Formula> work;
        for (auto& c : children) {
            if (c.kind() == self)
                work.insert(work.end(), c.children().begin(), c.children().end());
            else
                work.push_back(std::move(c));
        }
        for (const auto& c : work) {
            if (c.is_true() || c.is_false()) {
                if (c.is_false() == conj)
                    return Formula::constant(!conj);
                continue;
            }
            if (auto l = as_1d(c))
                units.add_form(*l);
            else if (auto b = as_bool_literal(c))
                units.add_bool(b->first, b->second);
            else if (c.is_literal())
                units.others.insert(c);
            else
                composites.insert(c);
        }

        std::vector<Formula> literal_out;
        for (const auto& [form, entry] : units.forms) {
            const auto& [set, integral] = entry;
            if (conj && set.is_empty())
                return Formula::bottom();
            if (!conj && set.is_full())
                return Formula::top();
            if (conj)
                emit_conj(form, set, integral, literal_out);
            else if (!set.is_empty())
                literal_out.push_back(set.to_formula(form));
        }
        for (const auto& [v, bits] : units.bools) {
            if (bits == 3)
                return Formula::constant(!conj);
            literal_out.push_back(bits == 1 ? Formula::boolean(v) : Formula::negation(Formula::boolean(v)));
        }
        for (const auto& o : units.others) {
            Formula neg = o.kind() == K::Not ? o.child(0) : Formula::negation(o);
            if (units.others.count(neg))
                return Formula::constant(!conj);
            literal_out.push_back(o);
        }

        // contextual pass over composite children
        bool changed = false;
        std::vector<Formula> composite_out;
        for (const auto& c : composites) {
            std::vector<Formula> kept;
            bool absorbed = false;
            bool child_changed = false;
            for (const auto& d : c.children()) {
                int v = units.assess(d);
                // in a conjunction, the composite is a disjunction: a true disjunct absorbs it
                // and a false one drops out; dually for a disjunction of conjunctions
                if (v == (conj ? 1 : 0)) {
                    absorbed = true;
                    break;
                }
                if (v == (conj ? 0 : 1)) {
                    child_changed = true;
                    continue;
                }
                kept.push_back(d);
            }
            if (absorbed) {
                changed = true;
                continue;
            }
            if (child_changed) {
                changed = true;
                composite_out.push_back(simp(conj ? Formula::disjunction(kept) : Formula::conjunction(kept)));
            } else {
                composite_out.push_back(c);
            }
        }

        // subsumption among composites of the dual kind
        if (composite_out.size() <= 200) {
            std::vector<std::set<Formula, FormulaLess>> parts;
            for (const auto& c : composite_out) {
                std::set<Formula, FormulaLess> s;
                if (c.kind() == dual)
                    s.insert(c.children().begin(), c.children().end());
                else
                    s.insert(c);
                parts.push_back(std::move(s));
            }
            std::vector<bool> drop(composite_out.size(), false);
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (drop[i])
                    continue;
                for (std::size_t j = 0; j < parts.size(); ++j) {
                    if (i == j || drop[j] || parts[i].size() > parts[j].size())
                        continue;
                    if (parts[i].size() == parts[j].size() && j < i)
                        continue;
                    if (std::includes(parts[j].begin(), parts[j].end(), parts[i].begin(), parts[i].end(),
                                      FormulaLess{}))
                        drop[j] = true;
                }
            }
            std::vector<Formula> kept;
            for (std::size_t i = 0; i < composite_out.size(); ++i) {
                if (drop[i])
                    changed = true;
                else
                    kept.push_back(composite_out[i]);
            }
            composite_out = std::move(kept);
        }

        std::vector<Formula> all = std::move(literal_out);
        all.insert(all.end(), composite_out.begin(), composite_out.end());
        if (!changed) {
            std::sort(all.begin(), all.end(), FormulaLess{});
            all.erase(std::unique(all.begin(), all.end()), all.end());
            return conj ? Formula::conjunction(std::move(all)) : Formula::disjunction(std::move(all));
        }
        children = std::move(all);
    }
    std::sort(children.begin(), children.end(), FormulaLess{});
    children.erase(std::unique(children.begin(), children.end()), children.end());
    return conj ? Formula::conjunction(std::move(children)) : Formula::disjunction(std::move(children));
}

Formula simp(const Formula& f)
{
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::Atom:
    case K::Not:
        return f;
    case K::And:
    case K::Or: {
        std::vector<Formula> kids;
        for (const auto& c : f.children())
            kids.push_back(simp(c));
        Formula r = combine(std::move(kids), f.kind() == K::And);
        // a collapsed single-form literal set may need one more pass
        return r;
    }
    case K::Exists:
    case K::Forall: {
        Formula body = simp(f.body());
        if (!free_vars(body).count(f.bound()))
            return body;
        return f.kind() == K::Exists ? Formula::exists(f.bound(), body) : Formula::forall(f.bound(), body);
    }
    default:
        return simp(normalize_nnf(f));
    }
}

} // namespace

Formula simplify(const Formula& f)
{
    Formula g = simp(normalize_nnf(f));
    // a second pass lets context discovered in the first one propagate
    Formula h = simp(g);
    return h;
}

} // namespace relic
