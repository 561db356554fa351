#include "relic/interval.hpp"

#include <algorithm>

namespace relic
{

bool Interval::empty() const
{
    if (!lo || !hi)
        return false;
    if (*lo < *hi)
        return false;
    return !(*lo == *hi && lo_closed && hi_closed);
}

bool Interval::contains(const Rational& x) const
{
    if (lo && (x < *lo || (x == *lo && !lo_closed)))
        return false;
    if (hi && (x > *hi || (x == *hi && !hi_closed)))
        return false;
    return true;
}

namespace
{

// lower endpoint order: -oo first, then by value, closed before open
bool lower_before(const Interval& a, const Interval& b)
{
    if (!a.lo || !b.lo)
        return !a.lo && b.lo;
    if (*a.lo != *b.lo)
        return *a.lo < *b.lo;
    return a.lo_closed && !b.lo_closed;
}

// does a's upper end reach at least b's lower end so the two connect
bool connects(const Interval& a, const Interval& b)
{
    if (!a.hi || !b.lo)
        return true;
    if (*a.hi > *b.lo)
        return true;
    return *a.hi == *b.lo && (a.hi_closed || b.lo_closed);
}

void extend_upper(Interval& a, const Interval& b)
{
    if (!a.hi)
        return;
    if (!b.hi) {
        a.hi.reset();
        a.hi_closed = false;
        return;
    }
    if (*b.hi > *a.hi) {
        a.hi = b.hi;
        a.hi_closed = b.hi_closed;
    } else if (*b.hi == *a.hi) {
        a.hi_closed = a.hi_closed || b.hi_closed;
    }
}

Interval meet(const Interval& a, const Interval& b)
{
    Interval r;
    if (!a.lo || (b.lo && (*b.lo > *a.lo || (*b.lo == *a.lo && !b.lo_closed)))) {
        r.lo = b.lo;
        r.lo_closed = b.lo_closed;
    } else {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed;
    }
    if (!a.hi || (b.hi && (*b.hi < *a.hi || (*b.hi == *a.hi && !b.hi_closed)))) {
        r.hi = b.hi;
        r.hi_closed = b.hi_closed;
    } else {
        r.hi = a.hi;
        r.hi_closed = a.hi_closed;
    }
    return r;
}

} // namespace

IntervalSet::IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts))
{
    normalize();
}

void IntervalSet::normalize()
{
    parts_.erase(std::remove_if(parts_.begin(), parts_.end(), [](const Interval& i) { return i.empty(); }),
                 parts_.end());
    std::sort(parts_.begin(), parts_.end(), lower_before);
    std::vector<Interval> merged;
    for (const auto& p : parts_) {
        if (!merged.empty() && connects(merged.back(), p))
            extend_upper(merged.back(), p);
        else
            merged.push_back(p);
    }
    parts_ = std::move(merged);
}

IntervalSet IntervalSet::full()
{
    return IntervalSet({Interval{}});
}

IntervalSet IntervalSet::of(const Interval& i)
{
    return IntervalSet({i});
}

IntervalSet IntervalSet::from_rel(Rel rel, const Rational& c)
{
    switch (rel) {
    case Rel::Eq:
        return of(Interval::point(c));
    case Rel::Ne:
        return IntervalSet({Interval{std::nullopt, false, c, false}, Interval{c, false, std::nullopt, false}});
    case Rel::Lt:
        return of(Interval{std::nullopt, false, c, false});
    case Rel::Le:
        return of(Interval{std::nullopt, false, c, true});
    case Rel::Gt:
        return of(Interval{c, false, std::nullopt, false});
    case Rel::Ge:
        return of(Interval{c, true, std::nullopt, false});
    }
    return {};
}

IntervalSet IntervalSet::unite(const IntervalSet& o) const
{
    std::vector<Interval> all = parts_;
    all.insert(all.end(), o.parts_.begin(), o.parts_.end());
    return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const
{
    std::vector<Interval> all;
    for (const auto& a : parts_)
        for (const auto& b : o.parts_)
            all.push_back(meet(a, b));
    return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::complement() const
{
    std::vector<Interval> gaps;
    Interval cur; // running gap starting at -oo
    for (const auto& p : parts_) {
        if (p.lo) {
            cur.hi = p.lo;
            cur.hi_closed = !p.lo_closed;
            gaps.push_back(cur);
        }
        if (!p.hi)
            return IntervalSet(std::move(gaps));
        cur = Interval{p.hi, !p.hi_closed, std::nullopt, false};
    }
    gaps.push_back(cur);
    return IntervalSet(std::move(gaps));
}

IntervalSet IntervalSet::integral() const
{
    std::vector<Interval> parts;
    for (const auto& p : parts_) {
        Interval q;
        if (p.lo) {
            Integer lo = p.lo_closed ? ceil(*p.lo) : Integer(floor(*p.lo) + 1);
            q.lo = Rational(lo);
            q.lo_closed = true;
        }
        if (p.hi) {
            Integer hi = p.hi_closed ? floor(*p.hi) : Integer(ceil(*p.hi) - 1);
            q.hi = Rational(hi);
            q.hi_closed = true;
        }
        parts.push_back(q);
    }
    IntervalSet s(std::move(parts));
    // neighbouring integer runs [a, b] and [b+1, c] describe one run
    std::vector<Interval> merged;
    for (const auto& p : s.parts_) {
        if (!merged.empty() && merged.back().hi && p.lo && *merged.back().hi + 1 == *p.lo)
            extend_upper(merged.back(), p);
        else
            merged.push_back(p);
    }
    s.parts_ = std::move(merged);
    return s;
}

bool IntervalSet::is_full() const
{
    return parts_.size() == 1 && !parts_[0].lo && !parts_[0].hi;
}

bool IntervalSet::contains(const Rational& x) const
{
    return std::any_of(parts_.begin(), parts_.end(), [&](const Interval& i) { return i.contains(x); });
}

bool IntervalSet::subset_of(const IntervalSet& o) const
{
    return intersect(o) == *this;
}

Formula IntervalSet::to_formula(const LinearTerm& s) const
{
    if (is_empty())
        return Formula::bottom();
    if (is_full())
        return Formula::top();
    auto lit = [&](Rel rel, const Rational& c) { return Formula::compare(s - LinearTerm(c), rel); };
    IntervalSet gaps = complement();
    bool only_points = std::all_of(gaps.parts_.begin(), gaps.parts_.end(),
                                   [](const Interval& i) { return i.lo && i.hi && *i.lo == *i.hi; });
    if (only_points) {
        std::vector<Formula> ne;
        for (const auto& g : gaps.parts_)
            ne.push_back(lit(Rel::Ne, *g.lo));
        return Formula::conjunction(std::move(ne));
    }
    std::vector<Formula> alts;
    for (const auto& p : parts_) {
        if (p.lo && p.hi && *p.lo == *p.hi) {
            alts.push_back(lit(Rel::Eq, *p.lo));
            continue;
        }
        std::vector<Formula> bounds;
        if (p.lo)
            bounds.push_back(lit(p.lo_closed ? Rel::Ge : Rel::Gt, *p.lo));
        if (p.hi)
            bounds.push_back(lit(p.hi_closed ? Rel::Le : Rel::Lt, *p.hi));
        alts.push_back(Formula::conjunction(std::move(bounds)));
    }
    return Formula::disjunction(std::move(alts));
}

std::string to_string(const Interval& i)
{
    if (i.lo && i.hi && *i.lo == *i.hi && i.lo_closed && i.hi_closed)
        return "{" + to_string(*i.lo) + "}";
    std::string s = i.lo ? (i.lo_closed ? "[" : "(") + to_string(*i.lo) : "(-oo";
    s += ", ";
    s += i.hi ? to_string(*i.hi) + (i.hi_closed ? "]" : ")") : "+oo)";
    return s;
}

std::string to_string(const IntervalSet& s)
{
    if (s.is_empty())
        return "empty";
    std::string out;
    for (const auto& p : s.parts()) {
        if (!out.empty())
            out += " u ";
        out += to_string(p);
    }
    return out;
}

} // namespace relic
