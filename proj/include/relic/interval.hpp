#pragma once

#include "relic/formula.hpp"

#include <optional>
#include <string>
#include <vector>

namespace relic
{

/// One connected piece of the real line; a missing bound means unbounded on that side.
struct Interval
{
    std::optional<Rational> lo;
    bool lo_closed = false;
    std::optional<Rational> hi;
    bool hi_closed = false;

    static Interval closed(Rational a, Rational b) { return {std::move(a), true, std::move(b), true}; }
    static Interval point(const Rational& a) { return closed(a, a); }

    bool empty() const;
    bool contains(const Rational& x) const;
    bool operator==(const Interval&) const = default;
};

/// Finite union of disjoint, nonempty intervals kept in increasing order.
class IntervalSet
{
public:
    IntervalSet() = default; // empty
    explicit IntervalSet(std::vector<Interval> parts);

    static IntervalSet full();
    static IntervalSet of(const Interval& i);
    /// { s : s rel c }
    static IntervalSet from_rel(Rel rel, const Rational& c);

    IntervalSet unite(const IntervalSet& o) const;
    IntervalSet intersect(const IntervalSet& o) const;
    IntervalSet complement() const;
    /// Restricts endpoints to integers: every piece is replaced by the closed
    /// hull of the integers it contains.
    IntervalSet integral() const;

    bool is_empty() const { return parts_.empty(); }
    bool is_full() const;
    bool contains(const Rational& x) const;
    bool subset_of(const IntervalSet& o) const;

    const std::vector<Interval>& parts() const { return parts_; }
    bool operator==(const IntervalSet&) const = default;

    /// Formula over the term s (which must have zero constant) describing membership.
    Formula to_formula(const LinearTerm& s) const;

private:
    void normalize();
    std::vector<Interval> parts_;
};

/// "[0, 5]", "(-oo, 3)", "{2} u [4, 5)", "empty"
std::string to_string(const Interval& i);
std::string to_string(const IntervalSet& s);

} // namespace relic
