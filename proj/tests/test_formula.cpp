#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace relic;
using namespace relic::testing;

namespace
{

const std::map<std::string, Sort> kBools{{"a", Sort::Bool}, {"b", Sort::Bool}, {"c", Sort::Bool}};

bool agree_on_random(const Formula& f, const Formula& g, const std::vector<TimedVar>& vars, Rng& rng,
                     int trials = 40)
{
    for (int i = 0; i < trials; ++i) {
        Assignment a = rng.assignment(vars);
        if (evaluate(f, a) != evaluate(g, a))
            return false;
    }
    return true;
}

bool nnf_shape(const Formula& f)
{
    switch (f.kind()) {
    case Formula::Kind::Atom:
        return true;
    case Formula::Kind::Not:
        return f.child(0).is_atom();
    case Formula::Kind::Implies:
    case Formula::Kind::Iff:
        return false;
    default:
        for (const auto& c : f.children())
            if (!nnf_shape(c))
                return false;
        return true;
    }
}

bool has_ne(const Formula& f)
{
    if (f.is_atom()) {
        const auto* c = std::get_if<Compare>(&f.atom());
        return c && c->rel == Rel::Ne;
    }
    for (const auto& c : f.children())
        if (has_ne(c))
            return true;
    return false;
}

bool dnf_shape(const Formula& f)
{
    auto literal = [](const Formula& g) { return g.is_literal(); };
    for (const auto& d : disjuncts(f))
        for (const auto& c : conjuncts(d))
            if (!literal(c))
                return false;
    return !has_ne(f);
}

std::vector<TimedVar> four_reals()
{
    return {var("w"), var("x"), var("y"), var("z")};
}

} // namespace

TEST(Nnf, NegatedImplication)
{
    EXPECT_EQ(normalize_nnf(F("not (a => b)", kBools)), F("a and not b", kBools));
}

TEST(Nnf, NegatedStrictBound)
{
    EXPECT_EQ(normalize_nnf(F("not (x < 0)")), F("x >= 0"));
}

TEST(Nnf, DeMorgan)
{
    EXPECT_EQ(normalize_nnf(F("not (x = 0 and y > 0)")), F("x != 0 or y <= 0"));
}

TEST(Nnf, NegatedDivisibilityStaysNegated)
{
    Formula d = Formula::divides(Integer(2), T(var("y", 0, Sort::Int)));
    Formula n = normalize_nnf(Formula::negation(d));
    ASSERT_EQ(n.kind(), Formula::Kind::Not);
    EXPECT_EQ(n.child(0), d);
}

TEST(Nnf, RejectsIllSortedInput)
{
    Formula bad = Formula::conjunction(
        {Formula::boolean(var("p", 0, Sort::Bool)), Formula::compare(T(var("p", 0, Sort::Real)), Rel::Gt)});
    try {
        normalize_nnf(bad);
        FAIL() << "expected a sort error";
    } catch (const SortError& e) {
        EXPECT_NE(std::string(e.what()).find('p'), std::string::npos);
    }
}

TEST(Dnf, Distribution)
{
    EXPECT_EQ(to_dnf(F("(a or b) and c", kBools)), F("(a and c) or (b and c)", kBools));
}

TEST(Dnf, DisequalitySplit)
{
    EXPECT_EQ(to_dnf(F("x != 0")), F("x < 0 or x > 0"));
}

TEST(Dnf, ConjunctionIsFixedPoint)
{
    Formula f = F("x < 1 and y >= 2 and a", kBools);
    EXPECT_EQ(to_dnf(f), f);
}

TEST(Dnf, RejectsQuantifiers)
{
    EXPECT_THROW(to_dnf(F("exists x: real. x = y")), Error);
}

TEST(Substitute, ConstantIntoEquality)
{
    EXPECT_EQ(substitute(F("y = x + 1"), var("x"), C(2)), F("y = 3"));
}

TEST(Substitute, TermIntoBound)
{
    EXPECT_EQ(substitute(F("x <= z"), var("x"), T(var("y")) - C(1)), F("y - 1 <= z"));
}

TEST(Substitute, OnlyFreeOccurrences)
{
    EXPECT_EQ(substitute(F("exists x: real. x = y"), var("y"), C(0)), F("exists x: real. x = 0"));
}

TEST(Substitute, BoundTargetIsCapture)
{
    EXPECT_THROW(substitute(F("exists x: real. x = y"), var("x"), C(0)), CaptureError);
}

TEST(Shift, DelayedEquality)
{
    EXPECT_EQ(shift(F("y = u[k-1]"), 1), F("y[k+1] = u"));
}

TEST(Shift, ZeroIsIdentity)
{
    Formula f = F("y[k-2] + 3*u < 4 or z[k+1] = 0");
    EXPECT_EQ(shift(f, 0), f);
}

TEST(Shift, ZeroOrderPropertyByTwo)
{
    EXPECT_EQ(shift(F("z = y + x"), 2), F("z[k+2] = y[k+2] + x[k+2]"));
}

TEST(Shift, AbsoluteIndexRejected)
{
    EXPECT_THROW(shift(F("y[0] = 1"), 1), ShiftDomainError);
}

TEST(Shift, StaticVariablesUnchanged)
{
    TimedVar b("B", TimeIndex::fixed());
    Formula f = Formula::compare(T(var("x")) - T(b), Rel::Lt);
    Formula g = shift(f, -3);
    EXPECT_TRUE(free_vars(g).count(b));
    EXPECT_TRUE(free_vars(g).count(var("x", -3)));
}

TEST(Order, FirstOrderRecurrence)
{
    EXPECT_EQ(order(F("x = -x[k-1] + u")), 1);
}

TEST(Order, ZeroOrder)
{
    EXPECT_EQ(order(F("u_f >= 0")), 0);
}

TEST(Order, SpansBothSides)
{
    EXPECT_EQ(order(F("y[k+1] = u[k-1]")), 2);
}

TEST(Order, NoVariables)
{
    EXPECT_EQ(order(Formula::top()), 0);
}

TEST(Evaluate, BufferBound)
{
    TimedVar b("B", TimeIndex::fixed());
    Formula f = Formula::compare(T(var("in1")) - T(var("out2")), Rel::Lt, T(b) * Rational(2));
    Assignment a;
    a.set(var("in1"), Rational(3));
    a.set(var("out2"), Rational(0));
    a.set(b, Rational(2));
    EXPECT_TRUE(evaluate(f, a));
}

TEST(Evaluate, Parity)
{
    TimedVar y = var("y", 0, Sort::Int);
    Assignment a;
    a.set(y, Rational(3));
    EXPECT_FALSE(evaluate(Formula::divides(Integer(2), T(y)), a));
    a.set(y, Rational(4));
    EXPECT_TRUE(evaluate(Formula::divides(Integer(2), T(y)), a));
}

TEST(Evaluate, AbcCounterexampleSatisfiesSsp)
{
    Assignment a;
    a.set(var("In_S"), Rational(9));
    a.set(var("Out_S"), Rational(50));
    EXPECT_TRUE(evaluate(F("In_S <= 10 => Out_S < 4*In_S + 15"), a));
    EXPECT_FALSE(evaluate(F("In_S <= 10 => Out_S <= 4*In_S + 12"), a));
}

TEST(Evaluate, MissingVariable)
{
    Assignment a;
    a.set(var("x"), Rational(1));
    EXPECT_THROW(evaluate(F("x + y > 0"), a), UnboundVariable);
}

TEST(FreeVars, BoundVariableExcluded)
{
    EXPECT_EQ(free_vars(F("exists x: real. x = y")), std::set<TimedVar>{var("y")});
}

TEST(FreeVars, TrueHasNone)
{
    EXPECT_TRUE(free_vars(Formula::top()).empty());
}

TEST(FreeVars, TimedVariables)
{
    EXPECT_EQ(free_vars(F("y = u[k-1]")), (std::set<TimedVar>{var("y"), var("u", -1)}));
}

TEST(Canonical, DecimalCoefficientsAreExact)
{
    EXPECT_EQ(F("u = 0.2*e + 0.2*f"), F("5*u = e + f"));
}

TEST(Canonical, PositiveLeadingCoefficient)
{
    EXPECT_EQ(F("-x < 0"), F("x > 0"));
    EXPECT_EQ(F("2*x + 4*y <= 6"), F("x + 2*y <= 3"));
}

TEST(Properties, NnfPreservesSemantics)
{
    Rng rng(101);
    auto vars = four_reals();
    for (int i = 0; i < 200; ++i) {
        Formula f = rng.formula(vars, 5);
        Formula n = normalize_nnf(f);
        EXPECT_TRUE(nnf_shape(n)) << to_string(n);
        EXPECT_TRUE(agree_on_random(f, n, vars, rng)) << to_string(f);
    }
}

TEST(Properties, DnfPreservesSemantics)
{
    Rng rng(202);
    auto vars = four_reals();
    for (int i = 0; i < 200; ++i) {
        Formula f = rng.formula(vars, 3);
        Formula d = to_dnf(f);
        EXPECT_TRUE(dnf_shape(d)) << to_string(d);
        EXPECT_TRUE(agree_on_random(f, d, vars, rng)) << to_string(f);
    }
}

TEST(Properties, SubstitutePreservesSemantics)
{
    Rng rng(303);
    auto vars = four_reals();
    for (int i = 0; i < 200; ++i) {
        Formula f = rng.formula(vars, 5);
        LinearTerm t = rng.term({vars[1], vars[2], vars[3]});
        Formula g = substitute(f, vars[0], t);
        for (int j = 0; j < 20; ++j) {
            Assignment a = rng.assignment(vars);
            Assignment b = a;
            b.set(vars[0], evaluate(t, a));
            EXPECT_EQ(evaluate(g, a), evaluate(f, b));
        }
    }
}

TEST(Properties, ShiftPreservesSemanticsUnderRelabeling)
{
    Rng rng(404);
    std::vector<TimedVar> vars{var("x"), var("x", -1), var("y", -2), var("u", -1)};
    for (int i = 0; i < 200; ++i) {
        Formula f = rng.formula(vars, 5);
        int d = rng.uniform(-3, 3);
        Formula g = shift(f, d);
        for (int j = 0; j < 20; ++j) {
            Assignment a = rng.assignment(vars);
            Assignment b;
            for (const auto& [v, x] : a.values())
                b.set(var(v.name, v.index.value + d), x);
            EXPECT_EQ(evaluate(f, a), evaluate(g, b));
        }
    }
}

TEST(Properties, ShiftComposesAndKeepsOrder)
{
    Rng rng(505);
    std::vector<TimedVar> vars{var("x"), var("x", -1), var("y", -2), var("u", 1)};
    for (int i = 0; i < 200; ++i) {
        Formula f = rng.formula(vars, 4);
        int a = rng.uniform(-4, 4), b = rng.uniform(-4, 4);
        EXPECT_EQ(shift(shift(f, a), b), shift(f, a + b));
        EXPECT_EQ(order(shift(f, a)), order(f));
    }
}
