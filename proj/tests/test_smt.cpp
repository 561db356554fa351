#include "relic/smt.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace relic;
using namespace relic::testing;

namespace
{

SmtResult run(const std::string& script)
{
    return solve(parse_smtlib(script));
}

Rational value_of(const SmtResult& r, const std::string& name, Sort sort)
{
    const Value* v = r.model.find(TimedVar(name, TimeIndex::fixed(), sort));
    EXPECT_NE(v, nullptr) << name;
    return v ? std::get<Rational>(*v) : Rational(0);
}

} // namespace

TEST(SmtParse, SingleAssertion)
{
    SmtProblem p = parse_smtlib("(declare-fun x () Real)(assert (> x 0))(check-sat)");
    ASSERT_EQ(p.declarations.size(), 1u);
    ASSERT_EQ(p.assertions.size(), 1u);
    EXPECT_EQ(p.assertions[0], make_static(F("x > 0"), {"x"}));
    EXPECT_TRUE(p.check_sat);
}

TEST(SmtParse, NonlinearRejected)
{
    EXPECT_THROW(parse_smtlib("(declare-fun x () Real)(declare-fun y () Real)(assert (= (* x y) 1))"),
                 UnsupportedTheory);
}

TEST(SmtParse, MixedBoolReal)
{
    SmtProblem p = parse_smtlib("(declare-fun p () Bool)(declare-fun x () Real)(assert (=> p (< x 3)))");
    ASSERT_EQ(p.assertions.size(), 1u);
    EXPECT_EQ(p.assertions[0], make_static(F("p => x < 3", {{"p", Sort::Bool}}), {"p", "x"}));
}

TEST(SmtParse, UnknownCommandHasPosition)
{
    try {
        parse_smtlib("(declare-fun x () Real)\n(push 1)");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
    }
}

TEST(SmtParse, UndeclaredSymbol)
{
    EXPECT_THROW(parse_smtlib("(assert (> x 0))"), ParseError);
}

TEST(SmtSolve, Contradiction)
{
    EXPECT_EQ(run("(declare-fun x () Real)(assert (> x 0))(assert (< x 0))").status, SmtResult::Status::Unsat);
}

TEST(SmtSolve, RealDensity)
{
    SmtResult r = run("(declare-fun x () Real)(assert (> x 0))(assert (< x 1))");
    ASSERT_EQ(r.status, SmtResult::Status::Sat);
    Rational x = value_of(r, "x", Sort::Real);
    EXPECT_GT(x, 0);
    EXPECT_LT(x, 1);
}

TEST(SmtSolve, NoIntegerInUnitInterval)
{
    EXPECT_EQ(run("(declare-fun x () Int)(assert (> x 0))(assert (< x 1))").status, SmtResult::Status::Unsat);
}

TEST(SmtMixed, BoundedIntegerEncoding)
{
    SmtResult r = run("(declare-fun x () Int)(declare-fun y () Real)"
                      "(assert (and (>= x 1) (<= x 2)))(assert (>= x 2))(assert (= y (to_real x)))");
    ASSERT_EQ(r.status, SmtResult::Status::Sat);
    EXPECT_EQ(value_of(r, "x", Sort::Int), 2);
}

TEST(SmtMixed, ParityRefutesRelaxation)
{
    SmtProblem p = parse_smtlib("(declare-fun x () Int)(declare-fun y () Real)(assert (= (* 2 x) 3))"
                                "(assert (>= y 0))");
    SmtResult r = check_sat_mixed(p);
    EXPECT_EQ(r.status, SmtResult::Status::Unsat);
    EXPECT_FALSE(decide_sentence_int(F("exists x: int. 2*x = 3", {{"x", Sort::Int}})));
}

TEST(SmtMixed, IntegerEqualsRealInUnitInterval)
{
    SmtResult r = run("(declare-fun x () Int)(declare-fun y () Real)"
                      "(assert (= (to_real x) y))(assert (> y 0))(assert (< y 1))");
    EXPECT_EQ(r.status, SmtResult::Status::Unsat);
}

TEST(SmtMixed, UnboundedIntegersWithDisjunction)
{
    SmtProblem p = parse_smtlib("(declare-fun a () Int)(declare-fun b () Real)(declare-fun c () Int)"
                                "(assert (> (- (* 2 a) c) 2))"
                                "(assert (or (<= b (- 1.5)) (>= (* 3 (- c 1)) (* 2 b))))"
                                "(assert (<= (+ (* 7 a) (* (- 4) c) b) 4))");
    SmtResult r = solve(p);
    ASSERT_EQ(r.status, SmtResult::Status::Sat);
    EXPECT_TRUE(model_satisfies(p, r.model));
}

TEST(SmtMixed, RefinementCapGivesUnknown)
{
    SmtOptions opt;
    opt.refinement_cap = 1;
    SmtProblem p = parse_smtlib("(declare-fun x () Int)(declare-fun y () Int)(declare-fun r () Real)"
                                "(assert (= (* 3 x) (+ (* 3 y) 1)))(assert (= r 0.0))");
    SmtResult res = check_sat_mixed(p, opt);
    EXPECT_NE(res.status, SmtResult::Status::Sat);
}

TEST(SmtModel, FormatIsExactRational)
{
    SmtProblem p = parse_smtlib("(declare-fun x () Real)(declare-fun b () Bool)(assert (= (* 4 x) 1))(assert b)");
    SmtResult r = solve(p);
    ASSERT_EQ(r.status, SmtResult::Status::Sat);
    EXPECT_EQ(format_model(p, r.model), "x 1/4\nb true\n");
}

TEST(SmtProperties, ModelsAreSoundAndUnsatIsNeverWitnessed)
{
    Rng rng(61);
    int sat = 0, unsat = 0;
    for (int i = 0; i < 150; ++i) {
        std::string script = random_smt_script(rng);
        SmtProblem p = parse_smtlib(script);
        SmtResult r = solve(p);
        if (r.status == SmtResult::Status::Sat) {
            ++sat;
            for (const auto& d : p.declarations)
                EXPECT_TRUE(r.model.contains(d)) << script;
            EXPECT_TRUE(model_satisfies(p, r.model)) << script;
        } else if (r.status == SmtResult::Status::Unsat) {
            ++unsat;
            Assignment a;
            EXPECT_FALSE(box_witness(p, 0, a)) << script;
        }
    }
    EXPECT_GT(sat, 20);
    EXPECT_GT(unsat, 5);
}
