#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace relic;
using namespace relic::testing;

namespace
{

struct Fixture
{
    SystemModel model;
    Formula postulate;
};

Fixture fixture(const std::string& file)
{
    BuiltSpec b = load_fixture_spec(file);
    EXPECT_TRUE(b.diagnostics.empty()) << file;
    return {b.model, b.postulates.empty() ? Formula::top() : b.postulates.front()};
}

bool timed(const SystemModel& s)
{
    return system_order_bound(s) > 0;
}

Formula full_conjunction(const SystemModel& s)
{
    if (timed(s))
        return replica_conjunction(s);
    std::vector<Formula> parts;
    for (const auto& p : s.properties)
        parts.push_back(p.body);
    for (const auto& c : s.connections)
        parts.push_back(s.connection_formula(c));
    return Formula::conjunction(std::move(parts));
}

} // namespace

TEST(ComposeStatic, Cascade)
{
    Fixture f = fixture("cascade.rlc");
    Formula ssp = strongest_property_static(f.model);
    EXPECT_TRUE(equivalent(ssp, make_static(F("in1 - out2 < 2*B"), {"B"})));
}

TEST(ComposeStatic, AbcReal)
{
    Fixture f = fixture("abc.rlc");
    Formula ssp = strongest_property_static(f.model);
    EXPECT_TRUE(equivalent(ssp, F("In_S <= 10 => Out_S < 4*In_S + 15")));
}

TEST(ComposeStatic, AbcIntegerIsStricter)
{
    Fixture f = fixture("abc_int.rlc");
    Formula ssp = strongest_property_static(f.model);
    EXPECT_TRUE(entails(ssp, F("In_S <= 10 => Out_S <= 4*In_S + 12", {}, Sort::Int)));
}

TEST(ComposeStatic, SingleComponentUnchanged)
{
    SystemModel s;
    s.components = {{"A", {{"A", "i", Direction::In, Sort::Real}, {"A", "o", Direction::Out, Sort::Real}}}};
    s.externals = {{{"A", "i"}, "i"}, {{"A", "o"}, "o"}};
    add_property(s, "A", F("o <= 2*i + 1"));
    EXPECT_TRUE(equivalent(strongest_property_static(s), F("o <= 2*i + 1")));
}

TEST(ComposeStatic, AlgebraicLoop)
{
    Fixture f = fixture("loop.rlc");
    EXPECT_TRUE(equivalent(strongest_property_static(f.model), F("y = 2*u")));
}

TEST(ComposeTimed, DelayCascade)
{
    Fixture f = fixture("delay.rlc");
    CompositionResult r = strongest_property_timed(f.model);
    EXPECT_EQ(r.used_order_bound, 2);
    EXPECT_EQ(r.ssp, F("y2 = u1[k-2]"));
    EXPECT_TRUE(equivalent(r.init, F("y2[0] = 0 and y2[1] = 1")));
}

TEST(ComposeTimed, Example6)
{
    Fixture f = fixture("example6.rlc");
    CompositionResult r = strongest_property_timed(f.model);
    EXPECT_EQ(r.used_order_bound, 2);
    EXPECT_TRUE(equivalent(r.unpruned, F("z = u[k-1] + w[k-1] and z[k-1] = u[k-2] + w[k-2]")));
    EXPECT_TRUE(equivalent(r.ssp, F("z = u[k-1] + w[k-1]")));
    EXPECT_TRUE(r.pruning_applied);
    EXPECT_EQ(r.pruned_order, 1);
    EXPECT_TRUE(r.init.is_true());
}

TEST(ComposeTimed, Vehicle)
{
    Fixture f = fixture("vehicle.rlc");
    CompositionResult r = strongest_property_timed(f.model);
    EXPECT_EQ(r.used_order_bound, 3);
    EXPECT_EQ(r.pruned_order, 1);
    EXPECT_TRUE(equivalent(
        r.ssp, F("51*ActualSpeed - 49*ActualSpeed[k-1] - TargetSpeed[k-1] - TargetSpeed = 0")));
    EXPECT_TRUE(equivalent(r.init, F("51*ActualSpeed[0] - TargetSpeed[0] = 0")));
}

TEST(InitialCondition, NoInitialsIsTrue)
{
    Fixture f = fixture("example6.rlc");
    EXPECT_TRUE(initial_condition(f.model, 1).is_true());
}

TEST(Prune, Example6Pair)
{
    Formula f = F("z[k+1] = u + w and z = u[k-1] + w[k-1]");
    EXPECT_TRUE(equivalent(prune_redundant_shifts(f), F("z = u[k-1] + w[k-1]")));
}

TEST(Prune, NothingToDrop)
{
    Formula f = F("y = u[k-1] and x > 0");
    EXPECT_EQ(prune_redundant_shifts(f), f);
}

TEST(Verify, AbcRealCounterexample)
{
    Fixture f = fixture("abc.rlc");
    Formula ssp = strongest_property_static(f.model);
    Verdict v = verify_postulated_static(ssp, f.postulate);
    ASSERT_EQ(v.kind, Verdict::Kind::Invalid);
    ASSERT_EQ(v.trace.size(), 1u);
    EXPECT_TRUE(evaluate(Formula::conjunction({ssp, Formula::negation(f.postulate)}), v.trace[0]));
}

TEST(Verify, AbcIntegerValid)
{
    Fixture f = fixture("abc_int.rlc");
    Verdict v = verify_postulated_static(strongest_property_static(f.model), f.postulate);
    EXPECT_EQ(v.kind, Verdict::Kind::Valid);
}

TEST(Verify, Reflexive)
{
    Formula ssp = F("In_S <= 10 => Out_S < 4*In_S + 15");
    EXPECT_EQ(verify_postulated_static(ssp, ssp).kind, Verdict::Kind::Valid);
}

class FixtureProperties : public ::testing::TestWithParam<std::string>
{
};

TEST_P(FixtureProperties, SspIsImpliedByComponents)
{
    Fixture f = fixture(GetParam());
    Formula phi = full_conjunction(f.model);
    Formula ssp = timed(f.model) ? strongest_property_timed(f.model).ssp : strongest_property_static(f.model);
    EXPECT_TRUE(entails(phi, ssp));
}

TEST_P(FixtureProperties, SspIsStrongest)
{
    Fixture f = fixture(GetParam());
    Formula phi = full_conjunction(f.model);
    Formula ssp;
    if (timed(f.model)) {
        CompositionResult r = strongest_property_timed(f.model);
        ssp = shifted_closure(r.ssp, r.used_order_bound);
    } else {
        ssp = strongest_property_static(f.model);
    }
    auto hidden = hidden_variables(f.model, phi);
    std::set<TimedVar> visible;
    for (const auto& v : free_vars(phi))
        if (std::find(hidden.begin(), hidden.end(), v) == hidden.end())
            visible.insert(v);
    for (const auto& v : free_vars(ssp))
        EXPECT_TRUE(visible.count(v)) << to_string(v);

    Rng rng(41);
    int positives = 0;
    for (int i = 0; i < 40; ++i) {
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
        EXPECT_EQ(holds, exists_completion(phi, hidden, a)) << GetParam();
    }
    EXPECT_GE(positives, 10);
}

INSTANTIATE_TEST_SUITE_P(AllSpecs, FixtureProperties,
                         ::testing::Values("cascade.rlc", "abc.rlc", "abc_int.rlc", "loop.rlc", "delay.rlc",
                                           "example6.rlc", "vehicle.rlc"),
                         [](const auto& info) { return info.param.substr(0, info.param.find('.')); });

class TimedFixtureProperties : public ::testing::TestWithParam<std::string>
{
};

TEST_P(TimedFixtureProperties, PruningKeepsWindowSemantics)
{
    Fixture f = fixture(GetParam());
    CompositionResult r = strongest_property_timed(f.model);
    Formula closure = shifted_closure(r.ssp, r.used_order_bound);
    EXPECT_TRUE(equivalent(closure, r.unpruned));
    auto fv = free_vars(Formula::conjunction({closure, r.unpruned}));
    Rng rng(42);
    for (int i = 0; i < 40; ++i) {
        Assignment a = random_visible(fv, rng);
        EXPECT_EQ(evaluate(closure, a), evaluate(r.unpruned, a));
    }
}

TEST_P(TimedFixtureProperties, BoundDominatesPrunedOrder)
{
    Fixture f = fixture(GetParam());
    CompositionResult r = strongest_property_timed(f.model);
    EXPECT_GE(system_order_bound(f.model), r.pruned_order);
    std::set<std::string> iface = f.model.interface_names();
    for (const auto& v : free_vars(r.init)) {
        EXPECT_TRUE(iface.count(v.name));
        EXPECT_LT(v.index.value, r.pruned_order);
    }
}

INSTANTIATE_TEST_SUITE_P(TimedSpecs, TimedFixtureProperties,
                         ::testing::Values("delay.rlc", "example6.rlc", "vehicle.rlc"),
                         [](const auto& info) { return info.param.substr(0, info.param.find('.')); });
