#include "relic/compose.hpp"

#include <algorithm>

namespace relic
{

std::string to_string(Verdict::Kind k)
{
    switch (k) {
    case Verdict::Kind::Valid:
        return "valid";
    case Verdict::Kind::Invalid:
        return "invalid";
    case Verdict::Kind::Unknown:
        return "unknown";
    }
    return "?";
}

namespace
{

Formula all_constraints(const SystemModel& s)
{
    std::vector<Formula> parts;
    for (const auto& p : s.properties)
        parts.push_back(p.body);
    for (const auto& c : s.connections)
        parts.push_back(s.connection_formula(c));
    return Formula::conjunction(std::move(parts));
}

std::int64_t newest_offset(const Formula& f)
{
    return offset_range(f).second;
}

Formula anchor(const Formula& f)
{
    if (!has_relative(f))
        return f;
    return shift(f, -newest_offset(f));
}

} // namespace

Formula strongest_property_static(const SystemModel& s, const QeOptions& opt)
{
    Formula phi = all_constraints(s);
    return simplify(eliminate_exists(hidden_variables(s, phi), phi, opt));
}

Formula shifted_closure(const Formula& f, std::int64_t window)
{
    if (!has_relative(f))
        return f;
    auto [lo, hi] = offset_range(f);
    std::vector<Formula> parts;
    for (std::int64_t d = -window - lo; d <= -hi; ++d)
        parts.push_back(shift(f, d));
    return Formula::conjunction(std::move(parts));
}

Formula prune_redundant_shifts(const Formula& f, const QeOptions& opt)
{
    if (f.is_true() || f.is_false() || has_absolute(f) || !has_relative(f))
        return f;
    Formula anchored = anchor(f);
    std::int64_t window = order(anchored);

    std::vector<Formula> reps;
    for (const auto& c : conjuncts(anchored)) {
        Formula a = anchor(c);
        if (std::none_of(reps.begin(), reps.end(), [&](const Formula& r) { return r == a; }))
            reps.push_back(a);
    }
    // try to drop the widest representatives first
    std::stable_sort(reps.begin(), reps.end(),
                     [](const Formula& a, const Formula& b) { return order(a) > order(b); });
    std::vector<bool> kept(reps.size(), true);
    for (std::size_t i = 0; i < reps.size(); ++i) {
        std::vector<Formula> closure;
        for (std::size_t j = 0; j < reps.size(); ++j)
            if (j != i && kept[j] && order(reps[j]) <= order(reps[i]))
                closure.push_back(shifted_closure(reps[j], order(reps[i])));
        if (closure.empty())
            continue;
        try {
            if (entails(Formula::conjunction(closure), reps[i], opt))
                kept[i] = false;
        } catch (const Error&) {
        }
    }
    std::vector<Formula> result;
    for (std::size_t i = 0; i < reps.size(); ++i)
        if (kept[i])
            result.push_back(reps[i]);
    Formula pruned = simplify(Formula::conjunction(result));
    if (pruned == anchored)
        return anchored;
    try {
        if (equivalent(shifted_closure(pruned, window), anchored, opt))
            return pruned;
    } catch (const Error&) {
    }
    return anchored;
}

CompositionResult strongest_property_timed(const SystemModel& s, const QeOptions& opt)
{
    CompositionResult r;
    std::int64_t m = system_order_bound(s);
    r.used_order_bound = m;

    std::vector<Formula> parts;
    for (const auto& p : s.properties)
        for (std::int64_t i = 0; i <= m - p.order; ++i)
            parts.push_back(shift(p.body, -i));
    for (const auto& c : s.connections) {
        Formula eq = s.connection_formula(c);
        for (std::int64_t i = 0; i <= m; ++i)
            parts.push_back(shift(eq, -i));
    }
    Formula phi = Formula::conjunction(std::move(parts));
    r.unpruned = simplify(eliminate_exists(hidden_variables(s, phi), phi, opt));
    r.ssp = prune_redundant_shifts(r.unpruned, opt);
    r.pruning_applied = !(r.ssp == anchor(r.unpruned));
    r.pruned_order = has_relative(r.ssp) ? order(r.ssp) : 0;
    r.init = initial_condition(s, r.pruned_order, opt);
    return r;
}

Formula initial_condition(const SystemModel& s, std::int64_t window_order, const QeOptions& opt)
{
    if (s.initials.empty())
        return Formula::top();
    std::int64_t horizon = std::max(system_order_bound(s), window_order);
    for (const auto& i : s.initials)
        for (const auto& v : free_vars(i.body))
            if (v.index.is_absolute())
                horizon = std::max(horizon, v.index.value + 1);

    std::vector<Formula> parts;
    for (const auto& i : s.initials)
        parts.push_back(i.body);
    for (const auto& p : s.properties)
        for (std::int64_t t = p.order; t < horizon; ++t)
            parts.push_back(instantiate_at(p.body, t));
    for (const auto& c : s.connections) {
        Formula eq = s.connection_formula(c);
        for (std::int64_t t = 0; t < horizon; ++t)
            parts.push_back(instantiate_at(eq, t));
    }
    Formula phi = Formula::conjunction(std::move(parts));

    std::set<std::string> iface = s.interface_names();
    std::vector<TimedVar> hidden;
    for (const auto& v : free_vars(phi)) {
        bool visible = iface.count(v.name) && (!v.index.is_absolute() || v.index.value < window_order);
        if (!visible)
            hidden.push_back(v);
    }
    return simplify(eliminate_exists(hidden, phi, opt));
}

std::optional<Assignment> find_model(const Formula& f, std::string* symbolic, const QeOptions& opt)
{
    auto fv = free_vars(f);
    std::vector<TimedVar> vars(fv.begin(), fv.end());
    bool any_int = false, any_real = false;
    for (const auto& v : vars) {
        any_int = any_int || v.sort == Sort::Int;
        any_real = any_real || v.sort == Sort::Real;
    }
    if (any_int && !any_real) {
        // enumerate boolean assignments, then search the integer residue
        std::vector<TimedVar> bools;
        for (const auto& v : vars)
            if (v.sort == Sort::Bool)
                bools.push_back(v);
        if (bools.empty())
            return int_witness(f, vars, opt);
        std::size_t n = bools.size();
        if (n > 12)
            throw ResourceLimit("too many boolean variables for integer model search");
        for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
            Formula g = f;
            for (std::size_t i = 0; i < n; ++i)
                g = substitute(g, bools[i], ((mask >> i) & 1) != 0);
            g = simplify(g);
            if (g.is_false())
                continue;
            std::vector<TimedVar> ints;
            for (const auto& v : free_vars(g))
                ints.push_back(v);
            auto a = int_witness(g, ints, opt);
            if (!a)
                continue;
            for (std::size_t i = 0; i < n; ++i)
                a->set(bools[i], ((mask >> i) & 1) != 0);
            for (const auto& v : vars)
                if (!a->contains(v))
                    a->set(v, v.sort == Sort::Bool ? Value(false) : Value(Rational(0)));
            return a;
        }
        return std::nullopt;
    }
    auto w = extract_witness(f, vars);
    if (!w)
        return std::nullopt;
    if (auto a = concretize_witness(*w, f))
        return a;
    if (symbolic) {
        std::string text;
        for (const auto& [v, x] : w->numeric)
            text += (text.empty() ? "" : ", ") + to_string(v) + " = " + to_string(x);
        *symbolic = text;
    }
    return std::nullopt;
}

Verdict verify_postulated_static(const Formula& ssp, const Formula& postl, const Formula& assumption,
                                 const QeOptions& opt)
{
    try {
        Formula premise = Formula::conjunction({ssp, assumption});
        if (is_valid(Formula::implies(premise, postl), opt))
            return Verdict::valid(1);
        Verdict v;
        v.kind = Verdict::Kind::Invalid;
        std::string symbolic;
        if (auto a = find_model(Formula::conjunction({premise, Formula::negation(postl)}), &symbolic, opt))
            v.trace.push_back(*a);
        else
            v.symbolic = symbolic;
        return v;
    } catch (const UnsupportedTheory& e) {
        return Verdict::unknown("unsupported", e.what());
    } catch (const ResourceLimit& e) {
        return Verdict::unknown("budget", e.what());
    }
}

} // namespace relic
