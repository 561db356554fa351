#include "relic/induction.hpp"

#include <future>

namespace relic
{

namespace
{

Formula anchored(const Formula& f)
{
    if (!has_relative(f))
        return f;
    return shift(f, -offset_range(f).second);
}

// f instantiated at every absolute step t in [order(f), last]
void instances(std::vector<Formula>& out, const Formula& f, std::int64_t last)
{
    if (f.is_true())
        return;
    for (std::int64_t t = order(f); t <= last; ++t)
        out.push_back(instantiate_at(f, t));
}

// f shifted to every position inside the window [−width, 0]
void window_shifts(std::vector<Formula>& out, const Formula& f, std::int64_t width)
{
    if (f.is_true())
        return;
    for (std::int64_t d = -(width - order(f)); d <= 0; ++d)
        out.push_back(shift(f, d));
}

Formula closed(const Formula& f)
{
    auto fv = free_vars(f);
    return forall_closure({fv.begin(), fv.end()}, f);
}

} // namespace

Formula base_obligation(const Formula& init, const Formula& ssp_in, const Formula& postl_in, int k,
                        const Formula& assumption)
{
    Formula ssp = anchored(ssp_in);
    Formula postl = anchored(postl_in);
    Formula assume = anchored(assumption);
    std::int64_t p = order(postl);
    std::int64_t last = p + k - 1;

    std::vector<Formula> premise{init};
    instances(premise, ssp, last);
    instances(premise, assume, last);
    std::vector<Formula> goal;
    for (std::int64_t t = p; t <= last; ++t)
        goal.push_back(instantiate_at(postl, t));
    return closed(Formula::implies(Formula::conjunction(std::move(premise)), Formula::conjunction(std::move(goal))));
}

Formula inductive_obligation(const Formula& ssp_in, const Formula& postl_in, int k, const Formula& assumption)
{
    Formula ssp = anchored(ssp_in);
    Formula postl = anchored(postl_in);
    Formula assume = anchored(assumption);
    std::int64_t width = k + order(postl);

    std::vector<Formula> premise;
    window_shifts(premise, ssp, width);
    window_shifts(premise, assume, width);
    for (int i = 1; i <= k; ++i)
        premise.push_back(shift(postl, -i));
    return closed(Formula::implies(Formula::conjunction(std::move(premise)), postl));
}

std::vector<Assignment> group_by_step(const Assignment& a)
{
    std::vector<Assignment> trace;
    std::vector<std::pair<TimedVar, Value>> statics;
    for (const auto& [v, x] : a.values()) {
        if (!v.index.is_absolute()) {
            statics.emplace_back(v, x);
            continue;
        }
        auto t = static_cast<std::size_t>(v.index.value);
        if (trace.size() <= t)
            trace.resize(t + 1);
        trace[t].set(v, x);
    }
    if (trace.empty())
        trace.resize(1);
    for (auto& step : trace)
        for (const auto& [v, x] : statics)
            step.set(v, x);
    return trace;
}

Assignment merge_trace(const std::vector<Assignment>& trace)
{
    Assignment out;
    for (const auto& step : trace)
        for (const auto& [v, x] : step.values())
            out.set(v, x);
    return out;
}

Verdict k_induction(const Formula& init, const Formula& ssp, const Formula& postl, const InductionConfig& cfg,
                    const Formula& assumption)
{
    if (has_absolute(ssp) || has_absolute(postl) || has_absolute(assumption))
        return Verdict::unknown("unsupported", "k-induction needs relative step indices in ssp, postulate and assumption");
    try {
        for (int k = 1; k <= cfg.k_max; ++k) {
            Formula base = base_obligation(init, ssp, postl, k, assumption);
            Formula step = inductive_obligation(ssp, postl, k, assumption);
            bool base_ok, step_ok;
            if (cfg.parallel) {
                auto b = std::async(std::launch::async, [&] { return is_valid(base, cfg.qe); });
                step_ok = is_valid(step, cfg.qe);
                base_ok = b.get();
            } else {
                base_ok = is_valid(base, cfg.qe);
                step_ok = base_ok && is_valid(step, cfg.qe);
            }
            if (!base_ok) {
                Verdict v;
                v.kind = Verdict::Kind::Invalid;
                // the negated base obligation, stripped of its closure
                Formula body = base;
                while (body.is_quantifier())
                    body = body.body();
                std::string symbolic;
                if (auto a = find_model(Formula::negation(body), &symbolic, cfg.qe))
                    v.trace = group_by_step(*a);
                else
                    v.symbolic = symbolic;
                return v;
            }
            if (step_ok)
                return Verdict::valid(k);
        }
    } catch (const UnsupportedTheory& e) {
        return Verdict::unknown("unsupported", e.what());
    } catch (const ResourceLimit& e) {
        return Verdict::unknown("budget", e.what());
    }
    return Verdict::unknown("budget", "no inductive step closed up to k = " + std::to_string(cfg.k_max));
}

PipelineResult run_pipeline(const SystemModel& s, const Formula& postl, const InductionConfig& cfg)
{
    PipelineResult r;
    Formula assume = Formula::conjunction(s.assumptions);
    bool postl_static = !has_absolute(postl) && order(postl) == 0;
    try {
        if (max_property_order(s) == 0 && postl_static && order(assume) == 0) {
            r.composition.ssp = strongest_property_static(s, cfg.qe);
            r.composition.unpruned = r.composition.ssp;
            r.composition.init = Formula::top();
            r.verdict = verify_postulated_static(r.composition.ssp, postl, assume, cfg.qe);
            return r;
        }
        r.timed = true;
        r.composition = strongest_property_timed(s, cfg.qe);
        r.verdict = k_induction(r.composition.init, r.composition.ssp, postl, cfg, assume);
    } catch (const UnsupportedTheory& e) {
        r.verdict = Verdict::unknown("unsupported", e.what());
    } catch (const ResourceLimit& e) {
        r.verdict = Verdict::unknown("budget", e.what());
    }
    return r;
}

} // namespace relic
