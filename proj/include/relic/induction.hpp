#pragma once

#include "relic/compose.hpp"

namespace relic
{

struct InductionConfig
{
    int k_max = 10;
    bool parallel = false;
    QeOptions qe;
};

/// init ∧ ssp and assumption at every fitting absolute window ⇒ postl at its first k admissible steps.
Formula base_obligation(const Formula& init, const Formula& ssp, const Formula& postl, int k,
                        const Formula& assumption = Formula::top());
/// ssp and assumption over the window of k+order(postl)+1 steps ∧ postl at the k previous steps ⇒ postl now.
Formula inductive_obligation(const Formula& ssp, const Formula& postl, int k,
                             const Formula& assumption = Formula::top());

Verdict k_induction(const Formula& init, const Formula& ssp, const Formula& postl, const InductionConfig& cfg = {},
                    const Formula& assumption = Formula::top());

/// Splits an assignment over absolute-indexed variables into one assignment per step.
std::vector<Assignment> group_by_step(const Assignment& a);
/// Inverse of group_by_step.
Assignment merge_trace(const std::vector<Assignment>& trace);

struct PipelineResult
{
    Verdict verdict;
    CompositionResult composition;
    bool timed = false;
};

PipelineResult run_pipeline(const SystemModel& s, const Formula& postl, const InductionConfig& cfg = {});

} // namespace relic
