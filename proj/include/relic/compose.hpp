#pragma once

#include "relic/model.hpp"
#include "relic/qe.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace relic
{

struct Verdict
{
    enum class Kind : std::uint8_t
    {
        Valid,
        Invalid,
        Unknown
    };

    Kind kind = Kind::Unknown;
    /// Valid: the induction depth that closed the proof (1 on the static path).
    int k = 0;
    /// Invalid: one assignment per step from 0; a static counterexample has one entry.
    std::vector<Assignment> trace;
    /// Invalid: nonstandard rendering when concretization failed.
    std::string symbolic;
    /// Unknown: "budget" or "unsupported"; free text detail alongside.
    std::string reason;
    std::string detail;

    static Verdict valid(int k)
    {
        Verdict v;
        v.kind = Kind::Valid;
        v.k = k;
        return v;
    }
    static Verdict unknown(std::string reason, std::string detail = {})
    {
        Verdict v;
        v.reason = std::move(reason);
        v.detail = std::move(detail);
        return v;
    }
};

std::string to_string(Verdict::Kind k);

struct CompositionResult
{
    Formula ssp;      // relative-indexed, newest offset 0
    Formula init;     // absolute-indexed, or true
    Formula unpruned; // ssp before shift pruning
    std::int64_t used_order_bound = 0;
    std::int64_t pruned_order = 0;
    bool pruning_applied = false;
};

/// ∃X_int (⋀ properties ∧ ⋀ connections), eliminated and simplified.
Formula strongest_property_static(const SystemModel& s, const QeOptions& opt = {});
/// Time-shifted replicas over the window [k−M, k], internals eliminated, redundant shifts pruned.
CompositionResult strongest_property_timed(const SystemModel& s, const QeOptions& opt = {});
/// System initial condition over interface variables at steps [0, window_order−1].
Formula initial_condition(const SystemModel& s, std::int64_t window_order, const QeOptions& opt = {});
/// Drops conjuncts that are time shifts of (or implied by shifts of) the others; falls back to
/// the input when the shifted closure of the result is not equivalent to it.
Formula prune_redundant_shifts(const Formula& f, const QeOptions& opt = {});
/// All shifts of f whose offsets stay inside [−window, 0].
Formula shifted_closure(const Formula& f, std::int64_t window);

/// ∀(ssp ∧ assumption ⇒ postl); a counterexample of ssp ∧ assumption ∧ ¬postl on failure.
Verdict verify_postulated_static(const Formula& ssp, const Formula& postl,
                                 const Formula& assumption = Formula::top(), const QeOptions& opt = {});

/// Concrete assignment satisfying f (integer search when every numeric variable is integral).
std::optional<Assignment> find_model(const Formula& f, std::string* symbolic = nullptr,
                                     const QeOptions& opt = {});

} // namespace relic
