#pragma once

#include "relic/qe.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relic
{

struct SmtProblem
{
    std::vector<TimedVar> declarations; // static-indexed, in declaration order
    std::vector<Formula> assertions;
    std::string logic;
    bool check_sat = false;
    bool get_model = false;

    bool has_sort(Sort s) const;
};

/// Linear SMT-LIB 2 subset. Throws ParseError (with line:col) and UnsupportedTheory for nonlinear terms.
SmtProblem parse_smtlib(std::string_view text);

struct SmtOptions
{
    QeOptions qe;
    int refinement_cap = 64;   // relaxation rounds before giving up
    int enumeration_limit = 64; // widest integer range encoded as a disjunction of values
};

struct SmtResult
{
    enum class Status : std::uint8_t
    {
        Sat,
        Unsat,
        Unknown
    };
    Status status = Status::Unknown;
    Assignment model; // every declared symbol, when sat
    std::string reason;
    int refinements = 0;
};

std::string to_string(SmtResult::Status s);

/// Decides the conjunction of the assertions by existential elimination.
SmtResult check_sat(const SmtProblem& p, const SmtOptions& opt = {});
/// Integer variables relaxed to reals, refined by excluding spurious non-integral values.
SmtResult check_sat_mixed(const SmtProblem& p, const SmtOptions& opt = {});
/// check_sat_mixed when both Int and Real symbols are declared, else check_sat.
SmtResult solve(const SmtProblem& p, const SmtOptions& opt = {});

/// One line per declared symbol: "name num/den" or "name true|false".
std::string format_model(const SmtProblem& p, const Assignment& model);

} // namespace relic
