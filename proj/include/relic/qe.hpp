#pragma once

#include "relic/formula.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace relic
{

struct QeOptions
{
    /// Largest number of Cooper boundary candidates accepted for one elimination.
    std::size_t cooper_cap = 100000;
};

// ---------------------------------------------------------------- qe-real

/// Quantifier-free equivalent of ∃v.f. Real variables go through Fourier-Motzkin with a
/// Gauss step for equalities, booleans through Shannon expansion, integers through Cooper.
Formula eliminate_exists(const TimedVar& v, const Formula& f, const QeOptions& opt = {});
/// Eliminates a block of existential variables, fewest occurrences first.
Formula eliminate_exists(const std::vector<TimedVar>& vs, const Formula& f, const QeOptions& opt = {});
/// Quantifier-free equivalent of f, innermost quantifiers first. Closed input gives true or false.
Formula eliminate_all(const Formula& f, const QeOptions& opt = {});
/// Equivalent quantifier-free formula in negation normal form with constants folded,
/// duplicates merged and bounds over the same linear form combined.
Formula simplify(const Formula& f);

/// Element of the ordered vector space Q^3 read as (inf·∞ + fin + eps·ε) with ε a positive
/// infinitesimal and ∞ larger than every rational.
struct WitnessValue
{
    Rational inf{0};
    Rational fin{0};
    Rational eps{0};

    static WitnessValue finite(const Rational& q) { return {Rational(0), q, Rational(0)}; }
    bool is_standard() const { return inf == 0 && eps == 0; }

    WitnessValue operator+(const WitnessValue& o) const { return {inf + o.inf, fin + o.fin, eps + o.eps}; }
    WitnessValue operator-(const WitnessValue& o) const { return {inf - o.inf, fin - o.fin, eps - o.eps}; }
    WitnessValue operator*(const Rational& k) const { return {inf * k, fin * k, eps * k}; }
    bool operator==(const WitnessValue&) const = default;
};

int compare(const WitnessValue& a, const WitnessValue& b);
/// "3", "3 + eps", "-1/2 - 2*eps", "oo"
std::string to_string(const WitnessValue& w);

struct Witness
{
    std::map<TimedVar, WitnessValue> numeric;
    std::map<TimedVar, bool> boolean;
};

/// A nonstandard model of the quantifier-free real/boolean formula f over vars (extended by
/// any other free variables of f), or nullopt if f is unsatisfiable.
std::optional<Witness> extract_witness(const Formula& f, const std::vector<TimedVar>& vars);
/// Standard rational assignment satisfying f, obtained by shrinking ε (and growing ∞) over
/// at most 64 rounds; nullopt if none of the rounds satisfies f.
std::optional<Assignment> concretize_witness(const Witness& w, const Formula& f);

// ----------------------------------------------------------------- qe-int

/// Cooper elimination of the integer variable v from quantifier-free f.
Formula eliminate_exists_int(const TimedVar& v, const Formula& f, const QeOptions& opt = {});
/// Truth value of a closed formula over integer variables.
bool decide_sentence_int(const Formula& f, const QeOptions& opt = {});
/// Integer assignment satisfying quantifier-free f, or nullopt.
std::optional<Assignment> int_witness(const Formula& f, const std::vector<TimedVar>& vars,
                                      const QeOptions& opt = {});

// --------------------------------------------------------------- deciding

bool is_valid(const Formula& f, const QeOptions& opt = {});
bool is_satisfiable(const Formula& f, const QeOptions& opt = {});
bool equivalent(const Formula& a, const Formula& b, const QeOptions& opt = {});
/// Validity of a ⇒ b over all free variables.
bool entails(const Formula& a, const Formula& b, const QeOptions& opt = {});

} // namespace relic
