#pragma once

#include "relic/error.hpp"
#include "relic/rational.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace relic
{

enum class Sort : std::uint8_t
{
    Real,
    Int,
    Bool
};

std::string to_string(Sort s);
std::optional<Sort> parse_sort(std::string_view text);

// Position of a signal in time. Relative offsets are measured from the
// symbolic current step k; absolute steps count from the initial step 0.
// Static marks time-invariant parameters (e.g. a buffer capacity), which
// shifting leaves untouched.
struct TimeIndex
{
    enum class Kind : std::uint8_t
    {
        Static,
        Relative,
        Absolute
    };

    Kind kind = Kind::Relative;
    std::int64_t value = 0;

    static TimeIndex relative(std::int64_t offset) { return {Kind::Relative, offset}; }
    static TimeIndex absolute(std::int64_t step) { return {Kind::Absolute, step}; }
    static TimeIndex fixed() { return {Kind::Static, 0}; }

    bool is_relative() const { return kind == Kind::Relative; }
    bool is_absolute() const { return kind == Kind::Absolute; }
    bool is_static() const { return kind == Kind::Static; }

    bool operator==(const TimeIndex&) const = default;
};

struct TimedVar
{
    std::string name;
    TimeIndex index;
    Sort sort = Sort::Real;

    TimedVar() = default;
    TimedVar(std::string n, TimeIndex i, Sort s = Sort::Real);

    /// Same signal, different index.
    TimedVar at(TimeIndex i) const { return TimedVar(name, i, sort); }

    bool operator==(const TimedVar&) const = default;
};

/// Name ascending, then static < relative < absolute, newest offset first.
bool operator<(const TimedVar& a, const TimedVar& b);

/// x, x[k-1], x[k+2], x[0]
std::string to_string(const TimedVar& v);

class LinearTerm
{
public:
    using Coefficients = std::map<TimedVar, Rational>;

    LinearTerm() = default;
    explicit LinearTerm(Rational constant);
    static LinearTerm variable(const TimedVar& v, const Rational& coefficient = 1);

    const Coefficients& coefficients() const { return coeffs_; }
    const Rational& constant() const { return constant_; }
    Rational coefficient(const TimedVar& v) const;
    bool contains(const TimedVar& v) const { return coeffs_.count(v) != 0; }
    bool is_constant() const { return coeffs_.empty(); }

    void add(const TimedVar& v, const Rational& c);
    void add_constant(const Rational& c) { constant_ += c; }

    LinearTerm operator+(const LinearTerm& o) const;
    LinearTerm operator-(const LinearTerm& o) const;
    LinearTerm operator-() const;
    LinearTerm operator*(const Rational& k) const;

    LinearTerm without(const TimedVar& v) const;
    LinearTerm substitute(const TimedVar& v, const LinearTerm& replacement) const;
    LinearTerm map_vars(const std::function<TimedVar(const TimedVar&)>& f) const;

    bool operator==(const LinearTerm& o) const;

private:
    Coefficients coeffs_;
    Rational constant_{0};
};

int compare(const LinearTerm& a, const LinearTerm& b);

enum class Rel : std::uint8_t
{
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge
};

Rel negate(Rel r);
/// The relation obtained by multiplying both sides by -1.
Rel mirror(Rel r);
const char* symbol(Rel r);
bool holds(Rel r, int sign);

struct TrueAtom
{
};
struct FalseAtom
{
};
/// term rel 0
struct Compare
{
    LinearTerm term;
    Rel rel;
};
/// modulus divides term; integer-sorted variables only
struct Divides
{
    Integer modulus;
    LinearTerm term;
};
struct BoolAtom
{
    TimedVar var;
};

using Atom = std::variant<TrueAtom, FalseAtom, Compare, Divides, BoolAtom>;

class Formula
{
public:
    enum class Kind : std::uint8_t
    {
        Atom,
        Not,
        And,
        Or,
        Implies,
        Iff,
        Exists,
        Forall
    };

    Formula(); // true

    static Formula top();
    static Formula bottom();
    static Formula constant(bool b) { return b ? top() : bottom(); }
    /// Canonicalizing constructor: folds ground atoms, clears denominators,
    /// makes the leading coefficient positive.
    static Formula compare(const LinearTerm& term, Rel rel);
    static Formula compare(const LinearTerm& lhs, Rel rel, const LinearTerm& rhs);
    /// Canonicalizing constructor for modulus | term over integer variables.
    static Formula divides(const Integer& modulus, const LinearTerm& term);
    static Formula boolean(const TimedVar& v);

    static Formula negation(Formula f);
    static Formula conjunction(std::vector<Formula> parts);
    static Formula disjunction(std::vector<Formula> parts);
    static Formula implies(Formula a, Formula b);
    static Formula iff(Formula a, Formula b);
    static Formula exists(const TimedVar& v, Formula body);
    static Formula forall(const TimedVar& v, Formula body);

    Kind kind() const;
    bool is_atom() const { return kind() == Kind::Atom; }
    bool is_true() const;
    bool is_false() const;
    bool is_literal() const;
    bool is_quantifier() const { return kind() == Kind::Exists || kind() == Kind::Forall; }

    const Atom& atom() const;
    std::span<const Formula> children() const;
    const Formula& child(std::size_t i) const { return children()[i]; }
    const TimedVar& bound() const;
    const Formula& body() const { return child(0); }

    bool same_node(const Formula& o) const { return node_ == o.node_; }

    struct Node;

private:
    explicit Formula(std::shared_ptr<const Node> n);
    std::shared_ptr<const Node> node_;
};

Formula operator&&(const Formula& a, const Formula& b);
Formula operator||(const Formula& a, const Formula& b);
Formula operator!(const Formula& f);

/// Structural total order; 0 iff the trees are identical.
int compare(const Formula& a, const Formula& b);
inline bool operator==(const Formula& a, const Formula& b) { return compare(a, b) == 0; }
inline bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

using Value = std::variant<Rational, bool>;

class Assignment
{
public:
    void set(const TimedVar& v, Value value);
    const Value* find(const TimedVar& v) const;
    bool contains(const TimedVar& v) const { return find(v) != nullptr; }
    const std::map<TimedVar, Value>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::map<TimedVar, Value> values_;
};

std::string to_string(const Value& v);

/// Throws SortError naming the offending variable.
void check_sorts(const Formula& f);

Formula normalize_nnf(const Formula& f);
/// Disjunction of conjunctions of literals; disequalities split into < and >.
Formula to_dnf(const Formula& f);
Formula substitute(const Formula& f, const TimedVar& v, const LinearTerm& t);
Formula substitute(const Formula& f, const TimedVar& v, bool value);
Formula shift(const Formula& f, std::int64_t delta);
/// max relative offset minus min relative offset; 0 without relative variables.
std::int64_t order(const Formula& f);
std::pair<std::int64_t, std::int64_t> offset_range(const Formula& f);
bool evaluate(const Formula& f, const Assignment& a);
Rational evaluate(const LinearTerm& t, const Assignment& a);
std::set<TimedVar> free_vars(const Formula& f);
std::set<TimedVar> vars(const LinearTerm& t);

/// Rewrites every variable (free and bound) through f.
Formula map_vars(const Formula& formula, const std::function<TimedVar(const TimedVar&)>& f);
/// Relative offset o becomes absolute step (step + o).
Formula instantiate_at(const Formula& f, std::int64_t step);
bool has_absolute(const Formula& f);
bool has_relative(const Formula& f);

/// Top-level conjuncts (And flattened); the formula itself otherwise.
std::vector<Formula> conjuncts(const Formula& f);
std::vector<Formula> disjuncts(const Formula& f);

std::string to_string(const LinearTerm& t);
std::string to_string(const Formula& f);

/// Existential closure over the given variables in order (outermost first).
Formula exists_closure(const std::vector<TimedVar>& vars, Formula body);
Formula forall_closure(const std::vector<TimedVar>& vars, Formula body);

} // namespace relic
