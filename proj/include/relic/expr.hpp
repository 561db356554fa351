#pragma once

#include "relic/formula.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace relic
{

struct SourcePos
{
    int line = 1;
    int column = 1;
};

// ------------------------------------------------------------------ lexing

struct Token
{
    enum class Kind : std::uint8_t
    {
        Ident,
        Number,
        Symbol,
        End
    };

    Kind kind = Kind::End;
    std::string text;
    SourcePos pos;

    bool is(std::string_view s) const { return kind != Kind::Number && text == s; }
};

/// Tokenizes the spec/expression language. `//` starts a line comment.
std::vector<Token> tokenize(std::string_view text);

class TokenStream
{
public:
    explicit TokenStream(std::vector<Token> tokens);

    const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool accept(std::string_view s);
    const Token& expect(std::string_view s);
    std::string expect_ident();
    bool at_end() const { return peek().kind == Token::Kind::End; }
    [[noreturn]] void fail(const std::string& message) const;
    [[noreturn]] static void fail_at(const Token& t, const std::string& message);

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// -------------------------------------------------------------------- AST

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr
{
    enum class Kind : std::uint8_t
    {
        Number,
        Bool,
        Var,
        Prev,    // args: signal, initial value
        Neg,
        Add,
        Sub,
        Mul,
        Div,
        Cmp,     // args: lhs, rhs
        Not,
        And,
        Or,
        Implies,
        Iff,
        Divides, // args: modulus, term
        Cong,    // args: a, b, modulus
        Exists,
        Forall
    };

    Kind kind = Kind::Number;
    Rational number;
    bool truth = false;
    std::string name;                // Var, quantifier-bound name
    std::optional<TimeIndex> index;  // Var, quantifier-bound index
    Sort bound_sort = Sort::Real;    // quantifier-bound sort
    Rel rel = Rel::Eq;               // Cmp
    std::vector<ExprPtr> args;
    SourcePos pos;
};

ExprPtr make_number(Rational q, SourcePos pos = {});
ExprPtr make_var(std::string name, std::optional<TimeIndex> index = std::nullopt, SourcePos pos = {});
ExprPtr make_node(Expr::Kind kind, std::vector<ExprPtr> args, SourcePos pos = {});
ExprPtr make_cmp(Rel rel, ExprPtr lhs, ExprPtr rhs, SourcePos pos = {});

/// Parses one expression from the stream (stops before `;`, `,` or `}`).
ExprPtr parse_expr(TokenStream& ts);
/// Parses a whole string as one expression.
ExprPtr parse_expr(std::string_view text);

/// Fully parenthesized rendering accepted by parse_expr.
std::string to_string(const Expr& e);
bool equal(const Expr& a, const Expr& b);

/// Deepest nesting of prev() in e.
int prev_depth(const Expr& e);
bool has_prev(const Expr& e);

// ------------------------------------------------------------- conversion

struct VarInfo
{
    std::string name; // name used for the TimedVar (may differ from the source name)
    Sort sort = Sort::Real;
    bool is_static = false;
};

/// Maps a source identifier to its variable, or nullopt if undeclared.
using Resolver = std::function<std::optional<VarInfo>(const std::string&)>;

/// How unindexed variables and prev() are read.
struct ConvertMode
{
    /// nullopt: relative indexing around k, prev(e,c) reads e one step earlier.
    /// A value s: absolute step s; prev(e,c) at step 0 yields c.
    std::optional<std::int64_t> step;
};

/// Converts a boolean expression. Throws ParseError for undeclared names or ill-typed
/// expressions and UnsupportedTheory for products of variables.
Formula to_formula(const Expr& e, const Resolver& resolve, ConvertMode mode = {});
LinearTerm to_term(const Expr& e, const Resolver& resolve, ConvertMode mode = {});

/// Result of rewriting a guarantee that uses prev().
struct Desugared
{
    Formula property;               // relative form, prev(e,c) read as e one step back
    std::vector<Formula> initials;  // one absolute instance per early step that reaches before step 0
    std::int64_t depth = 0;         // first step at which the property applies
};

Desugared desugar_prev(const Expr& e, const Resolver& resolve);

/// Convenience: parse and convert; identifiers missing from `sorts` get default_sort.
Formula parse_formula(std::string_view text, const std::map<std::string, Sort>& sorts = {},
                      Sort default_sort = Sort::Real);

} // namespace relic
