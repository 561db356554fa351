#include "relic/expr.hpp"

#include <cctype>
#include <sstream>

namespace relic
{

// ------------------------------------------------------------------ lexing

namespace
{

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '#';
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '\'';
}

} // namespace

std::vector<Token> tokenize(std::string_view text)
{
    static const char* const symbols[] = {"<=>", "->", "=>", "<=", ">=", "!=", "<>", "&&", "||", "==",
                                          "(",   ")",  "{",  "}",  "[",  "]",  ",",  ";",  ":",  ".",
                                          "=",   "<",  ">",  "+",  "-",  "*",  "/",  "!"};
    std::vector<Token> out;
    std::size_t i = 0;
    SourcePos pos;
    auto advance = [&](std::size_t n) {
        for (std::size_t j = 0; j < n; ++j, ++i) {
            if (text[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else {
                ++pos.column;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (text.substr(i, 2) == "//") {
            while (i < text.size() && text[i] != '\n')
                advance(1);
            continue;
        }
        Token t;
        t.pos = pos;
        std::size_t start = i;
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < text.size() &&
                   (ident_char(text[j]) || (text[j] == '.' && j + 1 < text.size() && ident_start(text[j + 1]))))
                ++j;
            t.kind = Token::Kind::Ident;
            t.text = std::string(text.substr(start, j - start));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
                ++j;
            if (j < text.size() && text[j] == '.' && j + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
                    ++j;
            } else if (j < text.size() && text[j] == '.' &&
                       (j + 1 == text.size() || !ident_start(text[j + 1]))) {
                ++j; // "1." as in 1.0 written tersely
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-'))
                    ++k;
                if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                    while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k])))
                        ++k;
                    j = k;
                }
            }
            t.kind = Token::Kind::Number;
            t.text = std::string(text.substr(start, j - start));
            advance(j - i);
        } else {
            bool matched = false;
            for (const char* s : symbols) {
                std::string_view sv(s);
                if (text.substr(i, sv.size()) == sv) {
                    t.kind = Token::Kind::Symbol;
                    t.text = std::string(sv);
                    advance(sv.size());
                    matched = true;
                    break;
                }
            }
            if (!matched)
                throw ParseError(std::string("unexpected character '") + c + "'", pos.line, pos.column);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Token::Kind::End;
    end.pos = pos;
    out.push_back(end);
    return out;
}

TokenStream::TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens))
{
    if (tokens_.empty() || tokens_.back().kind != Token::Kind::End)
        tokens_.push_back(Token{});
}

const Token& TokenStream::peek(std::size_t ahead) const
{
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

const Token& TokenStream::next()
{
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size())
        ++pos_;
    return t;
}

bool TokenStream::accept(std::string_view s)
{
    if (peek().is(s)) {
        next();
        return true;
    }
    return false;
}

const Token& TokenStream::expect(std::string_view s)
{
    if (!peek().is(s))
        fail("expected '" + std::string(s) + "'");
    return next();
}

std::string TokenStream::expect_ident()
{
    if (peek().kind != Token::Kind::Ident)
        fail("expected identifier");
    return next().text;
}

void TokenStream::fail(const std::string& message) const
{
    fail_at(peek(), message);
}

void TokenStream::fail_at(const Token& t, const std::string& message)
{
    std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(message + ", found " + found, t.pos.line, t.pos.column);
}

// -------------------------------------------------------------------- AST

ExprPtr make_number(Rational q, SourcePos pos)
{
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Number;
    e->number = std::move(q);
    e->pos = pos;
    return e;
}

ExprPtr make_var(std::string name, std::optional<TimeIndex> index, SourcePos pos)
{
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Var;
    e->name = std::move(name);
    e->index = index;
    e->pos = pos;
    return e;
}

ExprPtr make_node(Expr::Kind kind, std::vector<ExprPtr> args, SourcePos pos)
{
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->args = std::move(args);
    e->pos = pos;
    return e;
}

ExprPtr make_cmp(Rel rel, ExprPtr lhs, ExprPtr rhs, SourcePos pos)
{
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Cmp;
    e->rel = rel;
    e->args = {std::move(lhs), std::move(rhs)};
    e->pos = pos;
    return e;
}

namespace
{

ExprPtr parse_iff(TokenStream& ts);

std::optional<TimeIndex> parse_index(TokenStream& ts)
{
    if (!ts.accept("["))
        return std::nullopt;
    TimeIndex idx;
    if (ts.peek().kind == Token::Kind::Number) {
        const Token& t = ts.next();
        Rational q = parse_rational(t.text);
        if (!is_integral(q) || q < 0)
            TokenStream::fail_at(t, "step index must be a non-negative integer");
        idx = TimeIndex::absolute(q.get_num().get_si());
    } else if (ts.accept("k")) {
        std::int64_t offset = 0;
        if (ts.peek().is("+") || ts.peek().is("-")) {
            bool neg = ts.next().is("-");
            if (ts.peek().kind != Token::Kind::Number)
                ts.fail("expected offset");
            const Token& t = ts.next();
            Rational q = parse_rational(t.text);
            if (!is_integral(q))
                TokenStream::fail_at(t, "offset must be an integer");
            offset = q.get_num().get_si();
            if (neg)
                offset = -offset;
        }
        idx = TimeIndex::relative(offset);
    } else {
        ts.fail("expected time index");
    }
    ts.expect("]");
    return idx;
}

ExprPtr parse_quantifier(TokenStream& ts)
{
    const Token& kw = ts.next();
    auto e = std::make_shared<Expr>();
    e->kind = kw.is("exists") ? Expr::Kind::Exists : Expr::Kind::Forall;
    e->pos = kw.pos;
    e->name = ts.expect_ident();
    e->index = parse_index(ts);
    ts.expect(":");
    const Token& st = ts.peek();
    auto sort = st.kind == Token::Kind::Ident ? parse_sort(st.text) : std::nullopt;
    if (!sort)
        ts.fail("expected sort");
    ts.next();
    e->bound_sort = *sort;
    ts.expect(".");
    e->args = {parse_iff(ts)};
    return e;
}

ExprPtr parse_atom(TokenStream& ts)
{
    const Token& t = ts.peek();
    if (t.kind == Token::Kind::Number) {
        ts.next();
        try {
            return make_number(parse_rational(t.text), t.pos);
        } catch (const std::invalid_argument&) {
            TokenStream::fail_at(t, "malformed number");
        }
    }
    if (t.is("(")) {
        ts.next();
        ExprPtr inner = parse_iff(ts);
        ts.expect(")");
        return inner;
    }
    if (t.kind != Token::Kind::Ident)
        ts.fail("expected expression");
    if (t.is("true") || t.is("false")) {
        ts.next();
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Bool;
        e->truth = t.is("true");
        e->pos = t.pos;
        return e;
    }
    if (t.is("exists") || t.is("forall"))
        return parse_quantifier(ts);
    auto call = [&](Expr::Kind kind, int arity) {
        SourcePos pos = ts.next().pos;
        ts.expect("(");
        std::vector<ExprPtr> args;
        for (int i = 0; i < arity; ++i) {
            if (i > 0)
                ts.expect(",");
            args.push_back(parse_iff(ts));
        }
        ts.expect(")");
        return make_node(kind, std::move(args), pos);
    };
    if (t.is("prev") && ts.peek(1).is("("))
        return call(Expr::Kind::Prev, 2);
    if (t.is("divides") && ts.peek(1).is("("))
        return call(Expr::Kind::Divides, 2);
    if (t.is("cong") && ts.peek(1).is("("))
        return call(Expr::Kind::Cong, 3);
    Token name = ts.next();
    auto index = parse_index(ts);
    return make_var(name.text, index, name.pos);
}

ExprPtr parse_unary(TokenStream& ts)
{
    if (ts.peek().is("-")) {
        SourcePos pos = ts.next().pos;
        return make_node(Expr::Kind::Neg, {parse_unary(ts)}, pos);
    }
    return parse_atom(ts);
}

ExprPtr parse_product(TokenStream& ts)
{
    ExprPtr lhs = parse_unary(ts);
    while (ts.peek().is("*") || ts.peek().is("/")) {
        const Token& op = ts.next();
        lhs = make_node(op.is("*") ? Expr::Kind::Mul : Expr::Kind::Div, {lhs, parse_unary(ts)}, op.pos);
    }
    return lhs;
}

ExprPtr parse_sum(TokenStream& ts)
{
    ExprPtr lhs = parse_product(ts);
    while (ts.peek().is("+") || ts.peek().is("-")) {
        const Token& op = ts.next();
        lhs = make_node(op.is("+") ? Expr::Kind::Add : Expr::Kind::Sub, {lhs, parse_product(ts)}, op.pos);
    }
    return lhs;
}

std::optional<Rel> relop(const Token& t)
{
    if (t.kind != Token::Kind::Symbol)
        return std::nullopt;
    if (t.text == "=" || t.text == "==")
        return Rel::Eq;
    if (t.text == "!=" || t.text == "<>")
        return Rel::Ne;
    if (t.text == "<")
        return Rel::Lt;
    if (t.text == "<=")
        return Rel::Le;
    if (t.text == ">")
        return Rel::Gt;
    if (t.text == ">=")
        return Rel::Ge;
    return std::nullopt;
}

ExprPtr parse_cmp(TokenStream& ts)
{
    ExprPtr lhs = parse_sum(ts);
    if (auto r = relop(ts.peek())) {
        SourcePos pos = ts.next().pos;
        ExprPtr rhs = parse_sum(ts);
        if (relop(ts.peek()))
            ts.fail("comparisons do not chain");
        return make_cmp(*r, lhs, rhs, pos);
    }
    return lhs;
}

ExprPtr parse_not(TokenStream& ts)
{
    if (ts.peek().is("not") || ts.peek().is("!")) {
        SourcePos pos = ts.next().pos;
        return make_node(Expr::Kind::Not, {parse_not(ts)}, pos);
    }
    return parse_cmp(ts);
}

ExprPtr parse_and(TokenStream& ts)
{
    ExprPtr lhs = parse_not(ts);
    while (ts.peek().is("and") || ts.peek().is("&&")) {
        SourcePos pos = ts.next().pos;
        lhs = make_node(Expr::Kind::And, {lhs, parse_not(ts)}, pos);
    }
    return lhs;
}

ExprPtr parse_or(TokenStream& ts)
{
    ExprPtr lhs = parse_and(ts);
    while (ts.peek().is("or") || ts.peek().is("||")) {
        SourcePos pos = ts.next().pos;
        lhs = make_node(Expr::Kind::Or, {lhs, parse_and(ts)}, pos);
    }
    return lhs;
}

ExprPtr parse_implies(TokenStream& ts)
{
    ExprPtr lhs = parse_or(ts);
    if (ts.peek().is("=>")) {
        SourcePos pos = ts.next().pos;
        return make_node(Expr::Kind::Implies, {lhs, parse_implies(ts)}, pos);
    }
    return lhs;
}

ExprPtr parse_iff(TokenStream& ts)
{
    ExprPtr lhs = parse_implies(ts);
    while (ts.peek().is("<=>")) {
        SourcePos pos = ts.next().pos;
        lhs = make_node(Expr::Kind::Iff, {lhs, parse_implies(ts)}, pos);
    }
    return lhs;
}

std::string index_suffix(const std::optional<TimeIndex>& idx)
{
    if (!idx)
        return "";
    if (idx->is_absolute())
        return "[" + std::to_string(idx->value) + "]";
    if (idx->value == 0)
        return "[k]";
    return std::string("[k") + (idx->value > 0 ? "+" : "-") + std::to_string(std::abs(idx->value)) + "]";
}

std::string number_text(const Rational& q)
{
    // exact decimal when the denominator only has factors 2 and 5
    Integer den = q.get_den();
    int twos = 0, fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1 || q < 0)
        return "(" + to_string(q) + ")";
    if (q.get_den() == 1)
        return to_string(q);
    int digits = std::max(twos, fives);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    Integer scaled = q.get_num() * (scale / q.get_den());
    std::string s = scaled.get_str();
    if (static_cast<int>(s.size()) <= digits)
        s.insert(0, static_cast<std::size_t>(digits) - s.size() + 1, '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    return s;
}

const char* binary_symbol(Expr::Kind k)
{
    switch (k) {
    case Expr::Kind::Add:
        return " + ";
    case Expr::Kind::Sub:
        return " - ";
    case Expr::Kind::Mul:
        return " * ";
    case Expr::Kind::Div:
        return " / ";
    case Expr::Kind::And:
        return " and ";
    case Expr::Kind::Or:
        return " or ";
    case Expr::Kind::Implies:
        return " => ";
    case Expr::Kind::Iff:
        return " <=> ";
    default:
        return " ? ";
    }
}

} // namespace

ExprPtr parse_expr(TokenStream& ts)
{
    return parse_iff(ts);
}

ExprPtr parse_expr(std::string_view text)
{
    TokenStream ts(tokenize(text));
    ExprPtr e = parse_iff(ts);
    if (!ts.at_end())
        ts.fail("unexpected trailing input");
    return e;
}

std::string to_string(const Expr& e)
{
    using K = Expr::Kind;
    switch (e.kind) {
    case K::Number:
        return number_text(e.number);
    case K::Bool:
        return e.truth ? "true" : "false";
    case K::Var:
        return e.name + index_suffix(e.index);
    case K::Prev:
        return "prev(" + to_string(*e.args[0]) + ", " + to_string(*e.args[1]) + ")";
    case K::Neg:
        return "(-" + to_string(*e.args[0]) + ")";
    case K::Not:
        return "(not " + to_string(*e.args[0]) + ")";
    case K::Cmp:
        return "(" + to_string(*e.args[0]) + " " + symbol(e.rel) + " " + to_string(*e.args[1]) + ")";
    case K::Divides:
        return "divides(" + to_string(*e.args[0]) + ", " + to_string(*e.args[1]) + ")";
    case K::Cong:
        return "cong(" + to_string(*e.args[0]) + ", " + to_string(*e.args[1]) + ", " + to_string(*e.args[2]) + ")";
    case K::Exists:
    case K::Forall:
        return std::string("(") + (e.kind == K::Exists ? "exists " : "forall ") + e.name + index_suffix(e.index) +
               ": " + to_string(e.bound_sort) + " . " + to_string(*e.args[0]) + ")";
    default:
        return "(" + to_string(*e.args[0]) + binary_symbol(e.kind) + to_string(*e.args[1]) + ")";
    }
}

bool equal(const Expr& a, const Expr& b)
{
    if (a.kind != b.kind || a.args.size() != b.args.size())
        return false;
    switch (a.kind) {
    case Expr::Kind::Number:
        return a.number == b.number;
    case Expr::Kind::Bool:
        return a.truth == b.truth;
    case Expr::Kind::Var:
        return a.name == b.name && a.index == b.index;
    case Expr::Kind::Cmp:
        if (a.rel != b.rel)
            return false;
        break;
    case Expr::Kind::Exists:
    case Expr::Kind::Forall:
        if (a.name != b.name || a.index != b.index || a.bound_sort != b.bound_sort)
            return false;
        break;
    default:
        break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!equal(*a.args[i], *b.args[i]))
            return false;
    return true;
}

int prev_depth(const Expr& e)
{
    int depth = 0;
    for (std::size_t i = 0; i < e.args.size(); ++i) {
        int d = prev_depth(*e.args[i]);
        if (e.kind == Expr::Kind::Prev && i == 0)
            d += 1;
        depth = std::max(depth, d);
    }
    return depth;
}

bool has_prev(const Expr& e)
{
    return prev_depth(e) > 0;
}

// ------------------------------------------------------------- conversion

namespace
{

struct NegativeStep
{
};

struct Converter
{
    Converter(const Resolver& r, std::optional<std::int64_t> s) : resolve(r), step(s) {}

    const Resolver& resolve;
    std::optional<std::int64_t> step;
    std::int64_t offset = 0; // accumulated prev() delay
    bool hit_initial = false;
    std::vector<std::pair<std::string, TimedVar>> scope;

    using Result = std::variant<LinearTerm, Formula>;

    [[noreturn]] static void fail(const Expr& e, const std::string& message)
    {
        throw ParseError(message, e.pos.line, e.pos.column);
    }

    LinearTerm term(const Expr& e)
    {
        Result r = convert(e);
        if (auto* t = std::get_if<LinearTerm>(&r))
            return std::move(*t);
        fail(e, "expected a numeric expression: " + to_string(e));
    }

    Formula formula(const Expr& e)
    {
        Result r = convert(e);
        if (auto* f = std::get_if<Formula>(&r))
            return std::move(*f);
        fail(e, "expected a boolean expression: " + to_string(e));
    }

    TimeIndex place(const Expr& e, const std::optional<TimeIndex>& idx)
    {
        if (idx && idx->is_absolute())
            return *idx;
        std::int64_t rel = (idx ? idx->value : 0) + offset;
        if (!step)
            return TimeIndex::relative(rel);
        std::int64_t s = *step + rel;
        if (s < 0)
            throw NegativeStep{};
        (void)e;
        return TimeIndex::absolute(s);
    }

    Result variable(const Expr& e)
    {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
            if (it->first == e.name) {
                TimedVar v = it->second;
                if (e.index)
                    v = v.at(*e.index);
                if (v.sort == Sort::Bool)
                    return Formula::boolean(v);
                return LinearTerm::variable(v);
            }
        }
        auto info = resolve(e.name);
        if (!info)
            fail(e, "undeclared identifier '" + e.name + "'");
        TimeIndex idx;
        if (info->is_static) {
            if (e.index)
                fail(e, "parameter '" + e.name + "' takes no time index");
            idx = TimeIndex::fixed();
        } else {
            idx = place(e, e.index);
        }
        TimedVar v(info->name, idx, info->sort);
        if (v.sort == Sort::Bool)
            return Formula::boolean(v);
        return LinearTerm::variable(v);
    }

    Integer integer_constant(const Expr& e)
    {
        LinearTerm t = term(e);
        if (!t.is_constant() || !is_integral(t.constant()) || t.constant() < 1)
            fail(e, "modulus must be a positive integer constant");
        return t.constant().get_num();
    }

    Result convert(const Expr& e)
    {
        using K = Expr::Kind;
        switch (e.kind) {
        case K::Number:
            return LinearTerm(e.number);
        case K::Bool:
            return Formula::constant(e.truth);
        case K::Var:
            return variable(e);
        case K::Prev: {
            if (step && *step + offset - 1 < 0) {
                hit_initial = true;
                std::int64_t saved = offset;
                offset = 0;
                Result r = convert(*e.args[1]);
                offset = saved;
                return r;
            }
            offset -= 1;
            Result r = convert(*e.args[0]);
            offset += 1;
            return r;
        }
        case K::Neg:
            return -term(*e.args[0]);
        case K::Add:
            return term(*e.args[0]) + term(*e.args[1]);
        case K::Sub:
            return term(*e.args[0]) - term(*e.args[1]);
        case K::Mul: {
            LinearTerm a = term(*e.args[0]);
            LinearTerm b = term(*e.args[1]);
            if (a.is_constant())
                return b * a.constant();
            if (b.is_constant())
                return a * b.constant();
            throw UnsupportedTheory("nonlinear product at " + std::to_string(e.pos.line) + ":" +
                                    std::to_string(e.pos.column) + ": " + to_string(e));
        }
        case K::Div: {
            LinearTerm a = term(*e.args[0]);
            LinearTerm b = term(*e.args[1]);
            if (!b.is_constant())
                throw UnsupportedTheory("division by a variable at " + std::to_string(e.pos.line) + ":" +
                                        std::to_string(e.pos.column) + ": " + to_string(e));
            if (b.constant() == 0)
                fail(e, "division by zero");
            return a * Rational(1 / b.constant());
        }
        case K::Cmp: {
            Result l = convert(*e.args[0]);
            Result r = convert(*e.args[1]);
            if (std::holds_alternative<Formula>(l) && std::holds_alternative<Formula>(r)) {
                if (e.rel != Rel::Eq && e.rel != Rel::Ne)
                    fail(e, "ordering comparison between boolean expressions");
                Formula f = Formula::iff(std::get<Formula>(l), std::get<Formula>(r));
                return e.rel == Rel::Eq ? f : Formula::negation(f);
            }
            if (std::holds_alternative<Formula>(l) || std::holds_alternative<Formula>(r))
                fail(e, "comparison mixes boolean and numeric operands");
            return Formula::compare(std::get<LinearTerm>(l), e.rel, std::get<LinearTerm>(r));
        }
        case K::Not:
            return Formula::negation(formula(*e.args[0]));
        case K::And:
            return Formula::conjunction({formula(*e.args[0]), formula(*e.args[1])});
        case K::Or:
            return Formula::disjunction({formula(*e.args[0]), formula(*e.args[1])});
        case K::Implies:
            return Formula::implies(formula(*e.args[0]), formula(*e.args[1]));
        case K::Iff:
            return Formula::iff(formula(*e.args[0]), formula(*e.args[1]));
        case K::Divides:
            return Formula::divides(integer_constant(*e.args[0]), term(*e.args[1]));
        case K::Cong:
            return Formula::divides(integer_constant(*e.args[2]), term(*e.args[0]) - term(*e.args[1]));
        case K::Exists:
        case K::Forall: {
            TimedVar v(e.name, e.index.value_or(TimeIndex::relative(0)), e.bound_sort);
            scope.emplace_back(e.name, v);
            Formula body = formula(*e.args[0]);
            scope.pop_back();
            return e.kind == K::Exists ? Formula::exists(v, body) : Formula::forall(v, body);
        }
        }
        fail(e, "unsupported expression");
    }
};

std::int64_t deepest_explicit_offset(const Expr& e)
{
    std::int64_t deepest = 0;
    if (e.kind == Expr::Kind::Var && e.index && e.index->is_relative())
        deepest = std::max<std::int64_t>(deepest, -e.index->value);
    for (const auto& a : e.args)
        deepest = std::max(deepest, deepest_explicit_offset(*a));
    return deepest;
}

} // namespace

Formula to_formula(const Expr& e, const Resolver& resolve, ConvertMode mode)
{
    Converter c(resolve, mode.step);
    try {
        return c.formula(e);
    } catch (const NegativeStep&) {
        throw ParseError("expression reaches before step 0 at step " + std::to_string(*mode.step), e.pos.line,
                         e.pos.column);
    }
}

LinearTerm to_term(const Expr& e, const Resolver& resolve, ConvertMode mode)
{
    Converter c(resolve, mode.step);
    try {
        return c.term(e);
    } catch (const NegativeStep&) {
        throw ParseError("expression reaches before step 0 at step " + std::to_string(*mode.step), e.pos.line,
                         e.pos.column);
    }
}

Desugared desugar_prev(const Expr& e, const Resolver& resolve)
{
    Desugared out;
    out.property = to_formula(e, resolve);
    std::int64_t horizon = prev_depth(e) + deepest_explicit_offset(e);
    if (prev_depth(e) == 0)
        return out;
    for (std::int64_t s = 0; s < horizon; ++s) {
        Converter c(resolve, s);
        try {
            Formula f = c.formula(e);
            if (!c.hit_initial)
                continue;
            out.initials.push_back(f);
        } catch (const NegativeStep&) {
        }
        out.depth = s + 1;
    }
    return out;
}

Formula parse_formula(std::string_view text, const std::map<std::string, Sort>& sorts, Sort default_sort)
{
    ExprPtr e = parse_expr(text);
    Resolver r = [&](const std::string& name) -> std::optional<VarInfo> {
        auto it = sorts.find(name);
        return VarInfo{name, it == sorts.end() ? default_sort : it->second, false};
    };
    return to_formula(*e, r);
}

} // namespace relic
