#include "relic/smt.hpp"

#include "relic/compose.hpp"
#include "relic/interval.hpp"

#include <deque>
#include <map>
#include <sstream>

namespace relic
{

namespace
{

struct Pos
{
    int line = 1;
    int column = 1;
};

struct SExpr
{
    bool is_atom = true;
    bool is_string = false;
    std::string text;
    std::vector<SExpr> items;
    Pos pos;
};

[[noreturn]] void fail(const Pos& p, const std::string& message)
{
    throw ParseError(message, p.line, p.column);
}

class Reader
{
public:
    explicit Reader(std::string_view text) : text_(text) {}

    bool done()
    {
        skip();
        return i_ >= text_.size();
    }

    SExpr read()
    {
        skip();
        SExpr e;
        e.pos = pos_;
        if (i_ >= text_.size())
            fail(pos_, "unexpected end of input");
        char c = text_[i_];
        if (c == ')')
            fail(pos_, "unbalanced ')'");
        if (c == '(') {
            advance();
            e.is_atom = false;
            while (true) {
                skip();
                if (i_ >= text_.size())
                    fail(e.pos, "unclosed '('");
                if (text_[i_] == ')') {
                    advance();
                    return e;
                }
                e.items.push_back(read());
            }
        }
        if (c == '|' || c == '"') {
            advance();
            while (i_ < text_.size() && text_[i_] != c)
                e.text += advance();
            if (i_ >= text_.size())
                fail(e.pos, "unterminated literal");
            advance();
            e.is_string = c == '"';
            return e;
        }
        while (i_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[i_])) && text_[i_] != '(' &&
               text_[i_] != ')' && text_[i_] != ';')
            e.text += advance();
        return e;
    }

private:
    char advance()
    {
        char c = text_[i_++];
        if (c == '\n') {
            ++pos_.line;
            pos_.column = 1;
        } else {
            ++pos_.column;
        }
        return c;
    }

    void skip()
    {
        while (i_ < text_.size()) {
            char c = text_[i_];
            if (c == ';') {
                while (i_ < text_.size() && text_[i_] != '\n')
                    advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t i_ = 0;
    Pos pos_;
};

// A numeric term as guarded cases, so that ite can appear under arithmetic.
using Cases = std::vector<std::pair<Formula, LinearTerm>>;

struct Val
{
    bool is_bool = false;
    Formula truth;
    Cases cases;
};

Val boolean(Formula f)
{
    return {true, std::move(f), {}};
}

Val numeric(Cases c)
{
    return {false, Formula::top(), std::move(c)};
}

Val constant(const Rational& q)
{
    return numeric({{Formula::top(), LinearTerm(q)}});
}

bool is_number(const std::string& s)
{
    if (s.empty() || !std::isdigit(static_cast<unsigned char>(s[0])))
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.')
            return false;
    return true;
}

class Translator
{
public:
    explicit Translator(SmtProblem& p) : p_(p) {}

    void command(const SExpr& e)
    {
        if (e.is_atom || e.items.empty() || !e.items[0].is_atom)
            fail(e.pos, "expected a command");
        const std::string& head = e.items[0].text;
        if (head == "set-logic") {
            arity(e, 2);
            p_.logic = e.items[1].text;
        } else if (head == "set-info" || head == "set-option" || head == "exit") {
        } else if (head == "declare-fun") {
            arity(e, 4);
            if (e.items[2].is_atom || !e.items[2].items.empty())
                throw UnsupportedTheory(where(e.items[2].pos) + "only 0-ary functions are supported");
            declare(e.items[1], e.items[3]);
        } else if (head == "declare-const") {
            arity(e, 3);
            declare(e.items[1], e.items[2]);
        } else if (head == "define-fun") {
            arity(e, 5);
            if (e.items[2].is_atom || !e.items[2].items.empty())
                throw UnsupportedTheory(where(e.items[2].pos) + "only 0-ary definitions are supported");
            Val v = eval(e.items[4]);
            if (v.is_bool != (sort_of(e.items[3]) == Sort::Bool))
                fail(e.items[4].pos, "definition does not match its declared sort");
            defs_[e.items[1].text] = v;
        } else if (head == "assert") {
            arity(e, 2);
            p_.assertions.push_back(as_bool(eval(e.items[1]), e.items[1].pos));
        } else if (head == "check-sat") {
            p_.check_sat = true;
        } else if (head == "get-model") {
            p_.get_model = true;
        } else {
            fail(e.items[0].pos, "unsupported command '" + head + "'");
        }
    }

private:
    static std::string where(const Pos& p) { return std::to_string(p.line) + ":" + std::to_string(p.column) + ": "; }

    static void arity(const SExpr& e, std::size_t n)
    {
        if (e.items.size() != n)
            fail(e.pos, "'" + e.items[0].text + "' expects " + std::to_string(n - 1) + " argument(s)");
    }

    static Sort sort_of(const SExpr& s)
    {
        if (s.is_atom) {
            if (s.text == "Real")
                return Sort::Real;
            if (s.text == "Int")
                return Sort::Int;
            if (s.text == "Bool")
                return Sort::Bool;
        }
        throw UnsupportedTheory(where(s.pos) + "unsupported sort");
    }

    void declare(const SExpr& name, const SExpr& sort)
    {
        if (!name.is_atom)
            fail(name.pos, "expected a symbol");
        if (vars_.count(name.text))
            fail(name.pos, "symbol '" + name.text + "' declared twice");
        TimedVar v(name.text, TimeIndex::fixed(), sort_of(sort));
        vars_.emplace(name.text, v);
        p_.declarations.push_back(v);
    }

    static Formula as_bool(const Val& v, const Pos& p)
    {
        if (!v.is_bool)
            fail(p, "expected a Bool term");
        return v.truth;
    }

    static const Cases& as_num(const Val& v, const Pos& p)
    {
        if (v.is_bool)
            fail(p, "expected a numeric term");
        return v.cases;
    }

    template <class Op>
    static Cases combine(const Cases& a, const Cases& b, Op op)
    {
        Cases out;
        for (const auto& [ga, ta] : a)
            for (const auto& [gb, tb] : b) {
                Formula g = Formula::conjunction({ga, gb});
                if (!g.is_false())
                    out.emplace_back(g, op(ta, tb));
            }
        return out;
    }

    static Formula relate(const Cases& a, Rel rel, const Cases& b)
    {
        std::vector<Formula> alts;
        for (const auto& [ga, ta] : a)
            for (const auto& [gb, tb] : b)
                alts.push_back(Formula::conjunction({ga, gb, Formula::compare(ta, rel, tb)}));
        return Formula::disjunction(std::move(alts));
    }

    Val eval(const SExpr& e)
    {
        if (e.is_atom) {
            if (e.is_string)
                fail(e.pos, "unexpected string literal");
            if (is_number(e.text)) {
                try {
                    return constant(parse_rational(e.text));
                } catch (const std::exception&) {
                    fail(e.pos, "malformed number '" + e.text + "'");
                }
            }
            if (e.text == "true" || e.text == "false")
                return boolean(Formula::constant(e.text == "true"));
            for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
                if (auto f = it->find(e.text); f != it->end())
                    return f->second;
            if (auto f = defs_.find(e.text); f != defs_.end())
                return f->second;
            auto v = vars_.find(e.text);
            if (v == vars_.end())
                fail(e.pos, "undeclared symbol '" + e.text + "'");
            if (v->second.sort == Sort::Bool)
                return boolean(Formula::boolean(v->second));
            return numeric({{Formula::top(), LinearTerm::variable(v->second)}});
        }
        if (e.items.empty() || !e.items[0].is_atom)
            fail(e.pos, "expected an operator");
        const std::string& op = e.items[0].text;
        std::size_t n = e.items.size() - 1;
        auto arg = [&](std::size_t i) { return eval(e.items[i + 1]); };
        auto need = [&](bool ok) {
            if (!ok)
                fail(e.pos, "wrong number of arguments to '" + op + "'");
        };

        if (op == "let") {
            need(n == 2 && !e.items[1].is_atom);
            std::map<std::string, Val> frame;
            for (const auto& b : e.items[1].items) {
                if (b.is_atom || b.items.size() != 2 || !b.items[0].is_atom)
                    fail(b.pos, "malformed let binding");
                frame[b.items[0].text] = eval(b.items[1]);
            }
            scopes_.push_back(std::move(frame));
            Val body = eval(e.items[2]);
            scopes_.pop_back();
            return body;
        }
        if (op == "not") {
            need(n == 1);
            return boolean(Formula::negation(as_bool(arg(0), e.items[1].pos)));
        }
        if (op == "and" || op == "or" || op == "xor" || op == "=>") {
            need(n >= 1);
            std::vector<Formula> xs;
            for (std::size_t i = 0; i < n; ++i)
                xs.push_back(as_bool(arg(i), e.items[i + 1].pos));
            if (op == "and")
                return boolean(Formula::conjunction(std::move(xs)));
            if (op == "or")
                return boolean(Formula::disjunction(std::move(xs)));
            if (op == "xor") {
                Formula acc = xs[0];
                for (std::size_t i = 1; i < xs.size(); ++i)
                    acc = Formula::negation(Formula::iff(acc, xs[i]));
                return boolean(acc);
            }
            Formula acc = xs.back();
            for (std::size_t i = xs.size() - 1; i-- > 0;)
                acc = Formula::implies(xs[i], acc);
            return boolean(acc);
        }
        if (op == "ite") {
            need(n == 3);
            Formula c = as_bool(arg(0), e.items[1].pos);
            Val a = arg(1), b = arg(2);
            if (a.is_bool != b.is_bool)
                fail(e.pos, "ite branches have different sorts");
            if (a.is_bool)
                return boolean(Formula::disjunction({Formula::conjunction({c, a.truth}),
                                                     Formula::conjunction({Formula::negation(c), b.truth})}));
            Cases out;
            for (const auto& [g, t] : a.cases)
                out.emplace_back(Formula::conjunction({c, g}), t);
            for (const auto& [g, t] : b.cases)
                out.emplace_back(Formula::conjunction({Formula::negation(c), g}), t);
            return numeric(std::move(out));
        }
        if (op == "=" || op == "distinct" || op == "<" || op == "<=" || op == ">" || op == ">=") {
            need(n >= 2);
            std::vector<Val> xs;
            for (std::size_t i = 0; i < n; ++i)
                xs.push_back(arg(i));
            bool bools = xs[0].is_bool;
            for (std::size_t i = 0; i < n; ++i)
                if (xs[i].is_bool != bools)
                    fail(e.items[i + 1].pos, "operands of '" + op + "' have different sorts");
            std::vector<Formula> parts;
            if (op == "distinct") {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i + 1; j < n; ++j)
                        parts.push_back(bools ? Formula::negation(Formula::iff(xs[i].truth, xs[j].truth))
                                              : relate(xs[i].cases, Rel::Ne, xs[j].cases));
                return boolean(Formula::conjunction(std::move(parts)));
            }
            if (bools && op != "=")
                fail(e.pos, "'" + op + "' needs numeric operands");
            Rel rel = op == "=" ? Rel::Eq : op == "<" ? Rel::Lt : op == "<=" ? Rel::Le : op == ">" ? Rel::Gt : Rel::Ge;
            for (std::size_t i = 0; i + 1 < n; ++i)
                parts.push_back(bools ? Formula::iff(xs[i].truth, xs[i + 1].truth)
                                      : relate(xs[i].cases, rel, xs[i + 1].cases));
            return boolean(Formula::conjunction(std::move(parts)));
        }
        if (op == "+" || op == "-") {
            need(n >= 1);
            Cases acc = as_num(arg(0), e.items[1].pos);
            if (op == "-" && n == 1) {
                for (auto& [g, t] : acc)
                    t = -t;
                return numeric(std::move(acc));
            }
            for (std::size_t i = 1; i < n; ++i)
                acc = combine(acc, as_num(arg(i), e.items[i + 1].pos), [&](const LinearTerm& a, const LinearTerm& b) {
                    return op == "+" ? a + b : a - b;
                });
            return numeric(std::move(acc));
        }
        if (op == "*") {
            need(n >= 1);
            Cases acc = as_num(arg(0), e.items[1].pos);
            for (std::size_t i = 1; i < n; ++i)
                acc = combine(acc, as_num(arg(i), e.items[i + 1].pos), [&](const LinearTerm& a, const LinearTerm& b) {
                    if (a.is_constant())
                        return b * a.constant();
                    if (b.is_constant())
                        return a * b.constant();
                    throw UnsupportedTheory(where(e.pos) + "nonlinear multiplication");
                });
            return numeric(std::move(acc));
        }
        if (op == "/") {
            need(n >= 2);
            Cases acc = as_num(arg(0), e.items[1].pos);
            for (std::size_t i = 1; i < n; ++i)
                acc = combine(acc, as_num(arg(i), e.items[i + 1].pos), [&](const LinearTerm& a, const LinearTerm& b) {
                    if (!b.is_constant())
                        throw UnsupportedTheory(where(e.pos) + "division by a non-constant");
                    if (b.constant() == 0)
                        fail(e.pos, "division by zero");
                    return a * Rational(1 / b.constant());
                });
            return numeric(std::move(acc));
        }
        if (op == "to_real") {
            need(n == 1);
            return numeric(as_num(arg(0), e.items[1].pos));
        }
        if (op == "abs") {
            need(n == 1);
            Cases out;
            for (const auto& [g, t] : as_num(arg(0), e.items[1].pos)) {
                out.emplace_back(Formula::conjunction({g, Formula::compare(t, Rel::Ge)}), t);
                out.emplace_back(Formula::conjunction({g, Formula::compare(t, Rel::Lt)}), -t);
            }
            return numeric(std::move(out));
        }
        throw UnsupportedTheory(where(e.items[0].pos) + "unsupported operator '" + op + "'");
    }

    SmtProblem& p_;
    std::map<std::string, TimedVar> vars_;
    std::map<std::string, Val> defs_;
    std::vector<std::map<std::string, Val>> scopes_;
};

void complete(Assignment& a, const SmtProblem& p)
{
    for (const auto& v : p.declarations)
        if (!a.contains(v))
            a.set(v, v.sort == Sort::Bool ? Value(false) : Value(Rational(0)));
}

bool satisfies(const SmtProblem& p, const Assignment& a)
{
    for (const auto& f : p.assertions)
        if (!evaluate(f, a))
            return false;
    return true;
}

SmtResult unknown(std::string reason, int refinements = 0)
{
    SmtResult r;
    r.reason = std::move(reason);
    r.refinements = refinements;
    return r;
}

SmtResult sat_with(const SmtProblem& p, Assignment model, int refinements = 0)
{
    complete(model, p);
    if (!satisfies(p, model))
        return unknown("model extraction failed", refinements);
    SmtResult r;
    r.status = SmtResult::Status::Sat;
    r.model = std::move(model);
    r.refinements = refinements;
    return r;
}

// Fixes every Int symbol to the floor or ceiling of its relaxed value (first 16 combinations)
// and solves the remaining real part.
std::optional<Assignment> round_integers(const SmtProblem& p, const Formula& f, const Assignment& relaxed,
                                         const QeOptions& opt)
{
    std::vector<std::pair<TimedVar, Rational>> ints;
    for (const auto& v : p.declarations)
        if (v.sort == Sort::Int)
            if (const Value* x = relaxed.find(v))
                ints.emplace_back(v, std::get<Rational>(*x));
    std::size_t combos = std::size_t(1) << std::min<std::size_t>(ints.size(), 4);
    for (std::size_t mask = 0; mask < combos; ++mask) {
        Formula g = f;
        Assignment fixed;
        for (std::size_t i = 0; i < ints.size(); ++i) {
            const auto& [v, q] = ints[i];
            Integer z = i < 4 && ((mask >> i) & 1) ? ceil(q) : floor(q);
            g = substitute(g, v, LinearTerm(Rational(z)));
            fixed.set(v, Rational(z));
        }
        g = simplify(g);
        if (g.is_false())
            continue;
        auto m = find_model(g, nullptr, opt);
        if (!m)
            continue;
        for (const auto& [v, x] : fixed.values())
            m->set(v, x);
        return m;
    }
    return std::nullopt;
}

SmtResult unsat(int refinements = 0)
{
    SmtResult r;
    r.status = SmtResult::Status::Unsat;
    r.refinements = refinements;
    return r;
}

// Closed integer range of v implied by the single-variable top-level conjuncts of f.
std::optional<std::pair<Integer, Integer>> integer_range(const Formula& f, const TimedVar& v)
{
    IntervalSet s = IntervalSet::full();
    for (const auto& c : conjuncts(f)) {
        if (!c.is_atom())
            continue;
        const auto* cmp = std::get_if<Compare>(&c.atom());
        if (!cmp || cmp->term.coefficients().size() != 1 || !cmp->term.contains(v))
            continue;
        Rational a = cmp->term.coefficient(v);
        Rel rel = a > 0 ? cmp->rel : mirror(cmp->rel);
        s = s.intersect(IntervalSet::from_rel(rel, -cmp->term.constant() / a));
    }
    s = s.integral();
    if (s.parts().empty())
        return std::pair<Integer, Integer>(Integer(1), Integer(0));
    const auto& lo = s.parts().front().lo;
    const auto& hi = s.parts().back().hi;
    if (!lo || !hi)
        return std::nullopt;
    return std::pair<Integer, Integer>(floor(*lo), floor(*hi));
}

} // namespace

bool SmtProblem::has_sort(Sort s) const
{
    for (const auto& v : declarations)
        if (v.sort == s)
            return true;
    return false;
}

std::string to_string(SmtResult::Status s)
{
    switch (s) {
    case SmtResult::Status::Sat:
        return "sat";
    case SmtResult::Status::Unsat:
        return "unsat";
    case SmtResult::Status::Unknown:
        return "unknown";
    }
    return "?";
}

SmtProblem parse_smtlib(std::string_view text)
{
    SmtProblem p;
    Translator t(p);
    Reader r(text);
    while (!r.done())
        t.command(r.read());
    return p;
}

SmtResult check_sat(const SmtProblem& p, const SmtOptions& opt)
{
    if (p.has_sort(Sort::Int) && p.has_sort(Sort::Real))
        return check_sat_mixed(p, opt);
    try {
        Formula f = Formula::conjunction(p.assertions);
        if (!is_satisfiable(f, opt.qe))
            return unsat();
        auto model = find_model(f, nullptr, opt.qe);
        if (!model)
            return unknown("satisfiable, but no standard model was found");
        return sat_with(p, *model);
    } catch (const ResourceLimit& e) {
        return unknown(e.what());
    }
}

SmtResult check_sat_mixed(const SmtProblem& p, const SmtOptions& opt)
{
    try {
        Formula f = Formula::conjunction(p.assertions);

        // the purely integral part must be satisfiable on its own
        std::vector<Formula> int_only;
        for (const auto& c : conjuncts(f)) {
            auto fv = free_vars(c);
            if (!fv.empty() && std::all_of(fv.begin(), fv.end(), [](const TimedVar& v) { return v.sort == Sort::Int; }))
                int_only.push_back(c);
        }
        if (!int_only.empty() && !is_satisfiable(Formula::conjunction(int_only), opt.qe))
            return unsat();

        std::vector<Formula> parts{f};
        for (const auto& v : p.declarations) {
            if (v.sort != Sort::Int)
                continue;
            auto range = integer_range(f, v);
            if (!range)
                continue;
            if (range->first > range->second)
                return unsat();
            if (range->second - range->first >= opt.enumeration_limit)
                continue;
            std::vector<Formula> values;
            for (Integer x = range->first; x <= range->second; ++x)
                values.push_back(Formula::compare(LinearTerm::variable(v), Rel::Eq, LinearTerm(Rational(x))));
            parts.push_back(Formula::disjunction(std::move(values)));
        }
        auto to_real = [](const TimedVar& v) { return v.sort == Sort::Int ? TimedVar(v.name, v.index, Sort::Real) : v; };
        Formula relaxed = map_vars(Formula::conjunction(std::move(parts)), to_real);

        // branch and bound: a spurious value v of x splits into x <= floor(v) and x >= ceil(v)
        std::deque<Formula> pending{relaxed};
        int splits = 0;
        bool incomplete = false;
        while (!pending.empty()) {
            Formula g = pending.front();
            pending.pop_front();
            std::string symbolic;
            auto model = find_model(g, &symbolic, opt.qe);
            if (!model) {
                incomplete = incomplete || !symbolic.empty();
                continue;
            }
            Assignment back;
            std::optional<TimedVar> spurious;
            Rational spurious_value;
            for (const auto& v : p.declarations) {
                const Value* x = model->find(to_real(v));
                if (!x)
                    continue;
                if (v.sort == Sort::Int && !is_integral(std::get<Rational>(*x)) && !spurious) {
                    spurious = to_real(v);
                    spurious_value = std::get<Rational>(*x);
                }
                back.set(v, *x);
            }
            if (!spurious)
                return sat_with(p, back, splits);
            if (auto rounded = round_integers(p, f, back, opt.qe))
                return sat_with(p, *rounded, splits);
            if (splits == opt.refinement_cap)
                return unknown("refinement cap of " + std::to_string(opt.refinement_cap) + " reached", splits);
            ++splits;
            LinearTerm x = LinearTerm::variable(*spurious);
            pending.push_back(
                Formula::conjunction({g, Formula::compare(x, Rel::Le, LinearTerm(Rational(floor(spurious_value))))}));
            pending.push_back(
                Formula::conjunction({g, Formula::compare(x, Rel::Ge, LinearTerm(Rational(ceil(spurious_value))))}));
        }
        if (incomplete)
            return unknown("a relaxation is satisfiable, but no standard model was found", splits);
        return unsat(splits);
    } catch (const ResourceLimit& e) {
        return unknown(e.what());
    }
}

SmtResult solve(const SmtProblem& p, const SmtOptions& opt)
{
    if (p.has_sort(Sort::Int) && p.has_sort(Sort::Real))
        return check_sat_mixed(p, opt);
    return check_sat(p, opt);
}

std::string format_model(const SmtProblem& p, const Assignment& model)
{
    std::ostringstream out;
    for (const auto& v : p.declarations) {
        const Value* x = model.find(v);
        if (!x)
            continue;
        out << v.name << " ";
        if (const auto* b = std::get_if<bool>(x))
            out << (*b ? "true" : "false");
        else {
            const Rational& q = std::get<Rational>(*x);
            out << q.get_num().get_str() << "/" << q.get_den().get_str();
        }
        out << "\n";
    }
    return out.str();
}

} // namespace relic
