#include "relic/formula.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <utility>

namespace relic
{

std::string to_string(Sort s)
{
    switch (s) {
    case Sort::Real:
        return "real";
    case Sort::Int:
        return "int";
    case Sort::Bool:
        return "bool";
    }
    return "?";
}

std::optional<Sort> parse_sort(std::string_view text)
{
    if (text == "real" || text == "Real")
        return Sort::Real;
    if (text == "int" || text == "Int")
        return Sort::Int;
    if (text == "bool" || text == "Bool")
        return Sort::Bool;
    return std::nullopt;
}

// ---------------------------------------------------------------- TimedVar

TimedVar::TimedVar(std::string n, TimeIndex i, Sort s) : name(std::move(n)), index(i), sort(s)
{
    if (name.empty())
        throw Error("variable name must be nonempty");
}

bool operator<(const TimedVar& a, const TimedVar& b)
{
    if (a.name != b.name)
        return a.name < b.name;
    if (a.index.kind != b.index.kind)
        return a.index.kind < b.index.kind;
    if (a.index.value != b.index.value) {
        // newest relative offset first so x prints before x[k-1]
        if (a.index.kind == TimeIndex::Kind::Relative)
            return a.index.value > b.index.value;
        return a.index.value < b.index.value;
    }
    return a.sort < b.sort;
}

std::string to_string(const TimedVar& v)
{
    switch (v.index.kind) {
    case TimeIndex::Kind::Static:
        return v.name;
    case TimeIndex::Kind::Relative:
        if (v.index.value == 0)
            return v.name;
        return v.name + "[k" + (v.index.value > 0 ? "+" : "-") +
               std::to_string(v.index.value > 0 ? v.index.value : -v.index.value) + "]";
    case TimeIndex::Kind::Absolute:
        return v.name + "[" + std::to_string(v.index.value) + "]";
    }
    return v.name;
}

// -------------------------------------------------------------- LinearTerm

LinearTerm::LinearTerm(Rational constant) : constant_(std::move(constant)) {}

LinearTerm LinearTerm::variable(const TimedVar& v, const Rational& coefficient)
{
    LinearTerm t;
    t.add(v, coefficient);
    return t;
}

Rational LinearTerm::coefficient(const TimedVar& v) const
{
    auto it = coeffs_.find(v);
    return it == coeffs_.end() ? Rational(0) : it->second;
}

void LinearTerm::add(const TimedVar& v, const Rational& c)
{
    if (c == 0)
        return;
    auto [it, inserted] = coeffs_.emplace(v, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0)
            coeffs_.erase(it);
    }
}

LinearTerm LinearTerm::operator+(const LinearTerm& o) const
{
    LinearTerm r = *this;
    for (const auto& [v, c] : o.coeffs_)
        r.add(v, c);
    r.constant_ += o.constant_;
    return r;
}

LinearTerm LinearTerm::operator-(const LinearTerm& o) const
{
    return *this + (-o);
}

LinearTerm LinearTerm::operator-() const
{
    return *this * Rational(-1);
}

LinearTerm LinearTerm::operator*(const Rational& k) const
{
    LinearTerm r;
    if (k == 0)
        return r;
    for (const auto& [v, c] : coeffs_)
        r.coeffs_.emplace(v, c * k);
    r.constant_ = constant_ * k;
    return r;
}

LinearTerm LinearTerm::without(const TimedVar& v) const
{
    LinearTerm r = *this;
    r.coeffs_.erase(v);
    return r;
}

LinearTerm LinearTerm::substitute(const TimedVar& v, const LinearTerm& replacement) const
{
    auto it = coeffs_.find(v);
    if (it == coeffs_.end())
        return *this;
    Rational c = it->second;
    return without(v) + replacement * c;
}

LinearTerm LinearTerm::map_vars(const std::function<TimedVar(const TimedVar&)>& f) const
{
    LinearTerm r(constant_);
    for (const auto& [v, c] : coeffs_)
        r.add(f(v), c);
    return r;
}

bool LinearTerm::operator==(const LinearTerm& o) const
{
    return compare(*this, o) == 0;
}

int compare(const LinearTerm& a, const LinearTerm& b)
{
    auto ia = a.coefficients().begin();
    auto ib = b.coefficients().begin();
    for (; ia != a.coefficients().end() && ib != b.coefficients().end(); ++ia, ++ib) {
        if (ia->first < ib->first)
            return -1;
        if (ib->first < ia->first)
            return 1;
        if (int c = cmp(ia->second, ib->second); c != 0)
            return c < 0 ? -1 : 1;
    }
    if (ia != a.coefficients().end())
        return 1;
    if (ib != b.coefficients().end())
        return -1;
    int c = cmp(a.constant(), b.constant());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::set<TimedVar> vars(const LinearTerm& t)
{
    std::set<TimedVar> out;
    for (const auto& [v, c] : t.coefficients())
        out.insert(v);
    return out;
}

// --------------------------------------------------------------------- Rel

Rel negate(Rel r)
{
    switch (r) {
    case Rel::Eq:
        return Rel::Ne;
    case Rel::Ne:
        return Rel::Eq;
    case Rel::Lt:
        return Rel::Ge;
    case Rel::Le:
        return Rel::Gt;
    case Rel::Gt:
        return Rel::Le;
    case Rel::Ge:
        return Rel::Lt;
    }
    return r;
}

Rel mirror(Rel r)
{
    switch (r) {
    case Rel::Lt:
        return Rel::Gt;
    case Rel::Le:
        return Rel::Ge;
    case Rel::Gt:
        return Rel::Lt;
    case Rel::Ge:
        return Rel::Le;
    default:
        return r;
    }
}

const char* symbol(Rel r)
{
    switch (r) {
    case Rel::Eq:
        return "=";
    case Rel::Ne:
        return "!=";
    case Rel::Lt:
        return "<";
    case Rel::Le:
        return "<=";
    case Rel::Gt:
        return ">";
    case Rel::Ge:
        return ">=";
    }
    return "?";
}

bool holds(Rel r, int s)
{
    switch (r) {
    case Rel::Eq:
        return s == 0;
    case Rel::Ne:
        return s != 0;
    case Rel::Lt:
        return s < 0;
    case Rel::Le:
        return s <= 0;
    case Rel::Gt:
        return s > 0;
    case Rel::Ge:
        return s >= 0;
    }
    return false;
}

// ----------------------------------------------------------------- Formula

struct Formula::Node
{
    Kind kind = Kind::Atom;
    Atom atom = TrueAtom{};
    std::vector<Formula> kids;
    TimedVar bound;
};

namespace
{

const std::shared_ptr<const Formula::Node>& true_node()
{
    static const auto n = [] {
        auto p = std::make_shared<Formula::Node>();
        p->atom = TrueAtom{};
        return std::shared_ptr<const Formula::Node>(p);
    }();
    return n;
}

const std::shared_ptr<const Formula::Node>& false_node()
{
    static const auto n = [] {
        auto p = std::make_shared<Formula::Node>();
        p->atom = FalseAtom{};
        return std::shared_ptr<const Formula::Node>(p);
    }();
    return n;
}

void require_numeric(const LinearTerm& t)
{
    for (const auto& [v, c] : t.coefficients())
        if (v.sort == Sort::Bool)
            throw SortError("boolean variable '" + to_string(v) + "' used in arithmetic");
}

} // namespace

Formula::Formula() : node_(true_node()) {}

Formula::Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

Formula Formula::top()
{
    return Formula(true_node());
}

Formula Formula::bottom()
{
    return Formula(false_node());
}

Formula Formula::compare(const LinearTerm& term, Rel rel)
{
    require_numeric(term);
    if (term.is_constant())
        return constant(holds(rel, sgn(term.constant())));

    // clear denominators, divide out the content, positive leading coefficient
    Integer den = term.constant().get_den();
    for (const auto& [v, c] : term.coefficients())
        den = lcm(den, c.get_den());
    Integer content = 0;
    for (const auto& [v, c] : term.coefficients())
        content = gcd(content, Integer(c.get_num() * (den / c.get_den())));
    if (term.constant() != 0)
        content = gcd(content, Integer(term.constant().get_num() * (den / term.constant().get_den())));
    Rational scale(den, content);
    scale.canonicalize();
    if (term.coefficients().begin()->second < 0) {
        scale = -scale;
        rel = mirror(rel);
    }

    auto n = std::make_shared<Node>();
    n->atom = Compare{term * scale, rel};
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::compare(const LinearTerm& lhs, Rel rel, const LinearTerm& rhs)
{
    return compare(lhs - rhs, rel);
}

Formula Formula::divides(const Integer& modulus_in, const LinearTerm& term)
{
    for (const auto& [v, c] : term.coefficients())
        if (v.sort != Sort::Int)
            throw SortError("divisibility over non-integer variable '" + to_string(v) + "'");
    Integer modulus = abs(modulus_in);
    if (modulus == 0)
        return compare(term, Rel::Eq);

    Integer den = term.constant().get_den();
    for (const auto& [v, c] : term.coefficients())
        den = lcm(den, c.get_den());
    modulus *= den;

    auto reduce = [&](const Rational& q) {
        Integer z = q.get_num() * (den / q.get_den());
        Integer r;
        mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), modulus.get_mpz_t());
        return r;
    };

    std::map<TimedVar, Integer> coeffs;
    for (const auto& [v, c] : term.coefficients())
        if (Integer r = reduce(c); r != 0)
            coeffs.emplace(v, r);
    Integer k = reduce(term.constant());

    if (coeffs.empty())
        return constant(k == 0);

    Integer g = modulus;
    for (const auto& [v, c] : coeffs)
        g = gcd(g, c);
    Integer kr;
    mpz_fdiv_r(kr.get_mpz_t(), k.get_mpz_t(), g.get_mpz_t());
    if (kr != 0)
        return bottom();
    // g divides every coefficient, the modulus and the constant
    modulus /= g;
    if (modulus == 1)
        return top();
    LinearTerm reduced(Rational(k / g));
    for (const auto& [v, c] : coeffs)
        reduced.add(v, Rational(c / g));

    auto n = std::make_shared<Node>();
    n->atom = Divides{modulus, reduced};
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::boolean(const TimedVar& v)
{
    if (v.sort != Sort::Bool)
        throw SortError("variable '" + to_string(v) + "' is not boolean");
    auto n = std::make_shared<Node>();
    n->atom = BoolAtom{v};
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::negation(Formula f)
{
    if (f.is_true())
        return bottom();
    if (f.is_false())
        return top();
    if (f.kind() == Kind::Not)
        return f.child(0);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Not;
    n->kids.push_back(std::move(f));
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::conjunction(std::vector<Formula> parts)
{
    std::vector<Formula> flat;
    for (auto& p : parts) {
        if (p.is_false())
            return bottom();
        if (p.is_true())
            continue;
        if (p.kind() == Kind::And)
            for (const auto& c : p.children())
                flat.push_back(c);
        else
            flat.push_back(std::move(p));
    }
    if (flat.empty())
        return top();
    if (flat.size() == 1)
        return flat.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::And;
    n->kids = std::move(flat);
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::disjunction(std::vector<Formula> parts)
{
    std::vector<Formula> flat;
    for (auto& p : parts) {
        if (p.is_true())
            return top();
        if (p.is_false())
            continue;
        if (p.kind() == Kind::Or)
            for (const auto& c : p.children())
                flat.push_back(c);
        else
            flat.push_back(std::move(p));
    }
    if (flat.empty())
        return bottom();
    if (flat.size() == 1)
        return flat.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Or;
    n->kids = std::move(flat);
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::implies(Formula a, Formula b)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Implies;
    n->kids = {std::move(a), std::move(b)};
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::iff(Formula a, Formula b)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Iff;
    n->kids = {std::move(a), std::move(b)};
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::exists(const TimedVar& v, Formula body)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Exists;
    n->bound = v;
    n->kids = {std::move(body)};
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::forall(const TimedVar& v, Formula body)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Forall;
    n->bound = v;
    n->kids = {std::move(body)};
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula::Kind Formula::kind() const
{
    return node_->kind;
}

bool Formula::is_true() const
{
    return node_->kind == Kind::Atom && std::holds_alternative<TrueAtom>(node_->atom);
}

bool Formula::is_false() const
{
    return node_->kind == Kind::Atom && std::holds_alternative<FalseAtom>(node_->atom);
}

bool Formula::is_literal() const
{
    return is_atom() || (kind() == Kind::Not && child(0).is_atom());
}

const Atom& Formula::atom() const
{
    assert(is_atom());
    return node_->atom;
}

std::span<const Formula> Formula::children() const
{
    return node_->kids;
}

const TimedVar& Formula::bound() const
{
    assert(is_quantifier());
    return node_->bound;
}

Formula operator&&(const Formula& a, const Formula& b)
{
    return Formula::conjunction({a, b});
}

Formula operator||(const Formula& a, const Formula& b)
{
    return Formula::disjunction({a, b});
}

Formula operator!(const Formula& f)
{
    return Formula::negation(f);
}

namespace
{

int compare_vars(const TimedVar& a, const TimedVar& b)
{
    if (a < b)
        return -1;
    if (b < a)
        return 1;
    return 0;
}

int compare_atoms(const Atom& a, const Atom& b)
{
    if (a.index() != b.index())
        return a.index() < b.index() ? -1 : 1;
    if (const auto* ca = std::get_if<Compare>(&a)) {
        const auto& cb = std::get<Compare>(b);
        if (ca->rel != cb.rel)
            return ca->rel < cb.rel ? -1 : 1;
        return compare(ca->term, cb.term);
    }
    if (const auto* da = std::get_if<Divides>(&a)) {
        const auto& db = std::get<Divides>(b);
        if (int c = cmp(da->modulus, db.modulus); c != 0)
            return c < 0 ? -1 : 1;
        return compare(da->term, db.term);
    }
    if (const auto* ba = std::get_if<BoolAtom>(&a))
        return compare_vars(ba->var, std::get<BoolAtom>(b).var);
    return 0;
}

} // namespace

int compare(const Formula& a, const Formula& b)
{
    if (a.same_node(b))
        return 0;
    if (a.kind() != b.kind())
        return a.kind() < b.kind() ? -1 : 1;
    if (a.is_atom())
        return compare_atoms(a.atom(), b.atom());
    if (a.is_quantifier())
        if (int c = compare_vars(a.bound(), b.bound()); c != 0)
            return c;
    auto ka = a.children();
    auto kb = b.children();
    for (std::size_t i = 0; i < ka.size() && i < kb.size(); ++i)
        if (int c = compare(ka[i], kb[i]); c != 0)
            return c;
    if (ka.size() != kb.size())
        return ka.size() < kb.size() ? -1 : 1;
    return 0;
}

// -------------------------------------------------------------- Assignment

void Assignment::set(const TimedVar& v, Value value)
{
    values_[v] = std::move(value);
}

const Value* Assignment::find(const TimedVar& v) const
{
    auto it = values_.find(v);
    return it == values_.end() ? nullptr : &it->second;
}

std::string to_string(const Value& v)
{
    if (const auto* q = std::get_if<Rational>(&v))
        return to_string(*q);
    return std::get<bool>(v) ? "true" : "false";
}

// -------------------------------------------------------------- traversals

namespace
{

void collect_sorts(const Formula& f, std::map<std::pair<std::string, std::pair<int, std::int64_t>>, Sort>& seen)
{
    auto note = [&](const TimedVar& v) {
        auto key = std::make_pair(v.name, std::make_pair(static_cast<int>(v.index.kind), v.index.value));
        auto [it, inserted] = seen.emplace(key, v.sort);
        if (!inserted && it->second != v.sort)
            throw SortError("variable '" + to_string(v) + "' used with sorts " + to_string(it->second) + " and " +
                            to_string(v.sort));
    };
    if (f.is_atom()) {
        std::visit(
            [&](const auto& a) {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, Compare>) {
                    for (const auto& [v, c] : a.term.coefficients()) {
                        if (v.sort == Sort::Bool)
                            throw SortError("boolean variable '" + to_string(v) + "' used in arithmetic");
                        note(v);
                    }
                } else if constexpr (std::is_same_v<T, Divides>) {
                    for (const auto& [v, c] : a.term.coefficients()) {
                        if (v.sort != Sort::Int)
                            throw SortError("divisibility over non-integer variable '" + to_string(v) + "'");
                        note(v);
                    }
                } else if constexpr (std::is_same_v<T, BoolAtom>) {
                    if (a.var.sort != Sort::Bool)
                        throw SortError("variable '" + to_string(a.var) + "' is not boolean");
                    note(a.var);
                }
            },
            f.atom());
        return;
    }
    if (f.is_quantifier())
        note(f.bound());
    for (const auto& c : f.children())
        collect_sorts(c, seen);
}

Formula negate_literal(const Formula& atom)
{
    return std::visit(
        [&](const auto& a) -> Formula {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, TrueAtom>)
                return Formula::bottom();
            else if constexpr (std::is_same_v<T, FalseAtom>)
                return Formula::top();
            else if constexpr (std::is_same_v<T, Compare>)
                return Formula::compare(a.term, negate(a.rel));
            else
                return Formula::negation(atom);
        },
        atom.atom());
}

Formula nnf(const Formula& f, bool positive)
{
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::Atom:
        return positive ? f : negate_literal(f);
    case K::Not:
        return nnf(f.child(0), !positive);
    case K::And:
    case K::Or: {
        std::vector<Formula> parts;
        for (const auto& c : f.children())
            parts.push_back(nnf(c, positive));
        bool conj = (f.kind() == K::And) == positive;
        return conj ? Formula::conjunction(std::move(parts)) : Formula::disjunction(std::move(parts));
    }
    case K::Implies:
        if (positive)
            return Formula::disjunction({nnf(f.child(0), false), nnf(f.child(1), true)});
        return Formula::conjunction({nnf(f.child(0), true), nnf(f.child(1), false)});
    case K::Iff: {
        const auto& a = f.child(0);
        const auto& b = f.child(1);
        if (positive)
            return Formula::disjunction({Formula::conjunction({nnf(a, true), nnf(b, true)}),
                                         Formula::conjunction({nnf(a, false), nnf(b, false)})});
        return Formula::disjunction({Formula::conjunction({nnf(a, true), nnf(b, false)}),
                                     Formula::conjunction({nnf(a, false), nnf(b, true)})});
    }
    case K::Exists:
    case K::Forall: {
        bool ex = (f.kind() == K::Exists) == positive;
        Formula body = nnf(f.body(), positive);
        return ex ? Formula::exists(f.bound(), body) : Formula::forall(f.bound(), body);
    }
    }
    return f;
}

using Clauses = std::vector<std::vector<Formula>>;

Clauses dnf_clauses(const Formula& f)
{
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::Atom: {
        if (f.is_true())
            return {{}};
        if (f.is_false())
            return {};
        if (const auto* c = std::get_if<Compare>(&f.atom()); c && c->rel == Rel::Ne)
            return {{Formula::compare(c->term, Rel::Lt)}, {Formula::compare(c->term, Rel::Gt)}};
        return {{f}};
    }
    case K::Not:
        return {{f}};
    case K::Or: {
        Clauses out;
        for (const auto& c : f.children())
            for (auto& cl : dnf_clauses(c))
                out.push_back(std::move(cl));
        return out;
    }
    case K::And: {
        Clauses acc{{}};
        for (const auto& c : f.children()) {
            Clauses part = dnf_clauses(c);
            Clauses next;
            for (const auto& left : acc)
                for (const auto& right : part) {
                    auto merged = left;
                    merged.insert(merged.end(), right.begin(), right.end());
                    next.push_back(std::move(merged));
                }
            acc = std::move(next);
            if (acc.empty())
                break;
        }
        return acc;
    }
    default:
        throw Error("to_dnf requires a quantifier-free formula");
    }
}

bool binds(const Formula& f, const TimedVar& v)
{
    if (f.is_atom())
        return false;
    if (f.is_quantifier() && f.bound() == v)
        return true;
    for (const auto& c : f.children())
        if (binds(c, v))
            return true;
    return false;
}

template <typename AtomFn>
Formula rebuild(const Formula& f, const AtomFn& on_atom, const std::function<TimedVar(const TimedVar&)>* on_bound)
{
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::Atom:
        return on_atom(f);
    case K::Not:
        return Formula::negation(rebuild(f.child(0), on_atom, on_bound));
    case K::And:
    case K::Or: {
        std::vector<Formula> parts;
        for (const auto& c : f.children())
            parts.push_back(rebuild(c, on_atom, on_bound));
        return f.kind() == K::And ? Formula::conjunction(std::move(parts)) : Formula::disjunction(std::move(parts));
    }
    case K::Implies:
        return Formula::implies(rebuild(f.child(0), on_atom, on_bound), rebuild(f.child(1), on_atom, on_bound));
    case K::Iff:
        return Formula::iff(rebuild(f.child(0), on_atom, on_bound), rebuild(f.child(1), on_atom, on_bound));
    case K::Exists:
    case K::Forall: {
        TimedVar b = on_bound ? (*on_bound)(f.bound()) : f.bound();
        Formula body = rebuild(f.body(), on_atom, on_bound);
        return f.kind() == K::Exists ? Formula::exists(b, body) : Formula::forall(b, body);
    }
    }
    return f;
}

void visit_vars(const Formula& f, const std::function<void(const TimedVar&)>& fn)
{
    if (f.is_atom()) {
        std::visit(
            [&](const auto& a) {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, Divides>) {
                    for (const auto& [v, c] : a.term.coefficients())
                        fn(v);
                } else if constexpr (std::is_same_v<T, BoolAtom>) {
                    fn(a.var);
                }
            },
            f.atom());
        return;
    }
    if (f.is_quantifier())
        fn(f.bound());
    for (const auto& c : f.children())
        visit_vars(c, fn);
}

void collect_free(const Formula& f, std::set<TimedVar>& bound, std::set<TimedVar>& out)
{
    if (f.is_atom()) {
        visit_vars(f, [&](const TimedVar& v) {
            if (!bound.count(v))
                out.insert(v);
        });
        return;
    }
    if (f.is_quantifier()) {
        bool fresh = bound.insert(f.bound()).second;
        collect_free(f.body(), bound, out);
        if (fresh)
            bound.erase(f.bound());
        return;
    }
    for (const auto& c : f.children())
        collect_free(c, bound, out);
}

} // namespace

void check_sorts(const Formula& f)
{
    std::map<std::pair<std::string, std::pair<int, std::int64_t>>, Sort> seen;
    collect_sorts(f, seen);
}

Formula normalize_nnf(const Formula& f)
{
    check_sorts(f);
    return nnf(f, true);
}

Formula to_dnf(const Formula& f)
{
    Clauses clauses = dnf_clauses(normalize_nnf(f));
    std::vector<Formula> parts;
    parts.reserve(clauses.size());
    for (auto& cl : clauses)
        parts.push_back(Formula::conjunction(std::move(cl)));
    return Formula::disjunction(std::move(parts));
}

Formula substitute(const Formula& f, const TimedVar& v, const LinearTerm& t)
{
    if (binds(f, v))
        throw CaptureError("variable '" + to_string(v) + "' is bound in the target formula");
    if (v.sort == Sort::Bool)
        throw SortError("cannot substitute an arithmetic term for boolean '" + to_string(v) + "'");
    auto on_atom = [&](const Formula& a) -> Formula {
        if (const auto* c = std::get_if<Compare>(&a.atom()); c && c->term.contains(v))
            return Formula::compare(c->term.substitute(v, t), c->rel);
        if (const auto* d = std::get_if<Divides>(&a.atom()); d && d->term.contains(v))
            return Formula::divides(d->modulus, d->term.substitute(v, t));
        return a;
    };
    return rebuild(f, on_atom, nullptr);
}

Formula substitute(const Formula& f, const TimedVar& v, bool value)
{
    if (binds(f, v))
        throw CaptureError("variable '" + to_string(v) + "' is bound in the target formula");
    auto on_atom = [&](const Formula& a) -> Formula {
        if (const auto* b = std::get_if<BoolAtom>(&a.atom()); b && b->var == v)
            return Formula::constant(value);
        return a;
    };
    return rebuild(f, on_atom, nullptr);
}

Formula map_vars(const Formula& formula, const std::function<TimedVar(const TimedVar&)>& f)
{
    auto on_atom = [&](const Formula& a) -> Formula {
        return std::visit(
            [&](const auto& at) -> Formula {
                using T = std::decay_t<decltype(at)>;
                if constexpr (std::is_same_v<T, Compare>)
                    return Formula::compare(at.term.map_vars(f), at.rel);
                else if constexpr (std::is_same_v<T, Divides>)
                    return Formula::divides(at.modulus, at.term.map_vars(f));
                else if constexpr (std::is_same_v<T, BoolAtom>)
                    return Formula::boolean(f(at.var));
                else
                    return a;
            },
            a.atom());
    };
    return rebuild(formula, on_atom, &f);
}

bool has_absolute(const Formula& f)
{
    bool found = false;
    visit_vars(f, [&](const TimedVar& v) { found = found || v.index.is_absolute(); });
    return found;
}

bool has_relative(const Formula& f)
{
    bool found = false;
    visit_vars(f, [&](const TimedVar& v) { found = found || v.index.is_relative(); });
    return found;
}

Formula shift(const Formula& f, std::int64_t delta)
{
    if (has_absolute(f))
        throw ShiftDomainError("cannot shift a formula with absolute step indices: " + to_string(f));
    if (delta == 0)
        return f;
    return map_vars(f, [delta](const TimedVar& v) {
        if (!v.index.is_relative())
            return v;
        return v.at(TimeIndex::relative(v.index.value + delta));
    });
}

Formula instantiate_at(const Formula& f, std::int64_t step)
{
    return map_vars(f, [step](const TimedVar& v) {
        if (!v.index.is_relative())
            return v;
        return v.at(TimeIndex::absolute(step + v.index.value));
    });
}

std::pair<std::int64_t, std::int64_t> offset_range(const Formula& f)
{
    if (has_absolute(f))
        throw ShiftDomainError("order is undefined for absolute step indices: " + to_string(f));
    std::optional<std::int64_t> lo, hi;
    visit_vars(f, [&](const TimedVar& v) {
        if (!v.index.is_relative())
            return;
        lo = lo ? std::min(*lo, v.index.value) : v.index.value;
        hi = hi ? std::max(*hi, v.index.value) : v.index.value;
    });
    if (!lo)
        return {0, 0};
    return {*lo, *hi};
}

std::int64_t order(const Formula& f)
{
    auto [lo, hi] = offset_range(f);
    return hi - lo;
}

Rational evaluate(const LinearTerm& t, const Assignment& a)
{
    Rational sum = t.constant();
    for (const auto& [v, c] : t.coefficients()) {
        const Value* val = a.find(v);
        if (!val)
            throw UnboundVariable("no value for '" + to_string(v) + "'");
        const auto* q = std::get_if<Rational>(val);
        if (!q)
            throw SortError("boolean value given for numeric variable '" + to_string(v) + "'");
        sum += c * *q;
    }
    return sum;
}

bool evaluate(const Formula& f, const Assignment& a)
{
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::Atom:
        return std::visit(
            [&](const auto& at) -> bool {
                using T = std::decay_t<decltype(at)>;
                if constexpr (std::is_same_v<T, TrueAtom>) {
                    return true;
                } else if constexpr (std::is_same_v<T, FalseAtom>) {
                    return false;
                } else if constexpr (std::is_same_v<T, Compare>) {
                    return holds(at.rel, sgn(evaluate(at.term, a)));
                } else if constexpr (std::is_same_v<T, Divides>) {
                    Rational q = evaluate(at.term, a);
                    if (!is_integral(q))
                        return false;
                    return mpz_divisible_p(q.get_num_mpz_t(), at.modulus.get_mpz_t()) != 0;
                } else {
                    const Value* val = a.find(at.var);
                    if (!val)
                        throw UnboundVariable("no value for '" + to_string(at.var) + "'");
                    const auto* b = std::get_if<bool>(val);
                    if (!b)
                        throw SortError("numeric value given for boolean '" + to_string(at.var) + "'");
                    return *b;
                }
            },
            f.atom());
    case K::Not:
        return !evaluate(f.child(0), a);
    case K::And:
        for (const auto& c : f.children())
            if (!evaluate(c, a))
                return false;
        return true;
    case K::Or:
        for (const auto& c : f.children())
            if (evaluate(c, a))
                return true;
        return false;
    case K::Implies:
        return !evaluate(f.child(0), a) || evaluate(f.child(1), a);
    case K::Iff:
        return evaluate(f.child(0), a) == evaluate(f.child(1), a);
    default:
        throw Error("evaluate requires a quantifier-free formula");
    }
}

std::set<TimedVar> free_vars(const Formula& f)
{
    std::set<TimedVar> bound, out;
    collect_free(f, bound, out);
    return out;
}

std::vector<Formula> conjuncts(const Formula& f)
{
    if (f.kind() == Formula::Kind::And)
        return {f.children().begin(), f.children().end()};
    if (f.is_true())
        return {};
    return {f};
}

std::vector<Formula> disjuncts(const Formula& f)
{
    if (f.kind() == Formula::Kind::Or)
        return {f.children().begin(), f.children().end()};
    if (f.is_false())
        return {};
    return {f};
}

Formula exists_closure(const std::vector<TimedVar>& vars, Formula body)
{
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        body = Formula::exists(*it, std::move(body));
    return body;
}

Formula forall_closure(const std::vector<TimedVar>& vars, Formula body)
{
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        body = Formula::forall(*it, std::move(body));
    return body;
}

// --------------------------------------------------------------- rendering

namespace
{

std::string render_vars(const LinearTerm& t)
{
    std::ostringstream out;
    bool first = true;
    for (const auto& [v, c] : t.coefficients()) {
        Rational mag = abs(c);
        if (first)
            out << (c < 0 ? "-" : "");
        else
            out << (c < 0 ? " - " : " + ");
        if (mag != 1)
            out << to_string(mag) << "*";
        out << to_string(v);
        first = false;
    }
    return out.str();
}

std::string render(const Formula& f, bool nested);

std::string wrap(const Formula& f)
{
    if (f.is_atom())
        return render(f, true);
    return "(" + render(f, true) + ")";
}

std::string render(const Formula& f, bool nested)
{
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::Atom:
        return std::visit(
            [&](const auto& a) -> std::string {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, TrueAtom>)
                    return "true";
                else if constexpr (std::is_same_v<T, FalseAtom>)
                    return "false";
                else if constexpr (std::is_same_v<T, Compare>)
                    return render_vars(a.term) + " " + symbol(a.rel) + " " + to_string(Rational(-a.term.constant()));
                else if constexpr (std::is_same_v<T, Divides>)
                    return "divides(" + to_string(a.modulus) + ", " + to_string(a.term) + ")";
                else
                    return to_string(a.var);
            },
            f.atom());
    case K::Not:
        if (f.child(0).is_atom() && std::holds_alternative<BoolAtom>(f.child(0).atom()))
            return "not " + render(f.child(0), true);
        return "not (" + render(f.child(0), true) + ")";
    case K::And:
    case K::Or: {
        std::string sep = f.kind() == K::And ? " and " : " or ";
        std::string out;
        for (const auto& c : f.children()) {
            if (!out.empty())
                out += sep;
            out += wrap(c);
        }
        return out;
    }
    case K::Implies:
        return wrap(f.child(0)) + " => " + wrap(f.child(1));
    case K::Iff:
        return wrap(f.child(0)) + " <=> " + wrap(f.child(1));
    case K::Exists:
    case K::Forall:
        return std::string(f.kind() == K::Exists ? "exists " : "forall ") + to_string(f.bound()) + ": " +
               to_string(f.bound().sort) + " . (" + render(f.body(), true) + ")";
    }
    (void)nested;
    return "?";
}

} // namespace

std::string to_string(const LinearTerm& t)
{
    if (t.is_constant())
        return to_string(t.constant());
    std::string s = render_vars(t);
    if (t.constant() > 0)
        s += " + " + to_string(t.constant());
    else if (t.constant() < 0)
        s += " - " + to_string(Rational(-t.constant()));
    return s;
}

std::string to_string(const Formula& f)
{
    return render(f, false);
}

} // namespace relic
