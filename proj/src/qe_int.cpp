#include "relic/qe.hpp"

#include <algorithm>

namespace relic
{

namespace
{

bool mentions(const Formula& f, const TimedVar& v)
{
    if (f.is_atom()) {
        if (const auto* c = std::get_if<Compare>(&f.atom()))
            return c->term.contains(v);
        if (const auto* d = std::get_if<Divides>(&f.atom()))
            return d->term.contains(v);
        return false;
    }
    for (const auto& c : f.children())
        if (mentions(c, v))
            return true;
    return false;
}

void require_integer_atom(const LinearTerm& t, const TimedVar& x)
{
    for (const auto& [v, c] : t.coefficients()) {
        if (v.sort != Sort::Int)
            throw UnsupportedTheory("integer elimination of '" + to_string(x) + "' meets non-integer variable '" +
                                    to_string(v) + "'");
        if (!is_integral(c))
            throw UnsupportedTheory("non-integral coefficient in integer atom");
    }
    if (!is_integral(t.constant()))
        throw UnsupportedTheory("non-integral constant in integer atom");
}

// Formula tree after Cooper normalization: every x-atom has coefficient ±1 on x'.
struct CNode
{
    enum class Kind : std::uint8_t
    {
        Le,     // sign·x + rest ≤ 0
        Div,    // m | sign·x + rest
        NotDiv, // ¬(m | sign·x + rest)
        Other,  // x-free formula
        And,
        Or
    };
    Kind kind = Kind::Other;
    int sign = 1;
    Integer coeff = 1; // original coefficient magnitude before scaling to λ
    Integer modulus = 1;
    LinearTerm rest;
    Formula other;
    std::vector<CNode> kids;
};

CNode le_node(const Rational& a, LinearTerm rest)
{
    CNode n;
    n.kind = CNode::Kind::Le;
    n.sign = a > 0 ? 1 : -1;
    n.coeff = abs(a.get_num());
    n.rest = std::move(rest);
    return n;
}

CNode build(const Formula& f, const TimedVar& x)
{
    using K = Formula::Kind;
    if (f.kind() == K::And || f.kind() == K::Or) {
        CNode n;
        n.kind = f.kind() == K::And ? CNode::Kind::And : CNode::Kind::Or;
        for (const auto& c : f.children())
            n.kids.push_back(build(c, x));
        return n;
    }
    if (!mentions(f, x)) {
        CNode n;
        n.other = f;
        return n;
    }
    bool negated = f.kind() == K::Not;
    const Formula& atom = negated ? f.child(0) : f;
    if (const auto* d = std::get_if<Divides>(&atom.atom())) {
        require_integer_atom(d->term, x);
        CNode n;
        n.kind = negated ? CNode::Kind::NotDiv : CNode::Kind::Div;
        Rational a = d->term.coefficient(x);
        n.sign = a > 0 ? 1 : -1;
        n.coeff = abs(a.get_num());
        n.modulus = d->modulus;
        n.rest = d->term.without(x);
        return n;
    }
    const auto& c = std::get<Compare>(atom.atom());
    require_integer_atom(c.term, x);
    Rational a = c.term.coefficient(x);
    LinearTerm r = c.term.without(x);
    LinearTerm one(Rational(1));
    switch (c.rel) {
    case Rel::Le:
        return le_node(a, r);
    case Rel::Lt:
        return le_node(a, r + one);
    case Rel::Ge:
        return le_node(-a, -r);
    case Rel::Gt:
        return le_node(-a, -r + one);
    case Rel::Eq: {
        CNode n;
        n.kind = CNode::Kind::And;
        n.kids = {le_node(a, r), le_node(-a, -r)};
        return n;
    }
    case Rel::Ne: {
        CNode n;
        n.kind = CNode::Kind::Or;
        n.kids = {le_node(a, r + one), le_node(-a, -r + one)};
        return n;
    }
    }
    return {};
}

void collect_lcm(const CNode& n, Integer& lambda)
{
    if (n.kind == CNode::Kind::Le || n.kind == CNode::Kind::Div || n.kind == CNode::Kind::NotDiv)
        lambda = lcm(lambda, n.coeff);
    for (const auto& k : n.kids)
        collect_lcm(k, lambda);
}

void scale(CNode& n, const Integer& lambda)
{
    if (n.kind == CNode::Kind::Le || n.kind == CNode::Kind::Div || n.kind == CNode::Kind::NotDiv) {
        Integer k = lambda / n.coeff;
        n.rest = n.rest * Rational(k);
        n.modulus *= k;
        n.coeff = 1;
    }
    for (auto& c : n.kids)
        scale(c, lambda);
}

void collect(const CNode& n, Integer& delta, std::vector<LinearTerm>& lower, std::vector<LinearTerm>& upper)
{
    switch (n.kind) {
    case CNode::Kind::Le:
        // -x + rest <= 0 : x > rest - 1 ;  x + rest <= 0 : x < -rest + 1
        if (n.sign < 0)
            lower.push_back(n.rest - LinearTerm(Rational(1)));
        else
            upper.push_back(-n.rest + LinearTerm(Rational(1)));
        break;
    case CNode::Kind::Div:
    case CNode::Kind::NotDiv:
        delta = lcm(delta, n.modulus);
        break;
    default:
        break;
    }
    for (const auto& k : n.kids)
        collect(k, delta, lower, upper);
}

// infinity: 0 exact, -1 x → -∞, +1 x → +∞
Formula instantiate(const CNode& n, const LinearTerm& x, int infinity)
{
    switch (n.kind) {
    case CNode::Kind::Le:
        if (infinity != 0)
            return Formula::constant((n.sign > 0) == (infinity < 0));
        return Formula::compare(x * Rational(n.sign) + n.rest, Rel::Le);
    case CNode::Kind::Div:
        return Formula::divides(n.modulus, x * Rational(n.sign) + n.rest);
    case CNode::Kind::NotDiv:
        return Formula::negation(Formula::divides(n.modulus, x * Rational(n.sign) + n.rest));
    case CNode::Kind::Other:
        return n.other;
    case CNode::Kind::And:
    case CNode::Kind::Or: {
        std::vector<Formula> parts;
        for (const auto& k : n.kids) {
            Formula p = instantiate(k, x, infinity);
            if (n.kind == CNode::Kind::And && p.is_false())
                return p;
            if (n.kind == CNode::Kind::Or && p.is_true())
                return p;
            parts.push_back(std::move(p));
        }
        return n.kind == CNode::Kind::And ? Formula::conjunction(std::move(parts))
                                          : Formula::disjunction(std::move(parts));
    }
    }
    return Formula::top();
}

struct TermLess
{
    bool operator()(const LinearTerm& a, const LinearTerm& b) const { return compare(a, b) < 0; }
};

Formula cooper(const TimedVar& x, const Formula& f, const QeOptions& opt)
{
    CNode root = build(f, x);
    Integer lambda = 1;
    collect_lcm(root, lambda);
    scale(root, lambda);
    if (lambda > 1) {
        CNode div;
        div.kind = CNode::Kind::Div;
        div.modulus = lambda;
        CNode both;
        both.kind = CNode::Kind::And;
        both.kids = {std::move(root), std::move(div)};
        root = std::move(both);
    }
    Integer delta = 1;
    std::vector<LinearTerm> lower, upper;
    collect(root, delta, lower, upper);
    std::set<LinearTerm, TermLess> lo(lower.begin(), lower.end()), hi(upper.begin(), upper.end());

    bool use_lower = lo.size() <= hi.size();
    const auto& bounds = use_lower ? lo : hi;
    Integer count = delta * Integer(bounds.size() + 1);
    if (count > Integer(static_cast<unsigned long>(opt.cooper_cap)))
        throw ResourceLimit("Cooper elimination of '" + to_string(x) + "' needs " + count.get_str() +
                            " candidates (cap " + std::to_string(opt.cooper_cap) + ")");

    std::vector<Formula> alts;
    unsigned long d = delta.get_ui();
    for (unsigned long j = 1; j <= d; ++j) {
        Rational jj(static_cast<long>(j));
        LinearTerm point(use_lower ? jj : Rational(-jj));
        Formula p = simplify(instantiate(root, point, use_lower ? -1 : 1));
        if (p.is_true())
            return p;
        alts.push_back(p);
        for (const auto& b : bounds) {
            LinearTerm t = use_lower ? b + LinearTerm(jj) : b - LinearTerm(jj);
            Formula q = simplify(instantiate(root, t, 0));
            if (q.is_true())
                return q;
            alts.push_back(q);
        }
    }
    return simplify(Formula::disjunction(std::move(alts)));
}

Formula eliminate_int(const TimedVar& x, const Formula& f, const QeOptions& opt);

Formula eliminate_int_conjunction(const TimedVar& x, const std::vector<Formula>& parts, const QeOptions& opt)
{
    std::vector<Formula> without, with;
    for (const auto& p : parts)
        (mentions(p, x) ? with : without).push_back(p);
    if (with.empty())
        return Formula::conjunction(std::move(without));

    // equality a·x + r = 0: ∃x ⇔ (|a| divides r) with x := -r/a substituted elsewhere
    for (std::size_t i = 0; i < with.size(); ++i) {
        if (!with[i].is_atom())
            continue;
        const auto* c = std::get_if<Compare>(&with[i].atom());
        if (!c || c->rel != Rel::Eq || !c->term.contains(x))
            continue;
        require_integer_atom(c->term, x);
        Rational a = c->term.coefficient(x);
        LinearTerm r = c->term.without(x);
        LinearTerm t = r * Rational(-1 / a);
        for (std::size_t j = 0; j < with.size(); ++j)
            if (j != i)
                without.push_back(substitute(with[j], x, t));
        if (abs(a) != 1)
            without.push_back(Formula::divides(abs(a.get_num()), r));
        return simplify(Formula::conjunction(std::move(without)));
    }

    if (with.size() == 1 && with[0].kind() == Formula::Kind::Or) {
        without.push_back(eliminate_int(x, with[0], opt));
        return Formula::conjunction(std::move(without));
    }
    without.push_back(cooper(x, Formula::conjunction(std::move(with)), opt));
    return Formula::conjunction(std::move(without));
}

Formula eliminate_int(const TimedVar& x, const Formula& f, const QeOptions& opt)
{
    if (!mentions(f, x))
        return f;
    if (f.kind() == Formula::Kind::Or) {
        std::vector<Formula> alts;
        for (const auto& c : f.children()) {
            alts.push_back(eliminate_int(x, c, opt));
            if (alts.back().is_true())
                return alts.back();
        }
        return Formula::disjunction(std::move(alts));
    }
    if (f.kind() == Formula::Kind::And)
        return eliminate_int_conjunction(x, {f.children().begin(), f.children().end()}, opt);
    return eliminate_int_conjunction(x, {f}, opt);
}

// Integers worth testing for a formula in the single variable x: around every
// critical value, one full period of the divisibility pattern on each side.
std::vector<Integer> univariate_candidates(const Formula& g, const TimedVar& x, const QeOptions& opt)
{
    std::vector<Rational> critical;
    Integer delta = 1;
    std::function<void(const Formula&)> walk = [&](const Formula& f) {
        if (f.is_atom()) {
            if (const auto* c = std::get_if<Compare>(&f.atom())) {
                Rational a = c->term.coefficient(x);
                if (a != 0)
                    critical.push_back(Rational(-c->term.without(x).constant() / a));
            } else if (const auto* d = std::get_if<Divides>(&f.atom())) {
                delta = lcm(delta, d->modulus);
            }
            return;
        }
        for (const auto& c : f.children())
            walk(c);
    };
    walk(g);
    if (delta > Integer(static_cast<unsigned long>(opt.cooper_cap)))
        throw ResourceLimit("divisibility period too large for witness search");
    long period = delta.get_si();
    std::vector<Integer> out;
    if (critical.empty()) {
        for (long j = 0; j < period; ++j)
            out.emplace_back(j);
        return out;
    }
    for (const auto& c : critical) {
        Integer lo = floor(c), hi = ceil(c);
        for (long j = 0; j <= period; ++j) {
            out.push_back(lo - j);
            out.push_back(hi + j);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

Formula eliminate_exists_int(const TimedVar& x, const Formula& f, const QeOptions& opt)
{
    if (x.sort != Sort::Int)
        return eliminate_exists(x, f, opt);
    Formula g = simplify(f);
    if (!mentions(g, x))
        return g;
    return simplify(eliminate_int(x, g, opt));
}

bool decide_sentence_int(const Formula& f, const QeOptions& opt)
{
    if (!free_vars(f).empty())
        throw Error("decide_sentence_int needs a closed formula");
    Formula r = eliminate_all(f, opt);
    if (!r.is_true() && !r.is_false())
        throw Error("elimination left a residue: " + to_string(r));
    return r.is_true();
}

std::optional<Assignment> int_witness(const Formula& f, const std::vector<TimedVar>& vars, const QeOptions& opt)
{
    std::vector<TimedVar> order = vars;
    for (const auto& v : free_vars(f))
        if (std::find(order.begin(), order.end(), v) == order.end())
            order.push_back(v);
    for (const auto& v : order)
        if (v.sort != Sort::Int)
            throw SortError("int_witness over non-integer variable '" + to_string(v) + "'");

    Formula current = simplify(f);
    if (!eliminate_exists(order, current, opt).is_true())
        return std::nullopt;

    Assignment out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const TimedVar& x = order[i];
        std::vector<TimedVar> later(order.begin() + static_cast<long>(i) + 1, order.end());
        Formula g = eliminate_exists(later, current, opt);
        bool found = false;
        for (const auto& z : univariate_candidates(g, x, opt)) {
            Formula probe = simplify(substitute(g, x, LinearTerm(Rational(z))));
            if (probe.is_true()) {
                out.set(x, Rational(z));
                current = simplify(substitute(current, x, LinearTerm(Rational(z))));
                found = true;
                break;
            }
        }
        if (!found)
            throw Error("integer witness search failed for '" + to_string(x) + "'");
    }
    return out;
}

} // namespace relic
