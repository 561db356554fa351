#include "relic/rangeprop.hpp"

#include "relic/expr.hpp"

#include <json.hpp>

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace relic
{

using nlohmann::json;

std::string to_string(Block::Kind k)
{
    switch (k) {
    case Block::Kind::Input:
        return "Input";
    case Block::Kind::Output:
        return "Output";
    case Block::Kind::Gain:
        return "Gain";
    case Block::Kind::Sum:
        return "Sum";
    case Block::Kind::Compare:
        return "Compare";
    case Block::Kind::Switch:
        return "Switch";
    case Block::Kind::UnitDelay:
        return "UnitDelay";
    case Block::Kind::Relu:
        return "Relu";
    case Block::Kind::Constant:
        return "Constant";
    }
    return "?";
}

std::vector<std::string> Block::inputs() const
{
    switch (kind) {
    case Kind::Input:
    case Kind::Constant:
        return {};
    case Kind::Sum: {
        std::vector<std::string> pins;
        for (std::size_t i = 1; i <= signs.size(); ++i)
            pins.push_back("in" + std::to_string(i));
        return pins;
    }
    case Kind::Compare:
        if (rhs)
            return {"in"};
        return {"in1", "in2"};
    case Kind::Switch:
        return {"then", "else", "cond"};
    default:
        return {"in"};
    }
}

std::vector<std::string> Block::outputs() const
{
    if (kind == Kind::Output)
        return {};
    return {"out"};
}

Sort Block::pin_sort(const std::string& pin) const
{
    if ((kind == Kind::Compare && pin == "out") || (kind == Kind::Switch && pin == "cond"))
        return Sort::Bool;
    return Sort::Real;
}

const Block* BlockGraph::find(const std::string& name) const
{
    for (const auto& b : blocks)
        if (b.name == name)
            return &b;
    return nullptr;
}

namespace
{

std::string pin_name(const Block& b, const std::string& pin)
{
    if (b.kind == Block::Kind::Input || b.kind == Block::Kind::Output)
        return b.name;
    return b.name + "." + pin;
}

TimedVar pin_var(const Block& b, const std::string& pin, std::int64_t offset = 0)
{
    return TimedVar(pin_name(b, pin), TimeIndex::relative(offset), b.pin_sort(pin));
}

LinearTerm pin_term(const Block& b, const std::string& pin, std::int64_t offset = 0)
{
    return LinearTerm::variable(pin_var(b, pin, offset));
}

// ------------------------------------------------------------ JSON reading

Rational eval_number(const Expr& e, const std::map<std::string, Rational>& params)
{
    auto arg = [&](std::size_t i) { return eval_number(*e.args[i], params); };
    switch (e.kind) {
    case Expr::Kind::Number:
        return e.number;
    case Expr::Kind::Var: {
        auto it = params.find(e.name);
        if (it == params.end() || e.index)
            throw ParseError("unknown parameter '" + e.name + "'", e.pos.line, e.pos.column);
        return it->second;
    }
    case Expr::Kind::Neg:
        return -arg(0);
    case Expr::Kind::Add:
        return arg(0) + arg(1);
    case Expr::Kind::Sub:
        return arg(0) - arg(1);
    case Expr::Kind::Mul:
        return arg(0) * arg(1);
    case Expr::Kind::Div: {
        Rational d = arg(1);
        if (d == 0)
            throw ParseError("division by zero", e.pos.line, e.pos.column);
        return arg(0) / d;
    }
    default:
        throw ParseError("expected a numeric constant expression", e.pos.line, e.pos.column);
    }
}

Rational number(const json& j, const std::map<std::string, Rational>& params, const std::string& what)
{
    if (j.is_number_integer() || j.is_number_unsigned() || j.is_number_float())
        return parse_rational(j.dump());
    if (j.is_string())
        return eval_number(*parse_expr(j.get<std::string>()), params);
    throw Error(what + ": expected a number or a constant expression");
}

Interval range_of(const json& j, const std::map<std::string, Rational>& params, const std::string& what)
{
    if (!j.is_array() || j.size() != 2)
        throw Error(what + ": a range is a two-element array [lo, hi]");
    Rational lo = number(j[0], params, what), hi = number(j[1], params, what);
    if (lo > hi)
        throw Error(what + ": empty range");
    return Interval::closed(lo, hi);
}

Rel rel_of(const std::string& op, const std::string& what)
{
    static const std::map<std::string, Rel> ops{{"<", Rel::Lt}, {"<=", Rel::Le}, {">", Rel::Gt},  {">=", Rel::Ge},
                                                 {"=", Rel::Eq}, {"==", Rel::Eq}, {"!=", Rel::Ne}};
    auto it = ops.find(op);
    if (it == ops.end())
        throw Error(what + ": unknown comparison '" + op + "'");
    return it->second;
}

PortRef pin_ref(const std::string& text)
{
    auto dot = text.find('.');
    if (dot == std::string::npos)
        throw Error("wire end '" + text + "' is not of the form block.pin");
    auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        return s;
    };
    return {trim(text.substr(0, dot)), trim(text.substr(dot + 1))};
}

BlockGraph graph_from_blocks(const json& doc)
{
    BlockGraph g;
    std::map<std::string, Rational> params;
    if (doc.contains("params"))
        for (const auto& [k, v] : doc["params"].items())
            params[k] = number(v, params, "parameter '" + k + "'");
    static const std::map<std::string, Block::Kind> kinds{
        {"Input", Block::Kind::Input},     {"Output", Block::Kind::Output}, {"Gain", Block::Kind::Gain},
        {"Sum", Block::Kind::Sum},         {"Compare", Block::Kind::Compare}, {"Switch", Block::Kind::Switch},
        {"UnitDelay", Block::Kind::UnitDelay}, {"Relu", Block::Kind::Relu}, {"Constant", Block::Kind::Constant}};
    for (const auto& jb : doc.at("blocks")) {
        Block b;
        b.name = jb.at("name").get<std::string>();
        std::string what = "block '" + b.name + "'";
        if (b.name.find('.') != std::string::npos)
            throw Error(what + ": block names cannot contain '.'");
        auto kind = kinds.find(jb.at("type").get<std::string>());
        if (kind == kinds.end())
            throw Error(what + ": unknown block type '" + jb.at("type").get<std::string>() + "'");
        b.kind = kind->second;
        switch (b.kind) {
        case Block::Kind::Input:
            if (jb.contains("range"))
                b.range = range_of(jb["range"], params, what);
            break;
        case Block::Kind::Gain:
            b.factor = number(jb.at("factor"), params, what);
            break;
        case Block::Kind::Sum: {
            const json& s = jb.contains("signs") ? jb["signs"] : json("++");
            if (s.is_string()) {
                for (char c : s.get<std::string>()) {
                    if (c != '+' && c != '-')
                        throw Error(what + ": signs are '+' or '-'");
                    b.signs.push_back(c == '+' ? 1 : -1);
                }
            } else {
                for (const auto& x : s)
                    b.signs.push_back(x.get<int>() < 0 ? -1 : 1);
            }
            if (b.signs.empty())
                throw Error(what + ": a sum needs at least one input");
            break;
        }
        case Block::Kind::Compare:
            b.op = rel_of(jb.value("op", "<="), what);
            if (jb.contains("rhs"))
                b.rhs = number(jb["rhs"], params, what);
            break;
        case Block::Kind::UnitDelay:
            if (jb.contains("init"))
                b.init = number(jb["init"], params, what);
            break;
        case Block::Kind::Constant:
            b.value = number(jb.at("value"), params, what);
            break;
        default:
            break;
        }
        g.blocks.push_back(std::move(b));
    }
    for (const auto& w : doc.at("wires")) {
        std::string text = w.get<std::string>();
        auto arrow = text.find("->");
        if (arrow == std::string::npos)
            throw Error("wire '" + text + "' lacks '->'");
        g.wires.push_back({pin_ref(text.substr(0, arrow)), pin_ref(text.substr(arrow + 2))});
    }
    g.algebraic_ok = doc.value("algebraic_ok", false);
    return g;
}

BlockGraph graph_from_network(const json& doc)
{
    const std::size_t max_layers = 3, max_width = 8;
    BlockGraph g;
    std::map<std::string, Rational> none;
    std::vector<std::string> prev; // blocks whose "out" feeds the next layer
    for (const auto& in : doc.at("inputs")) {
        Block b;
        b.kind = Block::Kind::Input;
        b.name = in.at("name").get<std::string>();
        if (in.contains("range"))
            b.range = range_of(in["range"], none, "input '" + b.name + "'");
        prev.push_back(b.name);
        g.blocks.push_back(std::move(b));
    }
    const json& layers = doc.at("layers");
    if (layers.size() > max_layers)
        throw Error("networks are limited to " + std::to_string(max_layers) + " layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const json& layer = layers[l];
        const json& w = layer.at("weights");
        const json& bias = layer.at("bias");
        bool relu = layer.value("activation", "relu") == "relu";
        if (w.size() > max_width)
            throw Error("networks are limited to " + std::to_string(max_width) + " neurons per layer");
        if (bias.size() != w.size())
            throw Error("layer " + std::to_string(l) + ": bias and weight rows differ in length");
        std::vector<std::string> next;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (w[j].size() != prev.size())
                throw Error("layer " + std::to_string(l) + ": weight row " + std::to_string(j) + " has the wrong width");
            std::string base = "n" + std::to_string(l) + "_" + std::to_string(j);
            Block sum;
            sum.kind = Block::Kind::Sum;
            sum.name = base + "_sum";
            sum.signs.assign(prev.size() + 1, 1);
            for (std::size_t i = 0; i < prev.size(); ++i) {
                Block gain;
                gain.kind = Block::Kind::Gain;
                gain.name = base + "_w" + std::to_string(i);
                gain.factor = number(w[j][i], none, gain.name);
                g.wires.push_back({{prev[i], "out"}, {gain.name, "in"}});
                g.wires.push_back({{gain.name, "out"}, {sum.name, "in" + std::to_string(i + 1)}});
                g.blocks.push_back(std::move(gain));
            }
            Block c;
            c.kind = Block::Kind::Constant;
            c.name = base + "_b";
            c.value = number(bias[j], none, c.name);
            g.wires.push_back({{c.name, "out"}, {sum.name, "in" + std::to_string(prev.size() + 1)}});
            g.blocks.push_back(std::move(c));
            std::string last = sum.name;
            g.blocks.push_back(std::move(sum));
            if (relu) {
                Block r;
                r.kind = Block::Kind::Relu;
                r.name = base + "_relu";
                g.wires.push_back({{last, "out"}, {r.name, "in"}});
                last = r.name;
                g.blocks.push_back(std::move(r));
            }
            next.push_back(last);
        }
        prev = std::move(next);
    }
    const json& outs = doc.at("outputs");
    if (outs.size() != prev.size())
        throw Error("network has " + std::to_string(prev.size()) + " outputs but names " +
                    std::to_string(outs.size()));
    for (std::size_t j = 0; j < outs.size(); ++j) {
        Block o;
        o.kind = Block::Kind::Output;
        o.name = outs[j].get<std::string>();
        g.wires.push_back({{prev[j], "out"}, {o.name, "in"}});
        g.blocks.push_back(std::move(o));
    }
    return g;
}

// ------------------------------------------------------ interval arithmetic

Interval add(const Interval& a, const Interval& b)
{
    Interval r;
    if (a.lo && b.lo) {
        r.lo = *a.lo + *b.lo;
        r.lo_closed = a.lo_closed && b.lo_closed;
    }
    if (a.hi && b.hi) {
        r.hi = *a.hi + *b.hi;
        r.hi_closed = a.hi_closed && b.hi_closed;
    }
    return r;
}

Interval scale(const Interval& a, const Rational& c)
{
    if (c == 0)
        return Interval::point(0);
    Interval r;
    auto mul = [&](const std::optional<Rational>& x) -> std::optional<Rational> {
        return x ? std::optional<Rational>(*x * c) : std::nullopt;
    };
    if (c > 0)
        return {mul(a.lo), a.lo_closed, mul(a.hi), a.hi_closed};
    return {mul(a.hi), a.hi_closed, mul(a.lo), a.lo_closed};
}

Interval hull(const Interval& a, const Interval& b)
{
    Interval r;
    if (a.lo && b.lo) {
        r.lo = std::min(*a.lo, *b.lo);
        r.lo_closed = (*a.lo == *r.lo && a.lo_closed) || (*b.lo == *r.lo && b.lo_closed);
    }
    if (a.hi && b.hi) {
        r.hi = std::max(*a.hi, *b.hi);
        r.hi_closed = (*a.hi == *r.hi && a.hi_closed) || (*b.hi == *r.hi && b.hi_closed);
    }
    return r;
}

Interval relu(const Interval& a)
{
    Interval r;
    r.lo = Rational(0);
    r.lo_closed = true;
    if (a.lo && *a.lo > 0) {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed;
    }
    if (a.hi) {
        r.hi = std::max(*a.hi, Rational(0));
        r.hi_closed = *a.hi < 0 || a.hi_closed;
    }
    return r;
}

} // namespace

BlockGraph parse_graph(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), 1, static_cast<int>(e.byte));
    }
    try {
        if (doc.contains("layers"))
            return graph_from_network(doc);
        return graph_from_blocks(doc);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed graph document: ") + e.what());
    }
}

BlockGraph load_graph(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

std::vector<Diagnostic> validate_graph(const BlockGraph& g)
{
    std::vector<Diagnostic> out;
    auto report = [&](std::string rule, std::string msg) { out.push_back({std::move(rule), std::move(msg)}); };
    std::set<std::string> names;
    for (const auto& b : g.blocks)
        if (!names.insert(b.name).second)
            report("DUPLICATE_BLOCK", "block '" + b.name + "' declared twice");

    auto has = [](const std::vector<std::string>& pins, const std::string& p) {
        return std::find(pins.begin(), pins.end(), p) != pins.end();
    };
    std::map<std::string, int> drivers;
    std::map<std::string, std::set<std::string>> edges;
    for (const auto& w : g.wires) {
        std::string label = w.from.component + "." + w.from.port + " -> " + w.to.component + "." + w.to.port;
        const Block* a = g.find(w.from.component);
        const Block* b = g.find(w.to.component);
        if (!a || !b) {
            report("UNKNOWN_BLOCK", "wire " + label + " names an undeclared block");
            continue;
        }
        if (!has(a->outputs(), w.from.port) || !has(b->inputs(), w.to.port)) {
            report("UNKNOWN_PIN", "wire " + label + " must run from an output pin to an input pin");
            continue;
        }
        if (a->pin_sort(w.from.port) != b->pin_sort(w.to.port))
            report("SORT_MISMATCH", "wire " + label + " joins " + to_string(a->pin_sort(w.from.port)) + " to " +
                                        to_string(b->pin_sort(w.to.port)));
        if (++drivers[w.to.component + "." + w.to.port] == 2)
            report("MULTI_DRIVER", "pin " + w.to.component + "." + w.to.port + " has more than one driver");
        if (b->kind != Block::Kind::UnitDelay)
            edges[a->name].insert(b->name);
    }
    for (const auto& b : g.blocks)
        for (const auto& p : b.inputs())
            if (!drivers.count(b.name + "." + p))
                report("UNDRIVEN_PIN", "pin " + b.name + "." + p + " has no driver");

    if (!g.algebraic_ok) {
        std::map<std::string, int> state; // 1 on stack, 2 done
        std::function<bool(const std::string&)> cyclic = [&](const std::string& n) {
            state[n] = 1;
            for (const auto& m : edges[n]) {
                if (state[m] == 1 || (state[m] == 0 && cyclic(m)))
                    return true;
            }
            state[n] = 2;
            return false;
        };
        for (const auto& b : g.blocks)
            if (state[b.name] == 0 && cyclic(b.name)) {
                report("ALGEBRAIC_LOOP", "feedback through '" + b.name + "' is not broken by a unit delay");
                break;
            }
    }
    return out;
}

Formula block_relation(const BlockGraph&, const Block& b)
{
    using K = Block::Kind;
    switch (b.kind) {
    case K::Input:
    case K::Output:
        return Formula::top();
    case K::Gain:
        return Formula::compare(pin_term(b, "out"), Rel::Eq, pin_term(b, "in") * b.factor);
    case K::Sum: {
        LinearTerm s;
        for (std::size_t i = 0; i < b.signs.size(); ++i)
            s = s + pin_term(b, "in" + std::to_string(i + 1)) * Rational(b.signs[i]);
        return Formula::compare(pin_term(b, "out"), Rel::Eq, s);
    }
    case K::Compare: {
        Formula test = b.rhs ? Formula::compare(pin_term(b, "in"), b.op, LinearTerm(*b.rhs))
                             : Formula::compare(pin_term(b, "in1"), b.op, pin_term(b, "in2"));
        return Formula::iff(Formula::boolean(pin_var(b, "out")), test);
    }
    case K::Switch: {
        Formula c = Formula::boolean(pin_var(b, "cond"));
        return Formula::conjunction(
            {Formula::implies(c, Formula::compare(pin_term(b, "out"), Rel::Eq, pin_term(b, "then"))),
             Formula::implies(Formula::negation(c), Formula::compare(pin_term(b, "out"), Rel::Eq, pin_term(b, "else")))});
    }
    case K::UnitDelay:
        return Formula::compare(pin_term(b, "out"), Rel::Eq, pin_term(b, "in", -1));
    case K::Relu: {
        LinearTerm in = pin_term(b, "in"), out = pin_term(b, "out");
        return Formula::conjunction(
            {Formula::implies(Formula::compare(in, Rel::Ge), Formula::compare(out, Rel::Eq, in)),
             Formula::implies(Formula::compare(in, Rel::Lt), Formula::compare(out, Rel::Eq))});
    }
    case K::Constant:
        return Formula::compare(pin_term(b, "out"), Rel::Eq, LinearTerm(b.value));
    }
    return Formula::top();
}

Formula block_initial(const BlockGraph&, const Block& b)
{
    if (b.kind != Block::Kind::UnitDelay)
        return Formula::top();
    TimedVar out(pin_name(b, "out"), TimeIndex::absolute(0));
    return Formula::compare(LinearTerm::variable(out), Rel::Eq, LinearTerm(b.init));
}

SystemModel to_model(const BlockGraph& g)
{
    SystemModel s;
    s.name = "graph";
    for (const auto& b : g.blocks) {
        Component c;
        c.name = b.name;
        for (const auto& p : b.inputs())
            c.ports.push_back({b.name, p, Direction::In, b.pin_sort(p)});
        for (const auto& p : b.outputs())
            c.ports.push_back({b.name, p, Direction::Out, b.pin_sort(p)});
        s.components.push_back(std::move(c));
        if (b.kind == Block::Kind::Input)
            s.externals.push_back({{b.name, "out"}, b.name});
        if (b.kind == Block::Kind::Output)
            s.externals.push_back({{b.name, "in"}, b.name});
    }
    for (const auto& b : g.blocks) {
        Formula r = block_relation(g, b);
        if (!r.is_true())
            add_property(s, b.name, r);
        Formula i = block_initial(g, b);
        if (!i.is_true())
            s.initials.push_back({b.name, i});
    }
    for (const auto& w : g.wires)
        s.connections.push_back({w.from, w.to});
    return s;
}

CompositionResult io_relation(const BlockGraph& g, const QeOptions& opt)
{
    auto diags = validate_graph(g);
    if (!diags.empty())
        throw Error(diags.front().rule + ": " + diags.front().message);
    SystemModel s = to_model(g);
    if (max_property_order(s) > 0)
        return strongest_property_timed(s, opt);
    CompositionResult r;
    r.ssp = strongest_property_static(s, opt);
    r.unpruned = r.ssp;
    r.init = Formula::top();
    return r;
}

IntervalSet univariate_set(const Formula& f, const TimedVar& v)
{
    Formula g = normalize_nnf(f);
    std::function<IntervalSet(const Formula&)> rec = [&](const Formula& h) -> IntervalSet {
        switch (h.kind()) {
        case Formula::Kind::And: {
            IntervalSet s = IntervalSet::full();
            for (const auto& c : h.children())
                s = s.intersect(rec(c));
            return s;
        }
        case Formula::Kind::Or: {
            IntervalSet s;
            for (const auto& c : h.children())
                s = s.unite(rec(c));
            return s;
        }
        case Formula::Kind::Not:
            return rec(h.child(0)).complement();
        case Formula::Kind::Atom:
            break;
        default:
            throw Error("expected a quantifier-free formula");
        }
        if (h.is_true())
            return IntervalSet::full();
        if (h.is_false())
            return IntervalSet();
        const auto* c = std::get_if<Compare>(&h.atom());
        if (!c)
            throw Error("range formula has a non-arithmetic atom: " + to_string(h));
        for (const auto& [x, a] : c->term.coefficients())
            if (!(x == v))
                throw Error("range formula mentions '" + to_string(x) + "'");
        Rational a = c->term.coefficient(v);
        return IntervalSet::from_rel(a > 0 ? c->rel : mirror(c->rel), -c->term.constant() / a);
    };
    return rec(g);
}

RangeResult output_range(const BlockGraph& g, const std::string& target, const QeOptions& opt)
{
    const Block* out = g.find(target);
    if (!out || out->kind != Block::Kind::Output)
        throw Error("'" + target + "' is not an Output block");
    for (const auto& b : g.blocks)
        if (b.kind == Block::Kind::UnitDelay)
            throw UnsupportedTheory("output ranges need a delay-free graph; '" + b.name + "' is a unit delay");
    std::vector<Formula> parts{io_relation(g, opt).ssp};
    for (const auto& b : g.blocks) {
        if (b.kind != Block::Kind::Input)
            continue;
        if (!b.range)
            throw Error("input '" + b.name + "' has no range");
        parts.push_back(IntervalSet::of(*b.range).to_formula(pin_term(b, "out")));
    }
    Formula all = Formula::conjunction(std::move(parts));
    TimedVar y = pin_var(*out, "in");
    std::vector<TimedVar> others;
    for (const auto& v : free_vars(all))
        if (!(v == y))
            others.push_back(v);
    RangeResult r;
    r.set = univariate_set(eliminate_exists(others, all, opt), y);
    r.formula = r.set.to_formula(LinearTerm::variable(y));
    return r;
}

Interval naive_interval_range(const BlockGraph& g, const std::string& target)
{
    std::map<std::string, Interval> memo;
    std::set<std::string> active;
    std::function<Interval(const Block&)> value = [&](const Block& b) -> Interval {
        if (auto it = memo.find(b.name); it != memo.end())
            return it->second;
        if (!active.insert(b.name).second || b.kind == Block::Kind::UnitDelay)
            return Interval{};
        auto in = [&](const std::string& pin) -> Interval {
            for (const auto& w : g.wires)
                if (w.to.component == b.name && w.to.port == pin)
                    if (const Block* src = g.find(w.from.component))
                        return value(*src);
            return Interval{};
        };
        Interval r;
        switch (b.kind) {
        case Block::Kind::Input:
            r = b.range ? *b.range : Interval{};
            break;
        case Block::Kind::Output:
        case Block::Kind::UnitDelay:
        case Block::Kind::Compare:
            r = b.kind == Block::Kind::Output ? in("in") : Interval{};
            break;
        case Block::Kind::Gain:
            r = scale(in("in"), b.factor);
            break;
        case Block::Kind::Sum:
            r = Interval::point(0);
            for (std::size_t i = 0; i < b.signs.size(); ++i)
                r = add(r, scale(in("in" + std::to_string(i + 1)), Rational(b.signs[i])));
            break;
        case Block::Kind::Switch:
            r = hull(in("then"), in("else"));
            break;
        case Block::Kind::Relu:
            r = relu(in("in"));
            break;
        case Block::Kind::Constant:
            r = Interval::point(b.value);
            break;
        }
        active.erase(b.name);
        memo[b.name] = r;
        return r;
    };
    const Block* out = g.find(target);
    if (!out)
        throw Error("no block named '" + target + "'");
    return value(*out);
}

} // namespace relic
