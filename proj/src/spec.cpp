#include "relic/spec.hpp"

#include <fstream>
#include <sstream>

namespace relic
{

namespace
{

bool same_exprs(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!equal(*a[i], *b[i]))
            return false;
    return true;
}

PortRef parse_ref(TokenStream& ts)
{
    const Token& t = ts.peek();
    std::string text = ts.expect_ident();
    auto dot = text.find('.');
    if (dot == std::string::npos)
        TokenStream::fail_at(t, "expected a port reference of the form Component.port");
    return {text.substr(0, dot), text.substr(dot + 1)};
}

Sort parse_sort_token(TokenStream& ts)
{
    const Token& t = ts.peek();
    auto s = t.kind == Token::Kind::Ident ? parse_sort(t.text) : std::nullopt;
    if (!s)
        ts.fail("expected sort (real, int or bool)");
    ts.next();
    return *s;
}

SpecComponent parse_component(TokenStream& ts)
{
    SpecComponent c;
    c.pos = ts.peek().pos;
    c.name = ts.expect_ident();
    ts.expect("{");
    while (!ts.accept("}")) {
        const Token& kw = ts.peek();
        if (kw.is("in") || kw.is("out") || kw.is("local")) {
            ts.next();
            Direction d = kw.is("in") ? Direction::In : kw.is("out") ? Direction::Out : Direction::Local;
            std::vector<SpecPort> group;
            do {
                SpecPort p;
                p.pos = ts.peek().pos;
                p.direction = d;
                p.name = ts.expect_ident();
                group.push_back(std::move(p));
            } while (ts.accept(","));
            if (ts.accept(":")) {
                Sort s = parse_sort_token(ts);
                for (auto& p : group)
                    p.sort = s;
            }
            c.ports.insert(c.ports.end(), group.begin(), group.end());
        } else if (kw.is("guarantee") || kw.is("initially")) {
            ts.next();
            SpecClause cl;
            cl.kind = kw.is("guarantee") ? SpecClause::Kind::Guarantee : SpecClause::Kind::Initially;
            cl.expr = parse_expr(ts);
            c.clauses.push_back(std::move(cl));
        } else {
            ts.fail("expected in, out, local, guarantee or initially");
        }
        ts.expect(";");
    }
    return c;
}

std::string sort_suffix(const std::optional<Sort>& s)
{
    return s ? ": " + to_string(*s) : "";
}

std::string ref_text(const PortRef& r)
{
    return r.component + "." + r.port;
}

std::string diag_rule(const std::string& message)
{
    if (message.find("undeclared identifier") != std::string::npos)
        return "UNRESOLVED_VARIABLE";
    if (message.find("before step 0") != std::string::npos)
        return "INIT_STEP_RANGE";
    if (message.find("boolean") != std::string::npos || message.find("numeric") != std::string::npos)
        return "SORT_MISMATCH";
    return "EXPRESSION";
}

} // namespace

bool operator==(const SpecDocument& a, const SpecDocument& b)
{
    if (a.name != b.name || a.domain != b.domain || a.parameters.size() != b.parameters.size() ||
        a.components.size() != b.components.size() || a.connections.size() != b.connections.size() ||
        a.externals.size() != b.externals.size())
        return false;
    for (std::size_t i = 0; i < a.parameters.size(); ++i)
        if (a.parameters[i].name != b.parameters[i].name || a.parameters[i].sort != b.parameters[i].sort)
            return false;
    for (std::size_t i = 0; i < a.components.size(); ++i) {
        const auto& x = a.components[i];
        const auto& y = b.components[i];
        if (x.name != y.name || x.ports.size() != y.ports.size() || x.clauses.size() != y.clauses.size())
            return false;
        for (std::size_t j = 0; j < x.ports.size(); ++j)
            if (x.ports[j].name != y.ports[j].name || x.ports[j].direction != y.ports[j].direction ||
                x.ports[j].sort != y.ports[j].sort)
                return false;
        for (std::size_t j = 0; j < x.clauses.size(); ++j)
            if (x.clauses[j].kind != y.clauses[j].kind || !equal(*x.clauses[j].expr, *y.clauses[j].expr))
                return false;
    }
    for (std::size_t i = 0; i < a.connections.size(); ++i)
        if (!(a.connections[i].from == b.connections[i].from) || !(a.connections[i].to == b.connections[i].to))
            return false;
    for (std::size_t i = 0; i < a.externals.size(); ++i)
        if (!(a.externals[i].port == b.externals[i].port) || a.externals[i].alias != b.externals[i].alias)
            return false;
    return same_exprs(a.assumptions, b.assumptions) && same_exprs(a.postulates, b.postulates);
}

SpecDocument parse_spec(std::string_view text)
{
    TokenStream ts(tokenize(text));
    SpecDocument doc;
    ts.expect("system");
    doc.name = ts.expect_ident();
    ts.expect("domain");
    if (ts.accept("real"))
        doc.domain = Domain::Real;
    else if (ts.accept("int"))
        doc.domain = Domain::Int;
    else
        ts.fail("expected real or int");
    Sort numeric = doc.domain == Domain::Int ? Sort::Int : Sort::Real;
    ts.expect("{");
    while (!ts.accept("}")) {
        const Token& kw = ts.peek();
        if (kw.is("component")) {
            ts.next();
            doc.components.push_back(parse_component(ts));
            continue;
        }
        if (kw.is("param")) {
            ts.next();
            Parameter p;
            p.name = ts.expect_ident();
            p.sort = ts.accept(":") ? parse_sort_token(ts) : numeric;
            doc.parameters.push_back(std::move(p));
        } else if (kw.is("connect")) {
            ts.next();
            SpecConnection c;
            c.pos = kw.pos;
            c.from = parse_ref(ts);
            ts.expect("->");
            c.to = parse_ref(ts);
            doc.connections.push_back(std::move(c));
        } else if (kw.is("external")) {
            ts.next();
            do {
                SpecExternal e;
                e.pos = ts.peek().pos;
                e.port = parse_ref(ts);
                if (ts.accept("as"))
                    e.alias = ts.expect_ident();
                doc.externals.push_back(std::move(e));
            } while (ts.accept(","));
        } else if (kw.is("assume")) {
            ts.next();
            doc.assumptions.push_back(parse_expr(ts));
        } else if (kw.is("postulate")) {
            ts.next();
            doc.postulates.push_back(parse_expr(ts));
        } else {
            ts.fail("expected component, param, connect, external, assume or postulate");
        }
        ts.expect(";");
    }
    if (!ts.at_end())
        ts.fail("unexpected input after the system block");
    return doc;
}

std::string print_spec(const SpecDocument& doc)
{
    std::ostringstream out;
    out << "system " << doc.name << " domain " << to_string(doc.domain) << " {\n";
    for (const auto& p : doc.parameters)
        out << "  param " << p.name << ": " << to_string(p.sort) << ";\n";
    for (const auto& c : doc.components) {
        out << "  component " << c.name << " {\n";
        for (const auto& p : c.ports)
            out << "    " << to_string(p.direction) << " " << p.name << sort_suffix(p.sort) << ";\n";
        for (const auto& cl : c.clauses)
            out << "    " << (cl.kind == SpecClause::Kind::Guarantee ? "guarantee " : "initially ")
                << to_string(*cl.expr) << ";\n";
        out << "  }\n";
    }
    for (const auto& c : doc.connections)
        out << "  connect " << ref_text(c.from) << " -> " << ref_text(c.to) << ";\n";
    for (const auto& e : doc.externals)
        out << "  external " << ref_text(e.port) << (e.alias.empty() ? "" : " as " + e.alias) << ";\n";
    for (const auto& a : doc.assumptions)
        out << "  assume " << to_string(*a) << ";\n";
    for (const auto& p : doc.postulates)
        out << "  postulate " << to_string(*p) << ";\n";
    out << "}\n";
    return out.str();
}

BuiltSpec build_model(const SpecDocument& doc)
{
    BuiltSpec r;
    SystemModel& m = r.model;
    m.name = doc.name;
    m.domain = doc.domain;
    m.parameters = doc.parameters;
    Sort numeric = doc.domain == Domain::Int ? Sort::Int : Sort::Real;
    for (const auto& sc : doc.components) {
        Component c;
        c.name = sc.name;
        for (const auto& sp : sc.ports)
            c.ports.push_back({sc.name, sp.name, sp.direction, sp.sort.value_or(numeric)});
        m.components.push_back(std::move(c));
    }
    for (const auto& c : doc.connections)
        m.connections.push_back({c.from, c.to});
    for (const auto& e : doc.externals)
        m.externals.push_back({e.port, e.alias.empty() ? ref_text(e.port) : e.alias});

    auto param = [&](const std::string& n) -> std::optional<VarInfo> {
        for (const auto& p : m.parameters)
            if (p.name == n)
                return VarInfo{p.name, p.sort, true};
        return std::nullopt;
    };
    auto report = [&](const std::string& rule, const std::string& msg) { r.diagnostics.push_back({rule, msg}); };
    auto guarded = [&](const std::string& what, auto&& body) {
        try {
            body();
        } catch (const ParseError& e) {
            report(diag_rule(e.what()), what + ": " + e.what());
        } catch (const UnsupportedTheory& e) {
            report("UNSUPPORTED", what + ": " + e.what());
        } catch (const SortError& e) {
            report("SORT_MISMATCH", what + ": " + e.what());
        }
    };

    for (const auto& sc : doc.components) {
        const Component* comp = m.find_component(sc.name);
        Resolver local = [&, comp](const std::string& n) -> std::optional<VarInfo> {
            std::string port = n;
            if (n.rfind(comp->name + ".", 0) == 0)
                port = n.substr(comp->name.size() + 1);
            for (const auto& p : comp->ports)
                if (p.name == port)
                    return VarInfo{m.variable_name({comp->name, p.name}), p.sort, false};
            return param(n);
        };
        for (const auto& cl : sc.clauses) {
            std::string what = (cl.kind == SpecClause::Kind::Guarantee ? "guarantee of '" : "initial condition of '") +
                               sc.name + "'";
            guarded(what, [&] {
                if (cl.kind == SpecClause::Kind::Initially) {
                    m.initials.push_back({sc.name, to_formula(*cl.expr, local, ConvertMode{0})});
                    return;
                }
                if (has_prev(*cl.expr)) {
                    Desugared d = desugar_prev(*cl.expr, local);
                    add_property(m, sc.name, d.property, d.depth);
                    for (auto& i : d.initials)
                        m.initials.push_back({sc.name, i});
                    return;
                }
                Formula f = to_formula(*cl.expr, local);
                if (has_absolute(f)) {
                    report("ABSOLUTE_INDEX", what + " uses an absolute step index");
                    return;
                }
                add_property(m, sc.name, f);
            });
        }
    }

    Resolver outer = [&](const std::string& n) -> std::optional<VarInfo> {
        for (const auto& e : m.externals) {
            if (e.alias != n && ref_text(e.port) != n)
                continue;
            const Port* p = m.find_port(e.port);
            if (p)
                return VarInfo{e.alias, p->sort, false};
        }
        return param(n);
    };
    for (const auto& a : doc.assumptions)
        guarded("assumption", [&] { m.assumptions.push_back(to_formula(*a, outer)); });
    for (const auto& p : doc.postulates)
        guarded("postulate", [&] { r.postulates.push_back(to_formula(*p, outer)); });

    auto more = validate(m);
    r.diagnostics.insert(r.diagnostics.end(), more.begin(), more.end());
    return r;
}

SpecDocument load_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

} // namespace relic
