#include "relic/model.hpp"

#include <algorithm>
#include <map>

namespace relic
{

std::string to_string(Direction d)
{
    switch (d) {
    case Direction::In:
        return "in";
    case Direction::Out:
        return "out";
    case Direction::Local:
        return "local";
    }
    return "?";
}

std::string to_string(Domain d)
{
    return d == Domain::Int ? "int" : "real";
}

const Component* SystemModel::find_component(const std::string& n) const
{
    for (const auto& c : components)
        if (c.name == n)
            return &c;
    return nullptr;
}

const Port* SystemModel::find_port(const PortRef& ref) const
{
    const Component* c = find_component(ref.component);
    if (!c)
        return nullptr;
    for (const auto& p : c->ports)
        if (p.name == ref.port)
            return &p;
    return nullptr;
}

std::string SystemModel::variable_name(const PortRef& ref) const
{
    for (const auto& e : externals)
        if (e.port == ref)
            return e.alias;
    return ref.component + "." + ref.port;
}

std::set<std::string> SystemModel::interface_names() const
{
    std::set<std::string> out;
    for (const auto& e : externals)
        out.insert(e.alias);
    for (const auto& p : parameters)
        out.insert(p.name);
    return out;
}

Formula SystemModel::connection_formula(const Connection& c) const
{
    const Port* from = find_port(c.from);
    const Port* to = find_port(c.to);
    if (!from || !to)
        throw Error("connection refers to an unknown port");
    TimedVar a(variable_name(c.from), TimeIndex::relative(0), from->sort);
    TimedVar b(variable_name(c.to), TimeIndex::relative(0), to->sort);
    if (a.sort == Sort::Bool)
        return Formula::iff(Formula::boolean(a), Formula::boolean(b));
    return Formula::compare(LinearTerm::variable(a), Rel::Eq, LinearTerm::variable(b));
}

void add_property(SystemModel& s, const std::string& owner, const Formula& body, std::int64_t min_order)
{
    auto [lo, hi] = offset_range(body);
    Formula canonical = shift(body, -hi);
    s.properties.push_back({owner, canonical, std::max(hi - lo, min_order)});
}

std::vector<Diagnostic> validate(const SystemModel& s)
{
    std::vector<Diagnostic> out;
    auto report = [&](std::string rule, std::string msg) { out.push_back({std::move(rule), std::move(msg)}); };

    std::set<std::string> names;
    std::set<std::string> known; // every variable name a formula may use
    for (const auto& c : s.components) {
        if (!names.insert(c.name).second)
            report("DUPLICATE_COMPONENT", "component '" + c.name + "' declared twice");
        std::set<std::string> ports;
        for (const auto& p : c.ports) {
            if (!ports.insert(p.name).second)
                report("DUPLICATE_PORT", "port '" + p.qualified() + "' declared twice");
            known.insert(s.variable_name({c.name, p.name}));
        }
    }
    for (const auto& p : s.parameters)
        known.insert(p.name);

    std::map<std::string, int> drivers;
    for (const auto& c : s.connections) {
        std::string label = c.from.component + "." + c.from.port + " -> " + c.to.component + "." + c.to.port;
        const Port* from = s.find_port(c.from);
        const Port* to = s.find_port(c.to);
        if (!from || !to) {
            report("UNKNOWN_PORT", "connection " + label + " refers to an undeclared port");
            continue;
        }
        if (from->direction != Direction::Out)
            report("DIRECTION", "connection " + label + " starts at a non-output port");
        if (to->direction != Direction::In)
            report("DIRECTION", "connection " + label + " ends at a non-input port");
        if (from->sort != to->sort)
            report("SORT_MISMATCH", "connection " + label + " joins " + to_string(from->sort) + " to " +
                                        to_string(to->sort));
        if (++drivers[to->qualified()] == 2)
            report("MULTI_DRIVER", "input port '" + to->qualified() + "' has more than one driver");
    }

    std::set<std::string> aliases;
    for (const auto& p : s.parameters)
        aliases.insert(p.name);
    for (const auto& e : s.externals) {
        const Port* p = s.find_port(e.port);
        if (!p) {
            report("UNKNOWN_PORT", "external '" + e.port.component + "." + e.port.port + "' is not declared");
            continue;
        }
        if (p->direction == Direction::Local)
            report("DIRECTION", "local variable '" + p->qualified() + "' cannot be external");
        if (!aliases.insert(e.alias).second)
            report("DUPLICATE_ALIAS", "interface name '" + e.alias + "' is used twice");
    }

    auto check_vars = [&](const Formula& f, const std::set<std::string>& allowed, const std::string& what) {
        for (const auto& v : free_vars(f))
            if (!allowed.count(v.name))
                report("UNRESOLVED_VARIABLE", what + " mentions unknown variable '" + v.name + "'");
        try {
            check_sorts(f);
        } catch (const SortError& e) {
            report("SORT_MISMATCH", what + ": " + e.what());
        }
    };

    std::int64_t bound = system_order_bound(s);
    for (const auto& p : s.properties) {
        std::string what = "property of '" + p.owner + "'";
        auto fv = free_vars(p.body);
        bool quantified = false;
        std::function<void(const Formula&)> walk = [&](const Formula& f) {
            if (f.is_quantifier())
                quantified = true;
            if (!f.is_atom())
                for (const auto& c : f.children())
                    walk(c);
        };
        walk(p.body);
        if (quantified)
            report("QUANTIFIED_PROPERTY", what + " contains a quantifier");
        if (has_absolute(p.body))
            report("ABSOLUTE_INDEX", what + " uses an absolute step index");
        check_vars(p.body, known, what);
    }
    for (const auto& i : s.initials) {
        std::string what = "initial condition of '" + i.owner + "'";
        for (const auto& v : free_vars(i.body)) {
            if (v.index.is_relative())
                report("INIT_STEP_RANGE", what + " uses relative index on '" + to_string(v) + "'");
            else if (v.index.is_absolute() && v.index.value >= std::max<std::int64_t>(bound, 1))
                report("INIT_STEP_RANGE", what + " pins step " + std::to_string(v.index.value) +
                                              " beyond the order bound " + std::to_string(bound));
        }
        check_vars(i.body, known, what);
    }
    std::set<std::string> iface = s.interface_names();
    for (const auto& a : s.assumptions)
        check_vars(a, iface, "assumption");
    return out;
}

std::int64_t system_order_bound(const SystemModel& s)
{
    std::int64_t sum = 0;
    for (const auto& p : s.properties)
        sum += p.order;
    return sum;
}

std::int64_t max_property_order(const SystemModel& s)
{
    std::int64_t m = 0;
    for (const auto& p : s.properties)
        m = std::max(m, p.order);
    return m;
}

std::vector<TimedVar> hidden_variables(const SystemModel& s, const Formula& f)
{
    std::set<std::string> iface = s.interface_names();
    std::vector<TimedVar> out;
    for (const auto& v : free_vars(f))
        if (!iface.count(v.name))
            out.push_back(v);
    return out;
}

} // namespace relic
