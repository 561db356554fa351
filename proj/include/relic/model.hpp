#pragma once

#include "relic/expr.hpp"
#include "relic/formula.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace relic
{

enum class Direction : std::uint8_t
{
    In,
    Out,
    Local
};

enum class Domain : std::uint8_t
{
    Real,
    Int
};

std::string to_string(Direction d);
std::string to_string(Domain d);

struct Port
{
    std::string component;
    std::string name;
    Direction direction = Direction::In;
    Sort sort = Sort::Real;

    std::string qualified() const { return component + "." + name; }
};

struct Component
{
    std::string name;
    std::vector<Port> ports;
};

struct AtomicProperty
{
    std::string owner;
    /// Relative-indexed, newest offset 0.
    Formula body;
    std::int64_t order = 0;
};

struct AtomicInitialCondition
{
    std::string owner;
    /// Absolute-indexed.
    Formula body;
};

struct PortRef
{
    std::string component;
    std::string port;

    bool operator==(const PortRef&) const = default;
};

struct Connection
{
    PortRef from; // out-port
    PortRef to;   // in-port
};

struct External
{
    PortRef port;
    std::string alias;
};

struct Parameter
{
    std::string name;
    Sort sort = Sort::Real;
};

struct SystemModel
{
    std::string name;
    Domain domain = Domain::Real;
    std::vector<Parameter> parameters;
    std::vector<Component> components;
    std::vector<AtomicProperty> properties;
    std::vector<AtomicInitialCondition> initials;
    std::vector<Connection> connections;
    std::vector<External> externals;
    /// Environment assumptions over external variables, assumed at every step.
    std::vector<Formula> assumptions;

    const Component* find_component(const std::string& name) const;
    const Port* find_port(const PortRef& ref) const;
    /// Variable name of a port: its external alias, or "component.port".
    std::string variable_name(const PortRef& ref) const;
    /// Names visible at the system interface: external aliases and parameters.
    std::set<std::string> interface_names() const;
    /// Relative-offset-0 equality for a connection.
    Formula connection_formula(const Connection& c) const;
};

/// Adds one property, shifting it so its newest relative offset is 0. The order is at least
/// min_order, for bodies whose delayed terms cancelled out.
void add_property(SystemModel& s, const std::string& owner, const Formula& body, std::int64_t min_order = 0);

struct Diagnostic
{
    std::string rule; // MULTI_DRIVER, SORT_MISMATCH, ...
    std::string message;
};

std::vector<Diagnostic> validate(const SystemModel& s);

/// Sum of the orders of all atomic properties.
std::int64_t system_order_bound(const SystemModel& s);
std::int64_t max_property_order(const SystemModel& s);

/// Variables that must be hidden: everything whose name is not on the system interface.
std::vector<TimedVar> hidden_variables(const SystemModel& s, const Formula& f);

} // namespace relic
