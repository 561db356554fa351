#pragma once

#include "relic/expr.hpp"
#include "relic/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relic
{

struct SpecPort
{
    Direction direction = Direction::In;
    std::string name;
    std::optional<Sort> sort; // nullopt: the numeric sort of the system domain
    SourcePos pos;
};

struct SpecClause
{
    enum class Kind : std::uint8_t
    {
        Guarantee,
        Initially
    };
    Kind kind = Kind::Guarantee;
    ExprPtr expr;
};

struct SpecComponent
{
    std::string name;
    std::vector<SpecPort> ports;
    std::vector<SpecClause> clauses;
    SourcePos pos;
};

struct SpecConnection
{
    PortRef from;
    PortRef to;
    SourcePos pos;
};

struct SpecExternal
{
    PortRef port;
    std::string alias; // empty: the qualified port name
    SourcePos pos;
};

struct SpecDocument
{
    std::string name;
    Domain domain = Domain::Real;
    std::vector<Parameter> parameters;
    std::vector<SpecComponent> components;
    std::vector<SpecConnection> connections;
    std::vector<SpecExternal> externals;
    std::vector<ExprPtr> assumptions;
    std::vector<ExprPtr> postulates;
};

/// Structural equality; source positions are ignored.
bool operator==(const SpecDocument& a, const SpecDocument& b);

/// Throws ParseError with the position of the offending token.
SpecDocument parse_spec(std::string_view text);
std::string print_spec(const SpecDocument& doc);

struct BuiltSpec
{
    SystemModel model;
    std::vector<Formula> postulates;
    std::vector<Diagnostic> diagnostics; // conversion and validation problems; empty when usable
};

BuiltSpec build_model(const SpecDocument& doc);

/// Reads and parses a file; throws Error when it cannot be read.
SpecDocument load_spec(const std::string& path);

} // namespace relic
