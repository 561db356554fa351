#pragma once

#include "relic/compose.hpp"
#include "relic/interval.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace relic
{

struct Block
{
    enum class Kind : std::uint8_t
    {
        Input,
        Output,
        Gain,
        Sum,
        Compare,
        Switch,
        UnitDelay,
        Relu,
        Constant
    };
    Kind kind = Kind::Gain;
    std::string name;
    Rational factor = 1;          // Gain
    std::vector<int> signs;       // Sum, one ±1 per input in1..inN
    Rel op = Rel::Le;             // Compare: out = (in op rhs), or (in1 op in2) without rhs
    std::optional<Rational> rhs;  // Compare
    Rational init = 0;            // UnitDelay
    Rational value = 0;           // Constant
    std::optional<Interval> range; // Input

    /// Input pins, then output pins.
    std::vector<std::string> inputs() const;
    std::vector<std::string> outputs() const;
    Sort pin_sort(const std::string& pin) const;
};

std::string to_string(Block::Kind k);

struct Wire
{
    PortRef from; // block.pin
    PortRef to;
};

struct BlockGraph
{
    std::vector<Block> blocks;
    std::vector<Wire> wires;
    bool algebraic_ok = false;

    const Block* find(const std::string& name) const;
};

/// Graph document: {"params", "blocks", "wires", "algebraic_ok"} or a ReLU network
/// {"inputs", "layers", "outputs"}. Throws ParseError or Error.
BlockGraph parse_graph(std::string_view json_text);
BlockGraph load_graph(const std::string& path);

/// UNKNOWN_BLOCK, UNKNOWN_PIN, MULTI_DRIVER, SORT_MISMATCH, ALGEBRAIC_LOOP, UNDRIVEN_PIN
std::vector<Diagnostic> validate_graph(const BlockGraph& g);

/// The block's predicate over its pins, named "block.pin" (Input/Output pins by the block name).
Formula block_relation(const BlockGraph& g, const Block& b);
/// UnitDelay initial value at step 0; true for the other blocks.
Formula block_initial(const BlockGraph& g, const Block& b);
/// The graph as a component system: blocks are components, wires connections,
/// Input and Output blocks the interface.
SystemModel to_model(const BlockGraph& g);

/// Relation between inputs and outputs with every internal wire eliminated.
/// Graphs with delays go through the timed composition (ssp plus init).
CompositionResult io_relation(const BlockGraph& g, const QeOptions& opt = {});

struct RangeResult
{
    Formula formula;    // over the target variable only
    IntervalSet set;    // the same set as a union of intervals
};

/// Precise range of an Output block given the Input ranges (delay-free graphs).
RangeResult output_range(const BlockGraph& g, const std::string& target, const QeOptions& opt = {});
/// Forward interval arithmetic baseline.
Interval naive_interval_range(const BlockGraph& g, const std::string& target);

/// Set of values of v described by a quantifier-free formula in v alone.
IntervalSet univariate_set(const Formula& f, const TimedVar& v);

} // namespace relic
