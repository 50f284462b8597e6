#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gsq/kg.hpp"

namespace gsq {

struct PatternTerm {
    bool is_variable = false;
    std::string var;        // variable name without the leading '?'
    std::uint32_t id = 0;   // vertex or edge id, depending on the slot
    bool operator==(const PatternTerm&) const = default;

    static PatternTerm variable(std::string name) { return {true, std::move(name), 0}; }
    static PatternTerm constant(std::uint32_t id) { return {false, {}, id}; }
};

struct TriplePattern {
    PatternTerm head, edge, tail;
    bool operator==(const TriplePattern&) const = default;
};

struct BoundValue {
    bool is_edge = false;
    std::uint32_t id = 0;
    auto operator<=>(const BoundValue&) const = default;
};

using Binding = std::map<std::string, BoundValue>;

// Conjunctive basic-graph-pattern matching: every binding map under which all
// patterns instantiate to triples of the graph. Exhaustive join, deterministic
// result order.
std::vector<Binding> match_pattern(const KnowledgeGraph& kg,
                                   const std::vector<TriplePattern>& patterns);

// Builds a pattern from labels; tokens starting with '?' are variables.
// Throws when a constant label is not registered in the graph.
TriplePattern make_pattern(const KnowledgeGraph& kg, const std::string& head,
                           const std::string& edge, const std::string& tail);

}  // namespace gsq
