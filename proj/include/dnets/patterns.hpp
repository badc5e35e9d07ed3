#pragma once

// Builders for the small named shapes used throughout: paths, cycles,
// discrete graphs, disjoint sums and repetitions, plus a text form:
//
//   path <color>+        consecutive edges in the listed colors
//   cycle <color>{3,}    path closed back to its first vertex
//   discrete <k>         k vertices, all pairs the no-edge color
//   sum <expr> <expr>    disjoint union, no-edge color between parts
//   repeat <k> <expr>    k disjoint copies
//
// Parentheses may group sub-expressions. Path length counts edges.

#include "dnets/structures.hpp"

#include <map>

namespace dnets {

class PatternError : public std::invalid_argument {
public:
    PatternError(const std::string& what, std::size_t column)
        : std::invalid_argument(what), column_(column) {}
    std::size_t column() const { return column_; }

private:
    std::size_t column_;
};

FiniteStructure make_path(const AlphabetRef& alphabet, std::span<const PairType> edges, PairType no_edge);
FiniteStructure make_cycle(const AlphabetRef& alphabet, std::span<const PairType> edges, PairType no_edge);
FiniteStructure make_discrete(const AlphabetRef& alphabet, std::size_t k, PairType no_edge);
FiniteStructure disjoint_sum(const FiniteStructure& g1, const FiniteStructure& g2, PairType between);
FiniteStructure repeat(std::size_t k, const FiniteStructure& g, PairType between);
/// Triangle with edge colors a (0-1), b (1-2), c (0-2).
FiniteStructure make_triangle(const AlphabetRef& alphabet, PairType a, PairType b, PairType c);
/// Clique on k vertices, all pairs colored c.
FiniteStructure make_clique(const AlphabetRef& alphabet, std::size_t k, PairType c);

/// Extra names accepted for colors (domain-specific aliases).
using ColorAliases = std::map<std::string, PairType, std::less<>>;

FiniteStructure build_pattern(std::string_view expr, const AlphabetRef& alphabet, PairType no_edge,
                              const ColorAliases& aliases = {});

} // namespace dnets
