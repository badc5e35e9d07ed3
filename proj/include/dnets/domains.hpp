#pragma once

// Data domains as decidable age oracles.
//
// Each domain fixes a pair alphabet and answers "does this finite structure
// embed into the domain?". The built-ins also enumerate one-vertex extension
// rows directly instead of filtering every candidate row.

#include "dnets/patterns.hpp"
#include "dnets/structures.hpp"

#include <filesystem>
#include <variant>

namespace dnets {

enum class DomainKind { Equality, NestedEquality, DenseOrder, Grid, Striped, ForbiddenPatterns };

/// A binary relation usable in guards: holds on distinct x, y when the pair
/// type is in `types`, and on x == y when `reflexive`.
struct Relation {
    std::string name;
    std::vector<bool> types;
    bool reflexive = false;

    bool holds(bool same_vertex, PairType t) const { return same_vertex ? reflexive : bool(types[t]); }
};

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainSpec {
public:
    static DomainSpec equality();
    static DomainSpec nested_equality();
    static DomainSpec dense_order();
    static DomainSpec grid();
    /// `color` plus identity is an equivalence with at most `blocks` classes;
    /// every other pair has `off_color`.
    static DomainSpec striped(std::size_t blocks, PairType color, PairType off_color);
    static DomainSpec striped(std::size_t blocks, PairType color);
    static DomainSpec forbidden(AlphabetRef alphabet, std::vector<FiniteStructure> patterns,
                                PairType no_edge, std::string source = {});

    DomainKind kind() const { return kind_; }
    const AlphabetRef& alphabet() const { return alphabet_; }
    const std::vector<Relation>& relations() const { return relations_; }
    std::optional<std::size_t> find_relation(std::string_view name) const;
    /// Color names (alphabet names and aliases) for pattern expressions.
    ColorAliases color_aliases() const;
    /// Default pair type for undeclared atom pairs, where the domain has one.
    std::optional<PairType> generic_type() const { return generic_; }
    /// Whether the lifted embedding order is known to be a wqo.
    bool wqo_backed() const;
    /// Whether x = y is definable from the signature (false for arbitrary
    /// forbidden-pattern families, where node identity is added by the tool).
    bool equality_definable() const { return kind_ != DomainKind::ForbiddenPatterns; }

    std::size_t stripe_blocks() const { return blocks_; }
    PairType stripe_color() const { return color_; }
    PairType stripe_off_color() const { return off_color_; }
    const std::vector<FiniteStructure>& forbidden_patterns() const { return forbidden_; }
    /// No-edge color of a forbidden-pattern family.
    PairType no_edge() const { return no_edge_; }
    const std::string& source() const { return source_; }

    /// Round-trippable declaration text, e.g. "striped 3 C1".
    std::string describe() const;

private:
    DomainSpec(DomainKind kind, AlphabetRef alphabet);
    void add_relation(std::string name, std::vector<PairType> types, bool reflexive = false);

    DomainKind kind_;
    AlphabetRef alphabet_;
    std::vector<Relation> relations_;
    std::optional<PairType> generic_;
    std::size_t blocks_ = 0;
    PairType color_ = 0;
    PairType off_color_ = 0;
    PairType no_edge_ = 0;
    std::vector<FiniteStructure> forbidden_;
    std::string source_;
};

bool age_contains(const DomainSpec& d, const FiniteStructure& s);

using TypeRow = std::vector<PairType>;

/// Every row r such that s extended by one vertex with row r is in the age,
/// in lexicographic order.
std::vector<TypeRow> extension_rows(const DomainSpec& d, const FiniteStructure& s);

struct ClassCountBound {
    bool exact = false;
    std::size_t value = 0;
    bool operator==(const ClassCountBound&) const = default;
};

/// Largest m <= probe such that the age has m vertices pairwise not related by
/// `color`. A color index outside the alphabet is an empty color.
ClassCountBound class_count_bound(const DomainSpec& d, PairType color, std::size_t probe);

/// Parses a domain declaration: `equality | nested | order | grid |
/// striped <k> <color> | forbidden [<pattern-file>]`.
DomainSpec parse_domain(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads a pattern file: one pattern expression per line, `#` comments, and an
/// optional `noedge <color>` directive (default: the last color).
DomainSpec load_forbidden_patterns(const std::filesystem::path& file, std::string source_text = {});
DomainSpec forbidden_from_text(std::string_view text, std::string source_text = {});

} // namespace dnets
