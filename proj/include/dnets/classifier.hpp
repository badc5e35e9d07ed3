#pragma once

// Bounded-scale structural evidence for 3-graph domains.
//
// Colors are the alphabet's types in order (C1, C2, C3). An alphabet with
// fewer than three types leaves the remaining colors empty.

#include "dnets/extensions.hpp"

namespace dnets {

class ClassifierError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Color = PairType;

struct PathResult {
    /// Number of edges.
    std::size_t length = 0;
    FiniteStructure witness;
};

/// Longest path (up to `bound` edges) whose consecutive pairs have color i or
/// j and whose other pairs have neither, among members of the age.
PathResult longest_induced_path(const DomainSpec& d, Color i, Color j, std::size_t bound);

/// Whether s is a path with edges in {i, j} and non-edges outside.
bool is_induced_path(const FiniteStructure& s, Color i, Color j);

struct CaseA {
    bool witnessed = false;
    Color c = 0, a = 0, x = 0;
    FiniteStructure clique;
    FiniteStructure triangle_axc;
    FiniteStructure triangle_acc;
};

/// Disjoint-clique test for x ∪ y: no triangle with exactly two edges in x ∪ y.
struct TransitivityCheck {
    Color x = 0, y = 0;
    bool holds = false;
    /// Some color involved is empty, so the test says little.
    bool vacuous = false;
    std::optional<FiniteStructure> counterexample;
};

struct CaseC {
    Color x = 0;
    bool transitive = false;
    bool vacuous = false;
    std::optional<FiniteStructure> counterexample;
    bool large_clique = false;
    ClassCountBound classes;
    bool witnessed = false;
};

struct PathCheck {
    Color i = 0, j = 0;
    PathResult path;
    bool witnessed = false;
};

struct CaseReport {
    std::string domain;
    std::size_t bound = 0;
    std::vector<Color> empty_colors;
    CaseA a;
    std::vector<TransitivityCheck> b;
    std::vector<CaseC> c;
    std::vector<PathCheck> d;

    bool b_witnessed() const;
    bool c_witnessed() const;
    bool d_witnessed() const;
};

CaseReport case_evidence(const DomainSpec& d, std::size_t bound);

/// Re-checks every witness of a report against the domain. Empty when valid.
std::string validate_report(const DomainSpec& d, const CaseReport& r);

/// Singleton instances with |A| <= max_shared, up to isomorphism, that have
/// no (strong, if requested) solution.
std::vector<AmalgamInstance> audit_amalgamation(const DomainSpec& d, std::size_t max_shared, bool strong);

/// Rows of the left and right extra vertices over the shared part.
std::pair<TypeRow, TypeRow> instance_rows(const AmalgamInstance& inst);

/// Isomorphism-invariant key of a singleton instance, symmetric in the two sides.
CanonicalKey instance_key(const AmalgamInstance& inst);

/// Age members with exactly k vertices, one per isomorphism class.
std::vector<FiniteStructure> age_members(const DomainSpec& d, std::size_t k);

std::string color_name(const DomainSpec& d, Color c);

} // namespace dnets
