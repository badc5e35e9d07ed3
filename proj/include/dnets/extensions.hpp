#pragma once

// One-point extensions and amalgamation over a domain's age.

#include "dnets/domains.hpp"

namespace dnets {

/// Extensions of s by one vertex that stay in the age, one per isomorphism
/// class of the pointed structure (new vertex distinguished). The new vertex
/// is always the last one.
std::vector<FiniteStructure> one_point_extensions(const FiniteStructure& s, const DomainSpec& d);

struct AmalgamInstance {
    FiniteStructure shared;
    FiniteStructure left;
    FiniteStructure right;
    EmbeddingWitness into_left;
    EmbeddingWitness into_right;

    bool is_singleton() const
    {
        return left.size() == shared.size() + 1 && right.size() == shared.size() + 1;
    }
};

/// Singleton instance where both sides extend `shared` by one vertex with the
/// given rows; the embeddings are identities on the shared part.
AmalgamInstance singleton_instance(const FiniteStructure& shared, const TypeRow& left_row,
                                   const TypeRow& right_row);

struct AmalgamSolution {
    FiniteStructure joined;
    EmbeddingWitness from_left;
    EmbeddingWitness from_right;
};

/// Valid embeddings and members of the age, or DomainError.
void validate_instance(const AmalgamInstance& inst, const DomainSpec& d);

/// Searches gluings with at most |left| + |right| - |shared| vertices. Complete
/// for singleton instances; strong solutions glue nothing outside the shared
/// part. Non-strong search tries unglued solutions first.
std::optional<AmalgamSolution> solve_amalgam(const AmalgamInstance& inst, const DomainSpec& d, bool strong);

bool is_solution(const AmalgamInstance& inst, const AmalgamSolution& sol, const DomainSpec& d, bool strong);

} // namespace dnets
