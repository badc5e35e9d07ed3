#pragma once

// Finite relational structures over a binary pair-type alphabet.
//
// A structure on n vertices assigns exactly one pair type to every ordered
// pair of distinct vertices, such that type(v,u) is the involution of
// type(u,v). Symmetric signatures (graphs, 3-graphs, equality fragments)
// use the identity involution; a strict total order uses {<, >}.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dnets {

using Vertex = std::uint32_t;
using PairType = std::uint8_t;

class PairAlphabet;
using AlphabetRef = std::shared_ptr<const PairAlphabet>;

class PairAlphabet {
public:
    /// Alphabet whose involution is the identity.
    static AlphabetRef symmetric(std::vector<std::string> names);
    static AlphabetRef make(std::vector<std::string> names, std::vector<PairType> involution);
    /// The shared {C1, C2, C3} alphabet of 3-graphs.
    static const AlphabetRef& three_graph();

    std::size_t size() const { return names_.size(); }
    const std::string& name(PairType t) const { return names_.at(t); }
    std::optional<PairType> find(std::string_view name) const;
    PairType inverse(PairType t) const { return involution_[t]; }
    bool is_symmetric() const;
    bool is_three_graph() const { return is_symmetric() && size() <= 3; }

    bool operator==(const PairAlphabet&) const = default;

private:
    PairAlphabet(std::vector<std::string> names, std::vector<PairType> involution);

    std::vector<std::string> names_;
    std::vector<PairType> involution_;
};

bool same_alphabet(const AlphabetRef& a, const AlphabetRef& b);

class StructureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FiniteStructure {
public:
    FiniteStructure() : FiniteStructure(PairAlphabet::three_graph()) {}
    explicit FiniteStructure(AlphabetRef alphabet, std::size_t n = 0, PairType fill = 0);

    /// Build from a callback giving type(u, v) for u < v.
    static FiniteStructure from_function(AlphabetRef alphabet, std::size_t n,
                                         const std::function<PairType(Vertex, Vertex)>& type_of);

    std::size_t size() const { return n_; }
    const PairAlphabet& alphabet() const { return *alphabet_; }
    const AlphabetRef& alphabet_ref() const { return alphabet_; }

    PairType type(Vertex u, Vertex v) const
    {
        return u < v ? upper_[slot(u, v)] : alphabet_->inverse(upper_[slot(v, u)]);
    }
    void set_type(Vertex u, Vertex v, PairType t);

    /// Adds one vertex; row[i] is the type of the pair (i, new vertex).
    FiniteStructure extended(std::span<const PairType> row) const;
    /// Substructure induced by `keep`, renumbered in increasing vertex order.
    FiniteStructure induced(std::span<const Vertex> keep) const;
    /// Substructure on the listed vertices, renumbered in list order.
    FiniteStructure restricted(std::span<const Vertex> order) const;

    /// Row of types from every other vertex to v, in vertex order, skipping v.
    std::vector<PairType> row_to(Vertex v) const;

    bool operator==(const FiniteStructure& other) const;

    std::string to_string() const;

private:
    static std::size_t slot(Vertex u, Vertex v) { return std::size_t(v) * (v - 1) / 2 + u; }

    AlphabetRef alphabet_;
    std::size_t n_ = 0;
    std::vector<PairType> upper_;
};

/// Shorthand for induced(s, keep) with range checking.
FiniteStructure induced(const FiniteStructure& s, std::span<const Vertex> keep);

struct EmbeddingWitness {
    std::vector<Vertex> map;
    bool operator==(const EmbeddingWitness&) const = default;
};

bool is_embedding(const FiniteStructure& a, const FiniteStructure& b, const EmbeddingWitness& h);

/// Extra per-vertex admissibility for embedding search: may source vertex u map to target v?
using VertexCompat = std::function<bool(Vertex, Vertex)>;

/// Lexicographically least embedding of a into b, if any.
std::optional<EmbeddingWitness> find_embedding(const FiniteStructure& a, const FiniteStructure& b);
std::optional<EmbeddingWitness> find_embedding(const FiniteStructure& a, const FiniteStructure& b,
                                               const VertexCompat& compatible);

/// Visits embeddings in lexicographic order until the callback returns false.
void for_each_embedding(const FiniteStructure& a, const FiniteStructure& b,
                        const VertexCompat& compatible,
                        const std::function<bool(const EmbeddingWitness&)>& visit);

EmbeddingWitness compose(const EmbeddingWitness& first, const EmbeddingWitness& second);

// Canonical forms ---------------------------------------------------------

struct CanonicalKey {
    std::string bytes;
    auto operator<=>(const CanonicalKey&) const = default;
    std::string hex() const;
};

struct CanonicalKeyHash {
    std::size_t operator()(const CanonicalKey& k) const noexcept
    {
        return std::hash<std::string>{}(k.bytes);
    }
};

struct CanonicalLabeling {
    /// order[i] is the original vertex placed at canonical position i.
    std::vector<Vertex> order;
    CanonicalKey key;
};

/// Canonical labeling of a vertex-labeled structure. Labels are opaque byte
/// strings compared lexicographically; isomorphisms must preserve them.
CanonicalLabeling canonical_labeling(const FiniteStructure& s,
                                     std::span<const std::string> labels = {});
CanonicalKey canonical_form(const FiniteStructure& s);
bool isomorphic(const FiniteStructure& a, const FiniteStructure& b);

} // namespace dnets
