#pragma once

// Quasi-order machinery over labeled structures.
//
// Labels come from an abstract quasi-ordered space given as a comparison
// callable leq(x, y). Shipped instances: natural numbers, multisets over a
// quasi-order (recursively), and place vectors compared pointwise.

#include "dnets/structures.hpp"

#include <algorithm>
#include <functional>
#include <utility>

namespace dnets {

/// Is there an injective assignment of every element of `small` to a distinct
/// element of `large` with leq holding pointwise? Bipartite matching.
template <class T, class Leq>
bool multiset_embed(std::span<const T> small, std::span<const T> large, Leq&& leq)
{
    const std::size_t n = small.size(), m = large.size();
    if (n > m)
        return false;
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j)
            if (leq(small[i], large[j]))
                adj[i].push_back(j);
        if (adj[i].empty())
            return false;
    }
    std::vector<std::size_t> owner(m, n);
    std::vector<bool> seen;
    std::function<bool(std::size_t)> augment = [&](std::size_t i) {
        for (std::size_t j : adj[i]) {
            if (seen[j])
                continue;
            seen[j] = true;
            if (owner[j] == n || augment(owner[j])) {
                owner[j] = i;
                return true;
            }
        }
        return false;
    };
    for (std::size_t i = 0; i < n; ++i) {
        seen.assign(m, false);
        if (!augment(i))
            return false;
    }
    return true;
}

template <class T, class Leq>
bool multiset_embed(const std::vector<T>& small, const std::vector<T>& large, Leq&& leq)
{
    return multiset_embed(std::span<const T>(small), std::span<const T>(large), std::forward<Leq>(leq));
}

/// Multisets over a quasi-order, nested as needed: leq on M(X) from leq on X.
template <class Leq>
auto multiset_order(Leq leq)
{
    return [leq](const auto& a, const auto& b) { return multiset_embed(a, b, leq); };
}

inline bool natural_leq(std::size_t a, std::size_t b) { return a <= b; }

/// Pointwise order on count vectors (multiset inclusion over a finite set).
inline bool pointwise_leq(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i])
            return false;
    return true;
}

template <class Label>
struct LabeledStructure {
    FiniteStructure shape;
    std::vector<Label> labels;

    std::size_t size() const { return shape.size(); }
};

class WqoError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// a ⊴_X b: some shape embedding h has leq(a.label(v), b.label(h v)) for all v.
template <class Label, class Leq>
std::optional<EmbeddingWitness> lifted_embedding(const LabeledStructure<Label>& a, const LabeledStructure<Label>& b,
                                                 const Leq& leq)
{
    if (a.labels.size() != a.shape.size() || b.labels.size() != b.shape.size())
        throw WqoError("labeled structure: label count differs from vertex count");
    if (!same_alphabet(a.shape.alphabet_ref(), b.shape.alphabet_ref()))
        throw WqoError("lifted embedding: alphabet mismatch");
    if (a.size() > b.size())
        return std::nullopt;
    return find_embedding(a.shape, b.shape, [&](Vertex u, Vertex v) { return leq(a.labels[u], b.labels[v]); });
}

template <class Label, class Leq>
bool lifted_embed(const LabeledStructure<Label>& a, const LabeledStructure<Label>& b, const Leq& leq)
{
    return lifted_embedding(a, b, leq).has_value();
}

/// Minimal basis of an upward-closed set: a ⊴_X-antichain.
template <class Label, class Leq>
class UpwardBasis {
public:
    explicit UpwardBasis(Leq leq) : leq_(std::move(leq)) {}

    const std::vector<LabeledStructure<Label>>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }

    /// Is x in the upward closure?
    bool covers(const LabeledStructure<Label>& x) const
    {
        return std::any_of(elements_.begin(), elements_.end(),
                           [&](const auto& b) { return lifted_embed(b, x, leq_); });
    }

    /// Basis of ↑this ∪ ↑x. Returns false (and leaves the basis unchanged) when
    /// x was already covered.
    bool insert(const LabeledStructure<Label>& x)
    {
        if (covers(x))
            return false;
        std::erase_if(elements_, [&](const auto& b) { return lifted_embed(x, b, leq_); });
        elements_.push_back(x);
        return true;
    }

    const Leq& order() const { return leq_; }

private:
    Leq leq_;
    std::vector<LabeledStructure<Label>> elements_;
};

template <class Label, class Leq>
UpwardBasis<Label, Leq> basis_insert(UpwardBasis<Label, Leq> basis, const LabeledStructure<Label>& x)
{
    basis.insert(x);
    return basis;
}

struct AntichainCheck {
    bool antichain = true;
    /// First offending pair (i, j) with xs[i] ⊴ xs[j], i != j.
    std::optional<std::pair<std::size_t, std::size_t>> witness;
};

template <class Label, class Leq>
AntichainCheck is_antichain(const std::vector<LabeledStructure<Label>>& xs, const Leq& leq)
{
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (i != j && lifted_embed(xs[i], xs[j], leq))
                return {false, std::make_pair(i, j)};
    return {};
}

/// Unlabeled structures as labeled ones over the one-point order.
inline LabeledStructure<std::size_t> unlabeled(const FiniteStructure& s)
{
    return {s, std::vector<std::size_t>(s.size(), 0)};
}

} // namespace dnets
