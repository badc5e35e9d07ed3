#include "dnets/structures.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace dnets {

PairAlphabet::PairAlphabet(std::vector<std::string> names, std::vector<PairType> involution)
    : names_(std::move(names)), involution_(std::move(involution))
{
    if (names_.empty())
        throw StructureError("pair alphabet must be nonempty");
    if (names_.size() > 255)
        throw StructureError("pair alphabet too large");
    if (involution_.size() != names_.size())
        throw StructureError("involution size does not match alphabet");
    for (std::size_t t = 0; t < involution_.size(); ++t) {
        if (involution_[t] >= names_.size() || involution_[involution_[t]] != t)
            throw StructureError("pair-type map is not an involution");
    }
}

AlphabetRef PairAlphabet::symmetric(std::vector<std::string> names)
{
    std::vector<PairType> inv(names.size());
    std::iota(inv.begin(), inv.end(), PairType{0});
    return AlphabetRef(new PairAlphabet(std::move(names), std::move(inv)));
}

AlphabetRef PairAlphabet::make(std::vector<std::string> names, std::vector<PairType> involution)
{
    return AlphabetRef(new PairAlphabet(std::move(names), std::move(involution)));
}

const AlphabetRef& PairAlphabet::three_graph()
{
    static const AlphabetRef alphabet = symmetric({"C1", "C2", "C3"});
    return alphabet;
}

std::optional<PairType> PairAlphabet::find(std::string_view name) const
{
    for (std::size_t t = 0; t < names_.size(); ++t)
        if (names_[t] == name)
            return PairType(t);
    return std::nullopt;
}

bool PairAlphabet::is_symmetric() const
{
    for (std::size_t t = 0; t < involution_.size(); ++t)
        if (involution_[t] != t)
            return false;
    return true;
}

bool same_alphabet(const AlphabetRef& a, const AlphabetRef& b)
{
    return a == b || *a == *b;
}

FiniteStructure::FiniteStructure(AlphabetRef alphabet, std::size_t n, PairType fill)
    : alphabet_(std::move(alphabet)), n_(n)
{
    if (!alphabet_)
        throw StructureError("structure needs an alphabet");
    if (fill >= alphabet_->size())
        throw StructureError("fill type outside alphabet");
    upper_.assign(n * (n > 0 ? n - 1 : 0) / 2, fill);
}

FiniteStructure FiniteStructure::from_function(AlphabetRef alphabet, std::size_t n,
                                               const std::function<PairType(Vertex, Vertex)>& type_of)
{
    FiniteStructure s(std::move(alphabet), n);
    for (Vertex v = 1; v < n; ++v)
        for (Vertex u = 0; u < v; ++u)
            s.set_type(u, v, type_of(u, v));
    return s;
}

void FiniteStructure::set_type(Vertex u, Vertex v, PairType t)
{
    if (u == v || u >= n_ || v >= n_)
        throw StructureError("set_type: bad vertex pair");
    if (t >= alphabet_->size())
        throw StructureError("set_type: type outside alphabet");
    if (u < v)
        upper_[slot(u, v)] = t;
    else
        upper_[slot(v, u)] = alphabet_->inverse(t);
}

FiniteStructure FiniteStructure::extended(std::span<const PairType> row) const
{
    if (row.size() != n_)
        throw StructureError("extension row has wrong length");
    FiniteStructure out = *this;
    out.n_ = n_ + 1;
    for (PairType t : row) {
        if (t >= alphabet_->size())
            throw StructureError("extension row: type outside alphabet");
        out.upper_.push_back(t);
    }
    return out;
}

FiniteStructure FiniteStructure::restricted(std::span<const Vertex> order) const
{
    FiniteStructure out(alphabet_, order.size());
    for (Vertex j = 1; j < order.size(); ++j)
        for (Vertex i = 0; i < j; ++i)
            out.upper_[slot(i, j)] = type(order[i], order[j]);
    return out;
}

FiniteStructure FiniteStructure::induced(std::span<const Vertex> keep) const
{
    std::vector<Vertex> sorted(keep.begin(), keep.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw StructureError("induced: repeated vertex");
    if (!sorted.empty() && sorted.back() >= n_)
        throw StructureError("induced: vertex index out of range");
    return restricted(sorted);
}

std::vector<PairType> FiniteStructure::row_to(Vertex v) const
{
    std::vector<PairType> row;
    row.reserve(n_ ? n_ - 1 : 0);
    for (Vertex u = 0; u < n_; ++u)
        if (u != v)
            row.push_back(type(u, v));
    return row;
}

bool FiniteStructure::operator==(const FiniteStructure& other) const
{
    return n_ == other.n_ && upper_ == other.upper_ && same_alphabet(alphabet_, other.alphabet_);
}

std::string FiniteStructure::to_string() const
{
    std::ostringstream os;
    os << "{" << n_ << " vertices";
    for (Vertex v = 1; v < n_; ++v)
        for (Vertex u = 0; u < v; ++u)
            os << (u == 0 && v == 1 ? ": " : ", ") << u << ' ' << alphabet_->name(type(u, v)) << ' ' << v;
    os << "}";
    return os.str();
}

FiniteStructure induced(const FiniteStructure& s, std::span<const Vertex> keep)
{
    return s.induced(keep);
}

// Embeddings --------------------------------------------------------------

bool is_embedding(const FiniteStructure& a, const FiniteStructure& b, const EmbeddingWitness& h)
{
    if (h.map.size() != a.size() || !same_alphabet(a.alphabet_ref(), b.alphabet_ref()))
        return false;
    std::vector<bool> used(b.size(), false);
    for (Vertex x : h.map) {
        if (x >= b.size() || used[x])
            return false;
        used[x] = true;
    }
    for (Vertex v = 1; v < a.size(); ++v)
        for (Vertex u = 0; u < v; ++u)
            if (a.type(u, v) != b.type(h.map[u], h.map[v]))
                return false;
    return true;
}

namespace {

std::vector<std::vector<std::uint32_t>> type_profiles(const FiniteStructure& s)
{
    const std::size_t k = s.alphabet().size();
    std::vector<std::vector<std::uint32_t>> prof(s.size(), std::vector<std::uint32_t>(k, 0));
    for (Vertex u = 0; u < s.size(); ++u)
        for (Vertex w = 0; w < s.size(); ++w)
            if (u != w)
                ++prof[u][s.type(u, w)];
    return prof;
}

class EmbeddingSearch {
public:
    EmbeddingSearch(const FiniteStructure& a, const FiniteStructure& b, const VertexCompat& compatible)
        : a_(a), b_(b)
    {
        if (!same_alphabet(a.alphabet_ref(), b.alphabet_ref()))
            throw StructureError("embedding: alphabet mismatch");
        const auto pa = type_profiles(a);
        const auto pb = type_profiles(b);
        initial_.resize(a.size());
        for (Vertex u = 0; u < a.size(); ++u) {
            for (Vertex v = 0; v < b.size(); ++v) {
                bool ok = std::equal(pa[u].begin(), pa[u].end(), pb[v].begin(),
                                     [](auto x, auto y) { return x <= y; });
                if (ok && compatible)
                    ok = compatible(u, v);
                if (ok)
                    initial_[u].push_back(v);
            }
        }
    }

    void run(const std::function<bool(const EmbeddingWitness&)>& visit)
    {
        if (a_.size() > b_.size())
            return;
        witness_.map.assign(a_.size(), 0);
        used_.assign(b_.size(), false);
        std::vector<std::vector<Vertex>> domains = initial_;
        extend(0, domains, visit);
    }

private:
    // Returns false when the visitor asked to stop.
    bool extend(Vertex u, std::vector<std::vector<Vertex>>& domains,
                const std::function<bool(const EmbeddingWitness&)>& visit)
    {
        if (u == a_.size())
            return visit(witness_);
        for (Vertex v : domains[u]) {
            if (used_[v])
                continue;
            // Forward check: restrict later vertices to targets consistent with u -> v.
            std::vector<std::vector<Vertex>> next(domains.begin(), domains.end());
            bool dead = false;
            for (Vertex w = u + 1; w < a_.size() && !dead; ++w) {
                const PairType want = a_.type(u, w);
                auto& dom = next[w];
                dom.erase(std::remove_if(dom.begin(), dom.end(),
                                         [&](Vertex x) { return x == v || b_.type(v, x) != want; }),
                          dom.end());
                dead = dom.empty();
            }
            if (dead)
                continue;
            witness_.map[u] = v;
            used_[v] = true;
            const bool go_on = extend(u + 1, next, visit);
            used_[v] = false;
            if (!go_on)
                return false;
        }
        return true;
    }

    const FiniteStructure& a_;
    const FiniteStructure& b_;
    std::vector<std::vector<Vertex>> initial_;
    EmbeddingWitness witness_;
    std::vector<bool> used_;
};

} // namespace

void for_each_embedding(const FiniteStructure& a, const FiniteStructure& b,
                        const VertexCompat& compatible,
                        const std::function<bool(const EmbeddingWitness&)>& visit)
{
    EmbeddingSearch search(a, b, compatible);
    search.run(visit);
}

std::optional<EmbeddingWitness> find_embedding(const FiniteStructure& a, const FiniteStructure& b,
                                               const VertexCompat& compatible)
{
    std::optional<EmbeddingWitness> found;
    for_each_embedding(a, b, compatible, [&](const EmbeddingWitness& h) {
        found = h;
        return false;
    });
    return found;
}

std::optional<EmbeddingWitness> find_embedding(const FiniteStructure& a, const FiniteStructure& b)
{
    return find_embedding(a, b, VertexCompat{});
}

EmbeddingWitness compose(const EmbeddingWitness& first, const EmbeddingWitness& second)
{
    EmbeddingWitness out;
    out.map.reserve(first.map.size());
    for (Vertex x : first.map)
        out.map.push_back(second.map.at(x));
    return out;
}

} // namespace dnets
