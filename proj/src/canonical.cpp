// Canonical labeling by colour refinement plus individualization.
//
// The search tree is invariant under isomorphism: refinement ranks vertices by
// sorted signatures and the target cell is the first non-singleton cell in
// colour order. The lexicographically smallest leaf certificate is the key.
// Cells whose members are pairwise interchangeable (every transposition is an
// automorphism) are individualized on one member only.

#include "dnets/structures.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace dnets {

namespace {

using Colors = std::vector<std::uint32_t>;

class Canonicalizer {
public:
    Canonicalizer(const FiniteStructure& s, std::span<const std::string> labels)
        : s_(s), labels_(labels.begin(), labels.end())
    {
        if (labels_.empty())
            labels_.assign(s.size(), std::string());
        if (labels_.size() != s.size())
            throw StructureError("canonical_labeling: label count differs from vertex count");
    }

    CanonicalLabeling run()
    {
        const std::size_t n = s_.size();
        Colors colors(n, 0);
        {
            std::vector<std::string> distinct = labels_;
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            for (Vertex v = 0; v < n; ++v)
                colors[v] = std::uint32_t(std::lower_bound(distinct.begin(), distinct.end(), labels_[v]) -
                                          distinct.begin());
        }
        refine(colors);
        search(colors);
        return CanonicalLabeling{best_order_, CanonicalKey{best_}};
    }

private:
    void refine(Colors& colors) const
    {
        const std::size_t n = s_.size();
        std::size_t classes = count_classes(colors);
        using Sig = std::pair<std::uint32_t, std::vector<std::uint64_t>>;
        std::vector<Sig> sig(n);
        while (true) {
            for (Vertex v = 0; v < n; ++v) {
                sig[v].first = colors[v];
                auto& nb = sig[v].second;
                nb.clear();
                for (Vertex w = 0; w < n; ++w)
                    if (w != v)
                        nb.push_back((std::uint64_t(s_.type(v, w)) << 32) | colors[w]);
                std::sort(nb.begin(), nb.end());
            }
            std::vector<const Sig*> ptrs;
            ptrs.reserve(n);
            for (auto& x : sig)
                ptrs.push_back(&x);
            std::sort(ptrs.begin(), ptrs.end(), [](const Sig* a, const Sig* b) { return *a < *b; });
            ptrs.erase(std::unique(ptrs.begin(), ptrs.end(), [](const Sig* a, const Sig* b) { return *a == *b; }),
                       ptrs.end());
            for (Vertex v = 0; v < n; ++v) {
                auto it = std::lower_bound(ptrs.begin(), ptrs.end(), &sig[v],
                                           [](const Sig* a, const Sig* b) { return *a < *b; });
                colors[v] = std::uint32_t(it - ptrs.begin());
            }
            const std::size_t now = ptrs.size();
            if (now == classes)
                break;
            classes = now;
        }
    }

    static std::size_t count_classes(const Colors& colors)
    {
        Colors c = colors;
        std::sort(c.begin(), c.end());
        return std::size_t(std::unique(c.begin(), c.end()) - c.begin());
    }

    bool transposable(Vertex x, Vertex y) const
    {
        if (s_.type(x, y) != s_.type(y, x))
            return false;
        for (Vertex w = 0; w < s_.size(); ++w)
            if (w != x && w != y && s_.type(x, w) != s_.type(y, w))
                return false;
        return true;
    }

    void search(const Colors& colors)
    {
        const std::size_t n = s_.size();
        // Target cell: smallest colour shared by more than one vertex.
        std::map<std::uint32_t, std::vector<Vertex>> cells;
        for (Vertex v = 0; v < n; ++v)
            cells[colors[v]].push_back(v);
        const std::vector<Vertex>* target = nullptr;
        for (auto& [c, members] : cells) {
            if (members.size() > 1) {
                target = &members;
                break;
            }
        }
        if (!target) {
            leaf(colors);
            return;
        }
        bool symmetric_cell = true;
        for (std::size_t i = 0; i + 1 < target->size() && symmetric_cell; ++i)
            for (std::size_t j = i + 1; j < target->size() && symmetric_cell; ++j)
                symmetric_cell = transposable((*target)[i], (*target)[j]);
        const std::size_t branches = symmetric_cell ? 1 : target->size();
        for (std::size_t i = 0; i < branches; ++i) {
            const Vertex pick = (*target)[i];
            Colors next(n);
            for (Vertex v = 0; v < n; ++v)
                next[v] = 2 * colors[v] + ((colors[v] == colors[pick] && v != pick) ? 1 : 0);
            refine(next);
            search(next);
        }
    }

    void leaf(const Colors& colors)
    {
        const std::size_t n = s_.size();
        std::vector<Vertex> order(n);
        for (Vertex v = 0; v < n; ++v)
            order[colors[v]] = v;
        std::string cert;
        cert.reserve(8 + n * n);
        const auto put32 = [&cert](std::uint32_t x) {
            for (int i = 0; i < 4; ++i)
                cert.push_back(char((x >> (8 * i)) & 0xff));
        };
        put32(std::uint32_t(n));
        for (Vertex v : order) {
            put32(std::uint32_t(labels_[v].size()));
            cert += labels_[v];
        }
        for (Vertex j = 1; j < n; ++j)
            for (Vertex i = 0; i < j; ++i)
                cert.push_back(char(s_.type(order[i], order[j])));
        if (!have_best_ || cert < best_) {
            best_ = std::move(cert);
            best_order_ = std::move(order);
            have_best_ = true;
        }
    }

    const FiniteStructure& s_;
    std::vector<std::string> labels_;
    bool have_best_ = false;
    std::string best_;
    std::vector<Vertex> best_order_;
};

} // namespace

std::string CanonicalKey::hex() const
{
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

CanonicalLabeling canonical_labeling(const FiniteStructure& s, std::span<const std::string> labels)
{
    return Canonicalizer(s, labels).run();
}

CanonicalKey canonical_form(const FiniteStructure& s)
{
    return canonical_labeling(s).key;
}

bool isomorphic(const FiniteStructure& a, const FiniteStructure& b)
{
    return a.size() == b.size() && same_alphabet(a.alphabet_ref(), b.alphabet_ref()) &&
           canonical_form(a) == canonical_form(b);
}

} // namespace dnets
