#pragma once

// Brute-force reference implementations used by the tests. Nothing here
// calls the library's search code; they only read structures and nets.

#include "dnets/nets.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using dnets::FiniteStructure;
using dnets::PairType;
using dnets::Vertex;

// Structures ----------------------------------------------------------------

/// Every injective map a -> b that preserves all pair types, visited in
/// lexicographic order; stop by returning false.
inline void each_embedding(const FiniteStructure& a, const FiniteStructure& b,
                           const std::function<bool(const std::vector<Vertex>&)>& visit)
{
    std::vector<Vertex> map;
    std::vector<bool> used(b.size(), false);
    bool stop = false;
    std::function<void()> rec = [&] {
        if (stop)
            return;
        const Vertex u = Vertex(map.size());
        if (u == a.size()) {
            stop = !visit(map);
            return;
        }
        for (Vertex v = 0; v < b.size() && !stop; ++v) {
            if (used[v])
                continue;
            bool ok = true;
            for (Vertex w = 0; w < u && ok; ++w)
                ok = a.type(w, u) == b.type(map[w], v);
            if (!ok)
                continue;
            used[v] = true;
            map.push_back(v);
            rec();
            map.pop_back();
            used[v] = false;
        }
    };
    rec();
}

inline std::optional<std::vector<Vertex>> first_embedding(const FiniteStructure& a, const FiniteStructure& b)
{
    std::optional<std::vector<Vertex>> out;
    each_embedding(a, b, [&](const std::vector<Vertex>& m) {
        out = m;
        return false;
    });
    return out;
}

inline bool embeds(const FiniteStructure& a, const FiniteStructure& b) { return first_embedding(a, b).has_value(); }

inline bool isomorphic(const FiniteStructure& a, const FiniteStructure& b)
{
    return a.size() == b.size() && embeds(a, b);
}

/// All structures on n vertices over the alphabet (symmetric alphabets only).
inline std::vector<FiniteStructure> all_structures(const dnets::AlphabetRef& alph, std::size_t n)
{
    const std::size_t pairs = n * (n - (n > 0)) / 2;
    std::vector<FiniteStructure> out;
    std::vector<PairType> digits(pairs, 0);
    while (true) {
        FiniteStructure s(alph, n);
        std::size_t k = 0;
        for (Vertex v = 1; v < n; ++v)
            for (Vertex u = 0; u < v; ++u)
                s.set_type(u, v, digits[k++]);
        out.push_back(std::move(s));
        std::size_t i = 0;
        while (i < pairs && std::size_t(digits[i]) + 1 == alph->size())
            digits[i++] = 0;
        if (i == pairs)
            break;
        ++digits[i];
    }
    return out;
}

// Grid ------------------------------------------------------------------------

using Point = std::pair<int, int>;

/// Pair type of two distinct grid points: 0 same row, 1 same column, 2 neither.
inline PairType grid_type(Point a, Point b)
{
    if (a.first == b.first)
        return 0;
    if (a.second == b.second)
        return 1;
    return 2;
}

/// Coordinates realizing s in the grid, or nullopt. Rows and columns are
/// assigned in order of first use, which loses no generality.
inline std::optional<std::vector<Point>> grid_coordinates(const FiniteStructure& s)
{
    std::vector<Point> pts;
    std::function<bool(int, int)> rec = [&](int rows, int cols) -> bool {
        const Vertex v = Vertex(pts.size());
        if (v == s.size())
            return true;
        for (int r = 0; r <= rows; ++r)
            for (int c = 0; c <= cols; ++c) {
                const Point p{r, c};
                bool ok = true;
                for (Vertex u = 0; u < v && ok; ++u)
                    ok = pts[u] != p && grid_type(pts[u], p) == s.type(u, v);
                if (!ok)
                    continue;
                pts.push_back(p);
                if (rec(std::max(rows, r + 1), std::max(cols, c + 1)))
                    return true;
                pts.pop_back();
            }
        return false;
    };
    if (rec(0, 0))
        return pts;
    return std::nullopt;
}

inline FiniteStructure grid_structure(const dnets::AlphabetRef& alph, const std::vector<Point>& pts)
{
    FiniteStructure s(alph, pts.size());
    for (Vertex v = 1; v < pts.size(); ++v)
        for (Vertex u = 0; u < v; ++u)
            s.set_type(u, v, grid_type(pts[u], pts[v]));
    return s;
}

// Multisets ---------------------------------------------------------------------

template <class T, class Leq>
bool multiset_embed(const std::vector<T>& small, const std::vector<T>& large, Leq leq)
{
    if (small.size() > large.size())
        return false;
    std::vector<std::size_t> idx(large.size());
    std::iota(idx.begin(), idx.end(), 0);
    // Try every ordered choice of distinct targets.
    std::vector<bool> used(large.size(), false);
    std::function<bool(std::size_t)> rec = [&](std::size_t i) {
        if (i == small.size())
            return true;
        for (std::size_t j = 0; j < large.size(); ++j) {
            if (used[j] || !leq(small[i], large[j]))
                continue;
            used[j] = true;
            if (rec(i + 1))
                return true;
            used[j] = false;
        }
        return false;
    };
    return rec(0);
}

// Equality-domain nets ------------------------------------------------------------

/// A concrete configuration over the equality domain: per value, per place counts.
using Tokens = std::vector<dnets::Counts>;

/// Canonical form over the equality domain: the sorted list of nonzero rows.
inline Tokens normalize(Tokens t)
{
    std::erase_if(t, [](const dnets::Counts& c) {
        return std::all_of(c.begin(), c.end(), [](std::uint32_t x) { return x == 0; });
    });
    std::sort(t.begin(), t.end());
    return t;
}

inline Tokens tokens_of(const dnets::Configuration& c) { return normalize(c.all_counts()); }

inline dnets::Configuration to_configuration(const dnets::DataNet& net, const Tokens& t)
{
    FiniteStructure carrier(net.domain.alphabet(), t.size(), 0);
    return dnets::Configuration::make(carrier, t, net.places.size());
}

inline bool pointwise(const dnets::Counts& a, const dnets::Counts& b)
{
    for (std::size_t p = 0; p < a.size(); ++p)
        if (a[p] > b[p])
            return false;
    return true;
}

/// a ⊴ b over the equality domain: a matching of rows with pointwise inclusion.
inline bool covers(const Tokens& a, const Tokens& b) { return multiset_embed(a, b, pointwise); }

inline bool literal_holds(const dnets::DataNet& net, const dnets::Literal& l, int x, int y)
{
    bool value;
    if (l.kind == dnets::LiteralKind::Identity)
        value = x == y;
    else
        value = net.domain.relations()[l.relation].holds(x == y, 0);
    return value != l.negated;
}

inline bool guard_holds(const dnets::DataNet& net, const dnets::Transition& t, const std::vector<int>& val)
{
    for (const dnets::Conjunction& conj : t.guard.disjuncts) {
        bool ok = true;
        for (const dnets::Literal& l : conj)
            ok = ok && literal_holds(net, l, val[l.x], val[l.y]);
        if (ok)
            return true;
    }
    return false;
}

/// Every successor of t from concrete tokens, by direct valuation search.
/// Output variables range over existing values and enough fresh ones.
inline std::set<Tokens> successors(const dnets::DataNet& net, std::size_t ti, const Tokens& c)
{
    const dnets::Transition& t = net.transitions[ti];
    const int existing = int(c.size());
    const int fresh = int(t.output_tokens());
    std::set<Tokens> out;
    std::vector<int> val(t.vars.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t x) {
        if (x == t.vars.size()) {
            if (!guard_holds(net, t, val))
                return;
            Tokens next = c;
            next.resize(existing + fresh, dnets::Counts(net.places.size(), 0));
            for (const dnets::Arc& a : t.inputs)
                for (std::size_t v : a.vars) {
                    auto& cell = next[val[v]][a.place];
                    if (cell == 0)
                        return;
                    --cell;
                }
            for (const dnets::Arc& a : t.outputs)
                for (std::size_t v : a.vars)
                    ++next[val[v]][a.place];
            out.insert(normalize(next));
            return;
        }
        const int range = t.is_input(x) ? existing : existing + fresh;
        for (int v = 0; v < range; ++v) {
            val[x] = v;
            rec(x + 1);
        }
    };
    rec(0);
    return out;
}

inline std::set<Tokens> successors(const dnets::DataNet& net, const Tokens& c)
{
    std::set<Tokens> out;
    for (std::size_t t = 0; t < net.transitions.size(); ++t)
        for (const Tokens& s : successors(net, t, c))
            out.insert(s);
    return out;
}

/// Reachable configurations, up to `limit` of them.
inline std::set<Tokens> reachable(const dnets::DataNet& net, const Tokens& c0, std::size_t limit = 200000)
{
    std::set<Tokens> seen{normalize(c0)};
    std::vector<Tokens> work{normalize(c0)};
    while (!work.empty() && seen.size() < limit) {
        Tokens c = std::move(work.back());
        work.pop_back();
        for (const Tokens& s : successors(net, c))
            if (seen.insert(s).second)
                work.push_back(s);
    }
    return seen;
}

/// All configurations with 1..max_tokens tokens over `places` places.
inline std::vector<Tokens> universe(std::size_t places, std::size_t max_tokens, bool include_empty = false)
{
    // Rows: nonzero count vectors with total <= max_tokens.
    std::vector<dnets::Counts> rows;
    dnets::Counts row(places, 0);
    std::function<void(std::size_t, std::size_t)> gen_row = [&](std::size_t p, std::size_t left) {
        if (p == places) {
            if (std::any_of(row.begin(), row.end(), [](std::uint32_t x) { return x > 0; }))
                rows.push_back(row);
            return;
        }
        for (std::size_t k = 0; k <= left; ++k) {
            row[p] = std::uint32_t(k);
            gen_row(p + 1, left - k);
        }
        row[p] = 0;
    };
    gen_row(0, max_tokens);
    std::sort(rows.begin(), rows.end());
    const auto total = [](const dnets::Counts& c) {
        return std::accumulate(c.begin(), c.end(), std::size_t(0));
    };
    std::vector<Tokens> out;
    if (include_empty)
        out.push_back({});
    Tokens cur;
    // Multisets of rows in non-decreasing index order.
    std::function<void(std::size_t, std::size_t)> gen = [&](std::size_t from, std::size_t left) {
        for (std::size_t i = from; i < rows.size(); ++i) {
            if (total(rows[i]) > left)
                continue;
            cur.push_back(rows[i]);
            out.push_back(normalize(cur));
            gen(i, left - total(rows[i]));
            cur.pop_back();
        }
    };
    gen(0, max_tokens);
    return out;
}

/// Random equality-domain net in the text format. With `non_increasing`,
/// no transition outputs more tokens than it consumes.
inline std::string random_net(std::mt19937_64& rng, bool non_increasing, std::size_t max_places = 3,
                              std::size_t max_transitions = 3)
{
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    const std::size_t places = pick(1, max_places);
    const std::size_t transitions = pick(1, max_transitions);
    std::string text = "domain equality\nplace";
    for (std::size_t p = 0; p < places; ++p)
        text += " p" + std::to_string(p);
    text += "\n";
    for (std::size_t t = 0; t < transitions; ++t) {
        text += "transition t" + std::to_string(t) + "\n";
        std::vector<std::string> vars;
        const std::size_t ins = pick(non_increasing ? 1 : 0, 2);
        const std::size_t outs = non_increasing ? pick(0, ins) : pick(0, 2);
        std::map<std::size_t, std::vector<std::string>> in_arcs, out_arcs;
        for (std::size_t i = 0; i < ins; ++i) {
            vars.push_back("x" + std::to_string(i));
            in_arcs[pick(0, places - 1)].push_back(vars.back());
        }
        for (std::size_t i = 0; i < outs; ++i) {
            vars.push_back("y" + std::to_string(i));
            out_arcs[pick(0, places - 1)].push_back(vars.back());
        }
        for (const auto& [p, vs] : in_arcs) {
            text += "  in p" + std::to_string(p) + ":";
            for (const auto& v : vs)
                text += " " + v;
            text += "\n";
        }
        for (const auto& [p, vs] : out_arcs) {
            text += "  out p" + std::to_string(p) + ":";
            for (const auto& v : vs)
                text += " " + v;
            text += "\n";
        }
        if (vars.size() >= 2) {
            std::string guard;
            const std::size_t lits = pick(0, 2);
            for (std::size_t l = 0; l < lits; ++l) {
                const std::size_t a = pick(0, vars.size() - 1);
                std::size_t b = pick(0, vars.size() - 2);
                if (b >= a)
                    ++b;
                guard += (guard.empty() ? "" : (pick(0, 3) == 0 ? " | " : " & ")) + vars[a] +
                         (pick(0, 1) ? " = " : " != ") + vars[b];
            }
            if (!guard.empty())
                text += "  guard " + guard + "\n";
        }
    }
    return text;
}

inline Tokens random_tokens(std::mt19937_64& rng, std::size_t places, std::size_t max_tokens)
{
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_tokens)(rng);
    Tokens t;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t value = std::uniform_int_distribution<std::size_t>(0, t.size())(rng);
        if (value == t.size())
            t.push_back(dnets::Counts(places, 0));
        ++t[value][std::uniform_int_distribution<std::size_t>(0, places - 1)(rng)];
    }
    return normalize(t);
}

} // namespace oracle
