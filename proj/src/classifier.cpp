#include "dnets/classifier.hpp"

#include <unordered_set>

namespace dnets {

namespace {

constexpr Color kColors = 3;

bool present(const DomainSpec& d, Color c) { return c < d.alphabet()->size(); }

void require_three_graph(const DomainSpec& d)
{
    if (!d.alphabet()->is_three_graph())
        throw ClassifierError("domain " + d.describe() + " is not a 3-graph");
}

bool in_age(const DomainSpec& d, const std::optional<FiniteStructure>& s) { return s && age_contains(d, *s); }

std::optional<FiniteStructure> triangle(const DomainSpec& d, Color a, Color b, Color c)
{
    if (!present(d, a) || !present(d, b) || !present(d, c))
        return std::nullopt;
    return make_triangle(d.alphabet(), a, b, c);
}

std::optional<FiniteStructure> clique(const DomainSpec& d, std::size_t k, Color c)
{
    if (!present(d, c))
        return k <= 1 ? std::optional(FiniteStructure(d.alphabet(), k)) : std::nullopt;
    return make_clique(d.alphabet(), k, c);
}

// Triangles with exactly two edges in `inside` and the third outside.
TransitivityCheck transitivity(const DomainSpec& d, Color x, Color y)
{
    TransitivityCheck t{x, y, true, !present(d, x) || !present(d, y), std::nullopt};
    for (Color p = 0; p < kColors; ++p)
        for (Color q = p; q < kColors; ++q)
            for (Color z = 0; z < kColors; ++z) {
                const bool p_in = p == x || p == y, q_in = q == x || q == y, z_in = z == x || z == y;
                if (!p_in || !q_in || z_in)
                    continue;
                if (auto tri = triangle(d, p, q, z); in_age(d, tri)) {
                    t.holds = false;
                    t.counterexample = tri;
                    return t;
                }
            }
    return t;
}

class PathSearch {
public:
    PathSearch(const DomainSpec& d, Color i, Color j, std::size_t bound) : d_(d), i_(i), j_(j), bound_(bound) {}

    PathResult run()
    {
        best_ = {0, FiniteStructure(d_.alphabet(), 1)};
        if (!age_contains(d_, best_.witness))
            return {0, FiniteStructure(d_.alphabet(), 0)};
        const FiniteStructure start = best_.witness;
        extend(start);
        return best_;
    }

private:
    bool edge(PairType t) const { return t == i_ || t == j_; }

    // Returns true once the bound is reached.
    bool extend(const FiniteStructure& s)
    {
        const std::size_t len = s.size() - 1;
        if (len > best_.length)
            best_ = {len, s};
        if (len >= bound_)
            return true;
        std::vector<std::string> labels(s.size());
        labels.back() = "end";
        if (!failed_.insert(canonical_labeling(s, labels).key).second)
            return false;
        const Vertex last = Vertex(s.size() - 1);
        for (const TypeRow& row : extension_rows(d_, s)) {
            bool ok = edge(row[last]);
            for (Vertex k = 0; k < last && ok; ++k)
                ok = !edge(row[k]);
            if (ok && extend(s.extended(row)))
                return true;
        }
        return false;
    }

    const DomainSpec& d_;
    Color i_, j_;
    std::size_t bound_;
    PathResult best_;
    std::unordered_set<CanonicalKey, CanonicalKeyHash> failed_;
};

} // namespace

std::string color_name(const DomainSpec& d, Color c)
{
    if (present(d, c))
        return d.alphabet()->name(c);
    return "C" + std::to_string(int(c) + 1) + " (empty)";
}

bool is_induced_path(const FiniteStructure& s, Color i, Color j)
{
    for (Vertex v = 1; v < s.size(); ++v)
        for (Vertex u = 0; u < v; ++u) {
            const bool edge = s.type(u, v) == i || s.type(u, v) == j;
            if (edge != (v == u + 1))
                return false;
        }
    return true;
}

PathResult longest_induced_path(const DomainSpec& d, Color i, Color j, std::size_t bound)
{
    if (bound < 1)
        throw ClassifierError("path bound must be at least 1");
    return PathSearch(d, i, j, bound).run();
}

bool CaseReport::b_witnessed() const
{
    return std::any_of(b.begin(), b.end(), [](const TransitivityCheck& t) { return t.holds; });
}

bool CaseReport::c_witnessed() const
{
    return std::any_of(c.begin(), c.end(), [](const CaseC& x) { return x.witnessed; });
}

bool CaseReport::d_witnessed() const
{
    return std::any_of(d.begin(), d.end(), [](const PathCheck& p) { return p.witnessed; });
}

CaseReport case_evidence(const DomainSpec& d, std::size_t bound)
{
    require_three_graph(d);
    if (bound < 3)
        throw ClassifierError("case bound must be at least 3");
    CaseReport r;
    r.domain = d.describe();
    r.bound = bound;
    for (Color c = 0; c < kColors; ++c)
        if (!present(d, c))
            r.empty_colors.push_back(c);

    // A: large c-cliques with triangles axc and acc, a and x different from c.
    for (Color c = 0; c < kColors && !r.a.witnessed; ++c) {
        auto k = clique(d, bound, c);
        if (!in_age(d, k))
            continue;
        for (Color a = 0; a < kColors && !r.a.witnessed; ++a) {
            if (a == c)
                continue;
            auto acc = triangle(d, a, c, c);
            if (!in_age(d, acc))
                continue;
            for (Color x = 0; x < kColors; ++x) {
                if (x == c)
                    continue;
                auto axc = triangle(d, a, x, c);
                if (in_age(d, axc)) {
                    r.a = {true, c, a, x, *k, *axc, *acc};
                    break;
                }
            }
        }
    }

    // B: x ∪ y a union of disjoint cliques.
    for (Color x = 0; x < kColors; ++x)
        for (Color y = x + 1; y < kColors; ++y)
            r.b.push_back(transitivity(d, x, y));

    // C: x a union of finitely many infinite cliques.
    for (Color x = 0; x < kColors; ++x) {
        CaseC c;
        c.x = x;
        TransitivityCheck t = transitivity(d, x, x);
        c.transitive = t.holds;
        c.vacuous = t.vacuous;
        c.counterexample = t.counterexample;
        c.large_clique = present(d, x) && in_age(d, clique(d, bound, x));
        c.classes = class_count_bound(d, x, bound);
        c.witnessed = c.transitive && c.large_clique && c.classes.exact;
        r.c.push_back(std::move(c));
    }

    // D: long induced paths in i ∪ j.
    for (Color i = 0; i < kColors; ++i)
        for (Color j = i; j < kColors; ++j) {
            PathCheck p{i, j, {}, false};
            if (present(d, i) || present(d, j))
                p.path = longest_induced_path(d, i, j, bound);
            else
                p.path = {0, FiniteStructure(d.alphabet(), 1)};
            p.witnessed = p.path.length >= bound;
            r.d.push_back(std::move(p));
        }
    return r;
}

std::string validate_report(const DomainSpec& d, const CaseReport& r)
{
    if (r.a.witnessed) {
        if (!age_contains(d, r.a.clique) || r.a.clique.size() < r.bound || !age_contains(d, r.a.triangle_axc) ||
            !age_contains(d, r.a.triangle_acc))
            return "case A witness is not in the age";
        for (Vertex v = 1; v < r.a.clique.size(); ++v)
            for (Vertex u = 0; u < v; ++u)
                if (r.a.clique.type(u, v) != r.a.c)
                    return "case A clique has a wrong edge";
        if (r.a.a == r.a.c || r.a.x == r.a.c)
            return "case A colors are not different from c";
        const auto colors = [](const FiniteStructure& t) {
            std::vector<PairType> v{t.type(0, 1), t.type(1, 2), t.type(0, 2)};
            std::sort(v.begin(), v.end());
            return v;
        };
        std::vector<PairType> axc{r.a.a, r.a.x, r.a.c}, acc{r.a.a, r.a.c, r.a.c};
        std::sort(axc.begin(), axc.end());
        std::sort(acc.begin(), acc.end());
        if (colors(r.a.triangle_axc) != axc || colors(r.a.triangle_acc) != acc)
            return "case A triangles have wrong colors";
    }
    for (const TransitivityCheck& t : r.b)
        if (t.counterexample && (t.holds || !age_contains(d, *t.counterexample)))
            return "case B counterexample is not in the age";
    for (const CaseC& c : r.c) {
        if (c.counterexample && !age_contains(d, *c.counterexample))
            return "case C counterexample is not in the age";
        if (c.witnessed && !age_contains(d, make_clique(d.alphabet(), r.bound, c.x)))
            return "case C clique is not in the age";
    }
    for (const PathCheck& p : r.d) {
        if (p.path.witness.size() != p.path.length + 1)
            return "case D witness has the wrong size";
        if (!age_contains(d, p.path.witness) || !is_induced_path(p.path.witness, p.i, p.j))
            return "case D witness is not an induced path in the age";
    }
    return {};
}

std::vector<FiniteStructure> age_members(const DomainSpec& d, std::size_t k)
{
    std::vector<FiniteStructure> level{FiniteStructure(d.alphabet(), 0)};
    for (std::size_t size = 0; size < k; ++size) {
        std::vector<FiniteStructure> next;
        std::unordered_set<CanonicalKey, CanonicalKeyHash> seen;
        for (const FiniteStructure& s : level)
            for (FiniteStructure& e : one_point_extensions(s, d))
                if (seen.insert(canonical_form(e)).second)
                    next.push_back(std::move(e));
        level = std::move(next);
    }
    return level;
}

std::pair<TypeRow, TypeRow> instance_rows(const AmalgamInstance& inst)
{
    if (!inst.is_singleton())
        throw DomainError("not a singleton instance");
    const std::size_t n = inst.shared.size();
    const auto extra_row = [&](const FiniteStructure& side, const EmbeddingWitness& h) {
        std::vector<bool> used(side.size(), false);
        for (Vertex v : h.map)
            used[v] = true;
        const Vertex extra = Vertex(std::find(used.begin(), used.end(), false) - used.begin());
        TypeRow row(n);
        for (Vertex a = 0; a < n; ++a)
            row[a] = side.type(h.map[a], extra);
        return row;
    };
    return {extra_row(inst.left, inst.into_left), extra_row(inst.right, inst.into_right)};
}

CanonicalKey instance_key(const AmalgamInstance& inst)
{
    const auto [left, right] = instance_rows(inst);
    const std::size_t n = inst.shared.size();
    const auto key = [&](const TypeRow& r1, const TypeRow& r2) {
        FiniteStructure s = inst.shared.extended(r1);
        TypeRow row2 = r2;
        row2.push_back(0);
        s = s.extended(row2);
        std::vector<std::string> labels(n + 2);
        labels[n] = "L";
        labels[n + 1] = "R";
        return canonical_labeling(s, labels).key;
    };
    return std::min(key(left, right), key(right, left));
}

std::vector<AmalgamInstance> audit_amalgamation(const DomainSpec& d, std::size_t max_shared, bool strong)
{
    if (max_shared < 1)
        throw ClassifierError("audit size must be at least 1");
    std::vector<AmalgamInstance> failures;
    std::unordered_set<CanonicalKey, CanonicalKeyHash> seen;
    for (std::size_t k = 0; k <= max_shared; ++k)
        for (const FiniteStructure& a : age_members(d, k)) {
            const auto rows = extension_rows(d, a);
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = i; j < rows.size(); ++j) {
                    AmalgamInstance inst = singleton_instance(a, rows[i], rows[j]);
                    if (!seen.insert(instance_key(inst)).second)
                        continue;
                    if (!solve_amalgam(inst, d, strong))
                        failures.push_back(std::move(inst));
                }
        }
    return failures;
}

} // namespace dnets
