#include "dnets/extensions.hpp"

#include <algorithm>
#include <unordered_set>

namespace dnets {

std::vector<FiniteStructure> one_point_extensions(const FiniteStructure& s, const DomainSpec& d)
{
    std::vector<FiniteStructure> out;
    std::unordered_set<CanonicalKey, CanonicalKeyHash> seen;
    std::vector<std::string> labels(s.size() + 1);
    labels.back() = "*";
    for (const auto& row : extension_rows(d, s)) {
        FiniteStructure ext = s.extended(row);
        if (seen.insert(canonical_labeling(ext, labels).key).second)
            out.push_back(std::move(ext));
    }
    return out;
}

AmalgamInstance singleton_instance(const FiniteStructure& shared, const TypeRow& left_row, const TypeRow& right_row)
{
    AmalgamInstance inst{shared, shared.extended(left_row), shared.extended(right_row), {}, {}};
    inst.into_left.map.resize(shared.size());
    for (Vertex v = 0; v < shared.size(); ++v)
        inst.into_left.map[v] = v;
    inst.into_right = inst.into_left;
    return inst;
}

void validate_instance(const AmalgamInstance& inst, const DomainSpec& d)
{
    if (!is_embedding(inst.shared, inst.left, inst.into_left) ||
        !is_embedding(inst.shared, inst.right, inst.into_right))
        throw DomainError("amalgamation instance: invalid embedding");
    if (!age_contains(d, inst.shared) || !age_contains(d, inst.left) || !age_contains(d, inst.right))
        throw DomainError("amalgamation instance: structure outside the age");
}

namespace {

constexpr Vertex kUnset = Vertex(-1);

class AmalgamSearch {
public:
    AmalgamSearch(const AmalgamInstance& inst, const DomainSpec& d, bool strong)
        : d_(d), strong_(strong), L_(inst.left), R_(inst.right)
    {
        image_of_right_.assign(R_.size(), kUnset);
        std::vector<bool> left_shared(L_.size(), false);
        for (Vertex a = 0; a < inst.shared.size(); ++a) {
            image_of_right_[inst.into_right.map[a]] = inst.into_left.map[a];
            left_shared[inst.into_left.map[a]] = true;
        }
        for (Vertex r = 0; r < R_.size(); ++r)
            if (image_of_right_[r] == kUnset)
                extras_.push_back(r);
        for (Vertex l = 0; l < L_.size(); ++l)
            if (!left_shared[l])
                free_left_.push_back(l);
    }

    std::optional<AmalgamSolution> run()
    {
        glue(0);
        return result_;
    }

private:
    // Decide for extras_[i] whether it is fresh or glued onto a free left vertex.
    bool glue(std::size_t i)
    {
        if (i == extras_.size())
            return complete();
        const Vertex x = extras_[i];
        image_of_right_[x] = kUnset;
        if (glue(i + 1))
            return true;
        if (strong_)
            return false;
        for (Vertex l : free_left_) {
            if (std::find(image_of_right_.begin(), image_of_right_.end(), l) != image_of_right_.end())
                continue;
            image_of_right_[x] = l;
            if (consistent_glue(x) && glue(i + 1))
                return true;
            image_of_right_[x] = kUnset;
        }
        return false;
    }

    bool consistent_glue(Vertex x) const
    {
        for (Vertex z = 0; z < R_.size(); ++z) {
            if (z == x || image_of_right_[z] == kUnset)
                continue;
            if (R_.type(z, x) != L_.type(image_of_right_[z], image_of_right_[x]))
                return false;
        }
        return true;
    }

    bool complete()
    {
        // Fresh extras become new vertices after the left ones.
        std::vector<Vertex> g2 = image_of_right_;
        Vertex next = Vertex(L_.size());
        for (Vertex x : extras_)
            if (g2[x] == kUnset)
                g2[x] = next++;
        const std::size_t n = next;
        FiniteStructure c(L_.alphabet_ref(), n);
        std::vector<Vertex> right_at(n, kUnset);
        for (Vertex r = 0; r < R_.size(); ++r)
            right_at[g2[r]] = r;
        for (Vertex v = 1; v < L_.size(); ++v)
            for (Vertex u = 0; u < v; ++u)
                c.set_type(u, v, L_.type(u, v));
        std::vector<std::pair<Vertex, Vertex>> open;
        for (Vertex v = Vertex(L_.size()); v < n; ++v)
            for (Vertex u = 0; u < v; ++u) {
                if (right_at[u] != kUnset)
                    c.set_type(u, v, R_.type(right_at[u], right_at[v]));
                else
                    open.emplace_back(u, v);
            }
        const std::size_t k = L_.alphabet().size();
        std::vector<PairType> choice(open.size(), 0);
        while (true) {
            for (std::size_t i = 0; i < open.size(); ++i)
                c.set_type(open[i].first, open[i].second, choice[i]);
            if (age_contains(d_, c)) {
                AmalgamSolution sol{c, {}, {}};
                sol.from_left.map.resize(L_.size());
                for (Vertex l = 0; l < L_.size(); ++l)
                    sol.from_left.map[l] = l;
                sol.from_right.map = g2;
                result_ = std::move(sol);
                return true;
            }
            std::size_t i = open.size();
            while (i > 0 && std::size_t(choice[i - 1]) + 1 == k)
                choice[--i] = 0;
            if (i == 0)
                return false;
            ++choice[i - 1];
        }
    }

    const DomainSpec& d_;
    bool strong_;
    const FiniteStructure& L_;
    const FiniteStructure& R_;
    std::vector<Vertex> image_of_right_;
    std::vector<Vertex> extras_;
    std::vector<Vertex> free_left_;
    std::optional<AmalgamSolution> result_;
};

} // namespace

std::optional<AmalgamSolution> solve_amalgam(const AmalgamInstance& inst, const DomainSpec& d, bool strong)
{
    validate_instance(inst, d);
    return AmalgamSearch(inst, d, strong).run();
}

bool is_solution(const AmalgamInstance& inst, const AmalgamSolution& sol, const DomainSpec& d, bool strong)
{
    if (!is_embedding(inst.left, sol.joined, sol.from_left) || !is_embedding(inst.right, sol.joined, sol.from_right))
        return false;
    if (compose(inst.into_left, sol.from_left) != compose(inst.into_right, sol.from_right))
        return false;
    if (!age_contains(d, sol.joined))
        return false;
    if (strong) {
        std::vector<bool> in_left(sol.joined.size(), false);
        for (Vertex v : sol.from_left.map)
            in_left[v] = true;
        std::size_t common = 0;
        for (Vertex v : sol.from_right.map)
            common += in_left[v];
        if (common != inst.shared.size())
            return false;
    }
    return true;
}

} // namespace dnets
