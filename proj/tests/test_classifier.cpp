#include "oracles.hpp"

#include "dnets/classifier.hpp"
#include "dnets/patterns.hpp"

#include <doctest.h>

using namespace dnets;

namespace {

DomainSpec free_graphs() { return parse_domain("forbidden"); }

const PathCheck& path_check(const CaseReport& r, Color i, Color j)
{
    for (const auto& p : r.d)
        if (p.i == i && p.j == j)
            return p;
    throw std::logic_error("missing path check");
}

} // namespace

TEST_SUITE("classifier")
{
    TEST_CASE("grid staircase has six edges with matching coordinates")
    {
        const DomainSpec g = DomainSpec::grid();
        const PathResult p = longest_induced_path(g, 0, 1, 6);
        CHECK(p.length == 6);
        REQUIRE(p.witness.size() == 7);
        CHECK(is_induced_path(p.witness, 0, 1));
        const auto pts = oracle::grid_coordinates(p.witness);
        REQUIRE(pts);
        CHECK(oracle::grid_structure(g.alphabet(), *pts) == p.witness);
    }

    TEST_CASE("grid has no long induced =1 path")
    {
        const PathResult p = longest_induced_path(DomainSpec::grid(), 0, 0, 6);
        CHECK(p.length == 1);
    }

    TEST_CASE("free graphs have long monochromatic induced paths")
    {
        const DomainSpec d = free_graphs();
        const PathResult p = longest_induced_path(d, 0, 0, 6);
        CHECK(p.length == 6);
        const PairType edges[] = {0, 0, 0, 0, 0, 0};
        CHECK(age_contains(d, make_path(d.alphabet(), edges, d.no_edge())));
        CHECK(is_induced_path(p.witness, 0, 0));
        CHECK(age_contains(d, p.witness));
    }

    TEST_CASE("grid report: D witnessed and valid")
    {
        const DomainSpec g = DomainSpec::grid();
        const CaseReport r = case_evidence(g, 6);
        CHECK(r.d_witnessed());
        CHECK(path_check(r, 0, 1).witnessed);
        CHECK(validate_report(g, r).empty());
        // Brute force: =1 and =2 each close triangles only with themselves.
        for (const auto& t : r.b)
            if (t.counterexample)
                CHECK(oracle::grid_coordinates(*t.counterexample));
    }

    TEST_CASE("nested equality as a 3-graph: B with C1 and the empty C3")
    {
        const DomainSpec d = DomainSpec::nested_equality();
        const CaseReport r = case_evidence(d, 6);
        CHECK(r.empty_colors == std::vector<Color>{2});
        bool found = false;
        for (const auto& t : r.b)
            if (t.x == 0 && t.y == 2) {
                found = true;
                CHECK(t.holds);
                CHECK(t.vacuous);
            }
        CHECK(found);
        CHECK(r.b_witnessed());
        CHECK(validate_report(d, r).empty());
    }

    TEST_CASE("striped: C with three classes")
    {
        const DomainSpec d = DomainSpec::striped(3, 0);
        const CaseReport r = case_evidence(d, 6);
        CHECK(r.c_witnessed());
        CHECK(r.c[0].witnessed);
        CHECK(r.c[0].classes == ClassCountBound{true, 3});
        CHECK(validate_report(d, r).empty());
    }

    TEST_CASE("free graphs: A witnessed")
    {
        const DomainSpec d = free_graphs();
        const CaseReport r = case_evidence(d, 6);
        CHECK(r.a.witnessed);
        CHECK(r.a.clique.size() == 6);
        CHECK(validate_report(d, r).empty());
    }

    TEST_CASE("corrupted reports fail validation")
    {
        const DomainSpec g = DomainSpec::grid();
        CaseReport r = case_evidence(g, 6);
        for (auto& p : r.d)
            if (p.i == 0 && p.j == 1)
                p.path.witness.set_type(0, 2, 0);
        CHECK_FALSE(validate_report(g, r).empty());
    }

    TEST_CASE("bad inputs are rejected")
    {
        CHECK_THROWS_AS(case_evidence(DomainSpec::dense_order(), 6), ClassifierError);
        CHECK_THROWS_AS(case_evidence(DomainSpec::grid(), 2), ClassifierError);
    }

    TEST_CASE("grid amalgamation audit")
    {
        const DomainSpec g = DomainSpec::grid();
        const auto strong = audit_amalgamation(g, 2, true);
        CHECK_FALSE(strong.empty());
        const FiniteStructure shared(g.alphabet(), 2, 2);
        const CanonicalKey key = instance_key(singleton_instance(shared, {0, 1}, {0, 1}));
        bool found = false;
        for (const auto& inst : strong)
            found = found || instance_key(inst) == key;
        CHECK(found);
        CHECK(audit_amalgamation(g, 2, false).empty());
    }

    TEST_CASE("free graphs amalgamate strongly")
    {
        CHECK(audit_amalgamation(free_graphs(), 2, true).empty());
    }

    TEST_CASE("age members match brute-force counts")
    {
        const DomainSpec g = DomainSpec::grid();
        for (std::size_t k = 0; k <= 3; ++k) {
            std::vector<FiniteStructure> orbits;
            for (const auto& s : oracle::all_structures(g.alphabet(), k))
                if (oracle::grid_coordinates(s) &&
                    std::none_of(orbits.begin(), orbits.end(), [&](const auto& o) { return oracle::isomorphic(o, s); }))
                    orbits.push_back(s);
            CHECK(age_members(g, k).size() == orbits.size());
        }
    }

    TEST_CASE("instance keys are symmetric")
    {
        const DomainSpec g = DomainSpec::grid();
        const FiniteStructure shared(g.alphabet(), 2, 0);
        CHECK(instance_key(singleton_instance(shared, {1, 2}, {2, 1})) ==
              instance_key(singleton_instance(shared, {2, 1}, {1, 2})));
        CHECK(color_name(DomainSpec::nested_equality(), 2) == "C3 (empty)");
    }
}
