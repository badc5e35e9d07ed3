#include "oracles.hpp"

#include "dnets/reduction.hpp"

#include <doctest.h>

using namespace dnets;

namespace {

bool has_prefix(const std::string& s, const char* p) { return s.rfind(p, 0) == 0; }

} // namespace

TEST_SUITE("reduction")
{
    TEST_CASE("machine text round-trips")
    {
        const MinskyMachine m = parse_machine(read_file(std::filesystem::path(DNETS_SAMPLES) / "add.mm"));
        CHECK(m.states.size() == 5);
        CHECK(m.states[m.init] == "s0");
        CHECK_FALSE(m.program[m.halt]);
        const MinskyMachine again = parse_machine(unparse_machine(m));
        CHECK(unparse_machine(again) == unparse_machine(m));
    }

    TEST_CASE("interpreter: dec loop drains c1")
    {
        const MinskyMachine m = parse_machine("state q0 q1 q2 q3 qh\ninit q0\nhalt qh\n"
                                              "q0: inc c1 -> q1\nq1: inc c1 -> q2\n"
                                              "q2: test c1 ? qh : q3\nq3: test c1 ? qh : q2\n");
        const MachineRun r = run_machine(m, 100);
        CHECK(r.halted);
        CHECK(r.steps == 5);
        CHECK(r.c1 == 0);
        CHECK(r.c2 == 0);
    }

    TEST_CASE("interpreter respects fuel")
    {
        const MinskyMachine m = parse_machine(read_file(std::filesystem::path(DNETS_SAMPLES) / "count_up.mm"));
        const MachineRun r = run_machine(m, 40);
        CHECK_FALSE(r.halted);
        CHECK(r.steps == 40);
        CHECK(r.c1 == 40);
    }

    TEST_CASE("malformed machines are rejected")
    {
        CHECK_THROWS_AS(parse_machine("state q0\ninit q0\nhalt q0\nq0: inc c1 -> q0\n"), ParseError);
        CHECK_THROWS_AS(parse_machine("state q0 qh\ninit q0\nhalt qh\nq0: inc c3 -> qh\n"), ParseError);
        CHECK_THROWS_AS(parse_machine("state q0 qh\ninit q0\nhalt qh\n"), ParseError);
        CHECK_THROWS_AS(parse_machine("state q0 qh\ninit q0\nhalt qh\nq0: inc c1 -> q9\n"), ParseError);
    }

    TEST_CASE("compiled net has the counter places, the states and one transition family per instruction")
    {
        const MinskyMachine m = parse_machine("state q0 q1 qh\ninit q0\nhalt qh\n"
                                              "q0: test c1 ? qh : q1\nq1: inc c1 -> q0\n");
        const CompiledNet cn = compile(m);
        const std::vector<std::string> fixed{"b1", "m1", "e1", "b2", "m2", "e2", "p", "r"};
        CHECK(std::equal(fixed.begin(), fixed.end(), cn.net.places.begin()));
        for (const auto& q : m.states)
            CHECK(cn.net.find_place(q));
        std::size_t z = 0, d = 0, i = 0, t = 0, i2 = 0;
        for (const auto& tr : cn.net.transitions) {
            z += has_prefix(tr.name, "z_");
            d += has_prefix(tr.name, "d_");
            i += has_prefix(tr.name, "i_");
            t += has_prefix(tr.name, "t_");
            i2 += has_prefix(tr.name, "i'_");
        }
        CHECK(z >= 1);
        CHECK(d >= 1);
        CHECK(i >= 1);
        CHECK(t >= 1);
        CHECK(i2 >= 1);
        CHECK(cn.net.domain.kind() == DomainKind::Grid);
        REQUIRE(cn.net.initial);
        CHECK(decode_counters(cn, *cn.net.initial) == std::make_pair(std::size_t(0), std::size_t(0)));
        CHECK(control_state(cn, *cn.net.initial) == m.init);
        CHECK(age_contains(cn.net.domain, cn.net.initial->carrier()));
    }

    TEST_CASE("zero test reaches the halt place in one step")
    {
        const MinskyMachine m = parse_machine("state q0 qh\ninit q0\nhalt qh\nq0: test c1 ? qh : q0\n");
        const CompiledNet cn = compile(m);
        const auto events = enabled_firings(cn.net, *cn.net.initial);
        bool halted = false;
        for (const auto& e : events) {
            const Configuration next = fire(cn.net, *cn.net.initial, e);
            if (next.tokens_on(cn.halt_place)) {
                halted = true;
                CHECK(has_prefix(cn.net.transitions[e.transition].name, "z_"));
                CHECK(decode_counters(cn, next) == std::make_pair(std::size_t(0), std::size_t(0)));
            }
        }
        CHECK(halted);
    }

    TEST_CASE("after an increment the zero test is disabled")
    {
        const MinskyMachine m = parse_machine("state q0 q1 q2 qh\ninit q0\nhalt qh\n"
                                              "q0: inc c1 -> q1\nq1: test c1 ? qh : q2\nq2: inc c2 -> qh\n");
        const CompiledNet cn = compile(m);
        const ExplorationTree tree = simulate(cn.net, *cn.net.initial, ExhaustivePolicy{6, 200000});
        CHECK_FALSE(tree.truncated);
        std::size_t at_q1 = 0;
        for (const TreeNode& n : tree.nodes) {
            if (control_state(cn, n.config) != 1 || n.config.tokens_on(cn.counter_places[6]) ||
                n.config.tokens_on(cn.counter_places[7]))
                continue;
            ++at_q1;
            for (const auto& e : enabled_firings(cn.net, n.config))
                CHECK_FALSE(has_prefix(cn.net.transitions[e.transition].name, "z_"));
        }
        CHECK(at_q1 > 0);
    }

    TEST_CASE("reachable encodings at depth 8 never exceed the machine's counters")
    {
        const MinskyMachine m = parse_machine(read_file(std::filesystem::path(DNETS_SAMPLES) / "count_up.mm"));
        const CompiledNet cn = compile(m);
        const ExplorationTree tree = simulate(cn.net, *cn.net.initial, ExhaustivePolicy{8, 200000});
        std::size_t decoded = 0;
        for (const TreeNode& n : tree.nodes)
            if (auto v = decode_counters(cn, n.config)) {
                ++decoded;
                CHECK(v->second == 0);
                CHECK(v->first <= n.depth);
            }
        CHECK(decoded > 1);
    }
}
