// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Time limits are wall-clock seconds per criterion.

#include "oracles.hpp"

#include "dnets/analysis.hpp"
#include "dnets/classifier.hpp"
#include "dnets/reduction.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_set>

using namespace dnets;

namespace {

struct Check {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    Check (*check)();
};

// 1 --------------------------------------------------------------------------

const char* kFigureNet = R"(domain equality
place p1 p2
transition t1
  out p1: x1 x2
  guard x1 != x2
transition t2
  in p1: y1
  in p2: y2
  out p1: z1
  out p2: z2 z3
  guard y1 = y2 & y1 != z3 & z1 = z2
)";

Check figure_replay()
{
    const DataNet net = parse_net(kFigureNet);
    if (net.places.size() != 2 || net.transitions.size() != 2)
        return {false, "figure net has the wrong shape"};
    const Configuration before = parse_configuration(net, "atoms v3 v1 v5\np1: v3 v1 v1\np2: v5 v3");
    const Configuration expected = parse_configuration(net, "atoms v4 v1 v5 v6\np1: v4 v1 v1\np2: v4 v5 v6");
    const std::size_t t2 = *net.find_transition("t2");
    const Transition& t = net.transitions[t2];
    // Mode: y1 = y2 = the value carried by both places, z1 = z2 fresh, z3 fresh and different.
    std::size_t matches = 0;
    std::optional<Configuration> after;
    for (const FiringEvent& e : enabled_firings(net, before, t2)) {
        const auto var = [&](const char* name) {
            return e.valuation[std::find(t.vars.begin(), t.vars.end(), name) - t.vars.begin()];
        };
        const Vertex y1 = var("y1"), y2 = var("y2"), z1 = var("z1"), z2 = var("z2"), z3 = var("z3");
        const auto fresh = [&](Vertex v) { return v >= before.size(); };
        if (y1 == y2 && before.count(y1, 0) == 1 && before.count(y1, 1) == 1 && z1 == z2 && fresh(z1) &&
            fresh(z3) && z3 != z1) {
            ++matches;
            after = fire(net, before, e);
        }
    }
    if (matches != 1)
        return {false, "documented mode matched " + std::to_string(matches) + " events"};
    if (after->key() != expected.key())
        return {false, "successor key differs from the after-marking"};
    return {true, "successor key matches {p1:{4,1,1}, p2:{4,5,6}}"};
}

// 2 --------------------------------------------------------------------------

// The poset 0 < 1, 0 < 2 with 1 and 2 incomparable.
bool vee_leq(int a, int b) { return a == b || a == 0; }

std::vector<std::vector<int>> sequences(std::size_t max_len)
{
    std::vector<std::vector<int>> out{{}};
    std::vector<std::vector<int>> level{{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<int>> next;
        for (const auto& s : level)
            for (int x = 0; x < 3; ++x) {
                next.push_back(s);
                next.back().push_back(x);
            }
        out.insert(out.end(), next.begin(), next.end());
        level = std::move(next);
    }
    return out;
}

Check multiset_oracle()
{
    const auto all = sequences(4);
    std::size_t cases = 0, mismatches = 0;
    for (const auto& a : all)
        for (const auto& b : all) {
            ++cases;
            mismatches += dnets::multiset_embed(a, b, vee_leq) != oracle::multiset_embed(a, b, vee_leq);
        }
    return {mismatches == 0 && cases >= 1000,
            std::to_string(cases) + " pairs, " + std::to_string(mismatches) + " mismatches"};
}

// 3 --------------------------------------------------------------------------

Check equality_isomorphism()
{
    const DomainSpec eq = DomainSpec::equality();
    std::vector<LabeledStructure<std::size_t>> all;
    for (std::size_t n = 0; n <= 4; ++n)
        for (std::size_t bits = 0; bits < (std::size_t(1) << n); ++bits) {
            LabeledStructure<std::size_t> s{FiniteStructure(eq.alphabet(), n), {}};
            for (std::size_t v = 0; v < n; ++v)
                s.labels.push_back((bits >> v) & 1);
            all.push_back(std::move(s));
        }
    std::size_t cases = 0, mismatches = 0;
    for (const auto& a : all)
        for (const auto& b : all) {
            ++cases;
            mismatches += lifted_embed(a, b, natural_leq) != oracle::multiset_embed(a.labels, b.labels, natural_leq);
        }
    return {mismatches == 0, std::to_string(cases) + " pairs, " + std::to_string(mismatches) + " mismatches"};
}

// 4 --------------------------------------------------------------------------

Check grid_staircase()
{
    const DomainSpec g = DomainSpec::grid();
    const PathResult p = longest_induced_path(g, 0, 1, 6);
    if (p.length != 6)
        return {false, "length " + std::to_string(p.length)};
    if (!is_induced_path(p.witness, 0, 1))
        return {false, "witness is not an induced =1/=2 path"};
    const auto pts = oracle::grid_coordinates(p.witness);
    if (!pts)
        return {false, "witness has no grid coordinates"};
    if (!(oracle::grid_structure(g.alphabet(), *pts) == p.witness))
        return {false, "recomputed pair types differ"};
    return {true, "length 6, pair types match recomputed coordinates"};
}

// 5 --------------------------------------------------------------------------

Check grid_amalgamation()
{
    const DomainSpec g = DomainSpec::grid();
    const auto strong = audit_amalgamation(g, 2, true);
    const FiniteStructure shared(g.alphabet(), 2, 2);
    const CanonicalKey key = instance_key(singleton_instance(shared, {0, 1}, {0, 1}));
    const bool has_instance =
        std::any_of(strong.begin(), strong.end(), [&](const AmalgamInstance& i) { return instance_key(i) == key; });
    const auto plain = audit_amalgamation(g, 3, false);
    std::ostringstream os;
    os << strong.size() << " strong failures (u !=12 v instance " << (has_instance ? "present" : "missing") << "), "
       << plain.size() << " non-strong failures at |A| <= 3";
    return {!strong.empty() && has_instance && plain.empty(), os.str()};
}

// 6, 7 -----------------------------------------------------------------------

struct GeneratedNet {
    DataNet net;
    oracle::Tokens init;
};

std::vector<GeneratedNet> net_family()
{
    std::mt19937_64 rng(20240601);
    std::vector<GeneratedNet> out;
    while (out.size() < 24) {
        DataNet net = parse_net(oracle::random_net(rng, true, 3, 3));
        oracle::Tokens init = oracle::random_tokens(rng, net.places.size(), 3);
        out.push_back({std::move(net), std::move(init)});
    }
    return out;
}

Check backward_forward()
{
    AnalysisBudget budget;
    budget.max_nodes = 100000;
    budget.max_basis = 20000;
    std::size_t nets = 0, checks = 0, coverable = 0, disagreements = 0, bad_certificates = 0;
    for (const GeneratedNet& g : net_family()) {
        ++nets;
        const auto reach = oracle::reachable(g.net, g.init);
        const Configuration c0 = oracle::to_configuration(g.net, g.init);
        for (const oracle::Tokens& m : oracle::universe(g.net.places.size(), 2)) {
            ++checks;
            const bool expected = std::any_of(reach.begin(), reach.end(), [&](const auto& r) { return oracle::covers(m, r); });
            coverable += expected;
            const std::vector<Configuration> target{oracle::to_configuration(g.net, m)};
            const Verdict v = coverability(g.net, c0, target, budget);
            const bool got_known = v.outcome != dnets::Outcome::Inconclusive;
            if (!got_known || (v.outcome == dnets::Outcome::Proven) != expected)
                ++disagreements;
            else if (!check_certificate(g.net, c0, target, v).empty())
                ++bad_certificates;
        }
    }
    std::ostringstream os;
    os << nets << " nets, " << checks << " targets (" << coverable << " coverable), " << disagreements << " disagreements, " << bad_certificates
       << " invalid certificates";
    return {nets >= 20 && disagreements == 0 && bad_certificates == 0, os.str()};
}

Check pred_oracle()
{
    std::size_t nets = 0, checks = 0, positives = 0, mismatches = 0;
    for (const GeneratedNet& g : net_family()) {
        ++nets;
        const std::size_t places = g.net.places.size();
        const auto universe = oracle::universe(places, 4, true);
        std::vector<Configuration> confs;
        for (const auto& c : universe)
            confs.push_back(oracle::to_configuration(g.net, c));
        const auto targets = oracle::universe(places, 2, true);
        for (std::size_t t = 0; t < g.net.transitions.size(); ++t) {
            std::vector<std::set<oracle::Tokens>> succ;
            for (const auto& c : universe)
                succ.push_back(oracle::successors(g.net, t, c));
            for (const oracle::Tokens& m : targets) {
                const auto basis = pred_basis(g.net, t, oracle::to_configuration(g.net, m));
                for (std::size_t k = 0; k < universe.size(); ++k) {
                    ++checks;
                    const bool pred =
                        std::any_of(succ[k].begin(), succ[k].end(), [&](const auto& s) { return oracle::covers(m, s); });
                    positives += pred;
                    mismatches += pred != covered_by(basis, confs[k]);
                }
            }
        }
    }
    std::ostringstream os;
    os << nets << " nets, " << checks << " (t, m, c) checks (" << positives << " predecessors), " << mismatches << " mismatches";
    return {nets >= 20 && mismatches == 0, os.str()};
}

// 8, 9 -----------------------------------------------------------------------

struct SuiteMachine {
    const char* name;
    const char* text;
};

const SuiteMachine kHalting[] = {
    {"zero-test", "state q0 qh\ninit q0\nhalt qh\nq0: test c1 ? qh : q0\n"},
    {"single-inc", "state q0 qh\ninit q0\nhalt qh\nq0: inc c1 -> qh\n"},
    {"transfer", "state s0 s1 s2 s3 qh\ninit s0\nhalt qh\ns0: inc c1 -> s1\ns1: inc c1 -> s2\n"
                 "s2: test c1 ? qh : s3\ns3: inc c2 -> s2\n"},
    {"drain", "state q0 q1 q2 q3 qh\ninit q0\nhalt qh\nq0: inc c1 -> q1\nq1: inc c1 -> q2\n"
              "q2: test c1 ? qh : q3\nq3: test c1 ? qh : q2\n"},
    {"two-counters", "state q0 q1 q2 q3 qh\ninit q0\nhalt qh\nq0: inc c2 -> q1\nq1: inc c1 -> q2\n"
                     "q2: test c2 ? q3 : q2\nq3: test c1 ? qh : q3\n"},
    {"count-to-three", "state q0 q1 q2 q3 qh\ninit q0\nhalt qh\nq0: inc c1 -> q1\nq1: inc c1 -> q2\n"
                       "q2: inc c1 -> q3\nq3: test c1 ? qh : q3\n"},
};

const SuiteMachine kLooping[] = {
    {"count-up", "state q0 qh\ninit q0\nhalt qh\nq0: inc c1 -> q0\n"},
    {"spin", "state q0 qh\ninit q0\nhalt qh\nq0: test c1 ? q0 : q0\n"},
    {"inc-dec", "state q0 q1 qh\ninit q0\nhalt qh\nq0: inc c1 -> q1\nq1: test c1 ? q0 : q0\n"},
    {"blocked", "state q0 q1 qh\ninit q0\nhalt qh\nq0: test c2 ? q1 : qh\nq1: inc c1 -> q0\n"},
};

constexpr std::size_t kMachineFuel = 50;
constexpr std::size_t kNetDepth = 300;
constexpr std::size_t kNetNodes = 50000;

struct Exploration {
    bool halt_marked = false;
    std::size_t nodes = 0;
    std::size_t depth = 0;
};

// Breadth-first over distinct configurations, stopping when the halt place is marked.
Exploration explore(const CompiledNet& cn)
{
    Exploration r;
    std::unordered_set<CanonicalKey, CanonicalKeyHash> seen{cn.net.initial->key()};
    std::vector<Configuration> layer{*cn.net.initial};
    while (!layer.empty() && r.depth < kNetDepth && seen.size() < kNetNodes) {
        ++r.depth;
        std::vector<Configuration> next;
        for (const Configuration& c : layer)
            for (const FiringEvent& e : enabled_firings(cn.net, c)) {
                Configuration s = fire(cn.net, c, e);
                if (s.tokens_on(cn.halt_place)) {
                    r.halt_marked = true;
                    r.nodes = seen.size();
                    return r;
                }
                if (seen.insert(s.key()).second)
                    next.push_back(std::move(s));
            }
        layer = std::move(next);
    }
    r.nodes = seen.size();
    return r;
}

Check reduction_fidelity()
{
    std::size_t halting = 0, looping = 0, wrong = 0;
    std::string failures;
    const auto run = [&](const SuiteMachine& sm) {
        const MinskyMachine m = parse_machine(sm.text);
        const MachineRun mr = run_machine(m, kMachineFuel);
        const Exploration ex = explore(compile(m));
        (mr.halted ? halting : looping) += 1;
        if (ex.halt_marked != mr.halted) {
            ++wrong;
            failures += std::string(" ") + sm.name;
        }
    };
    for (const auto& sm : kHalting)
        run(sm);
    for (const auto& sm : kLooping)
        run(sm);
    std::ostringstream os;
    os << halting << " halting, " << looping << " looping, " << wrong << " mismatches" << failures;
    return {halting >= 6 && looping >= 4 && wrong == 0, os.str()};
}

Check reduction_termination()
{
    AnalysisBudget budget;
    budget.max_nodes = 20000;
    std::ostringstream os;
    bool ok = true;

    const CompiledNet loop = compile(parse_machine(kLooping[0].text));
    const Verdict v = termination(loop.net, *loop.net.initial, budget);
    const bool refuted = v.outcome == dnets::Outcome::Refuted && check_certificate(loop.net, *loop.net.initial, {}, v).empty();
    ok = ok && refuted;
    os << "count-up: " << to_string(v.outcome) << " (" << v.result << ", " << v.stats.nodes << " nodes, depth "
       << v.stats.depth << ")";

    // Diagnostic only: configurations of the machine run decoded at q0, by counter value.
    std::map<std::size_t, Configuration> by_counter;
    {
        std::unordered_set<CanonicalKey, CanonicalKeyHash> seen{loop.net.initial->key()};
        std::vector<Configuration> layer{*loop.net.initial};
        for (std::size_t d = 0; d < 60 && !layer.empty(); ++d) {
            std::vector<Configuration> next;
            for (const Configuration& c : layer) {
                if (auto n = decode_counters(loop, c))
                    by_counter.emplace(n->first, c);
                for (const FiringEvent& e : enabled_firings(loop.net, c))
                    if (Configuration s = fire(loop.net, c, e); seen.insert(s.key()).second)
                        next.push_back(std::move(s));
            }
            layer = std::move(next);
        }
    }
    std::size_t comparable = 0;
    for (const auto& [i, a] : by_counter)
        for (const auto& [j, b] : by_counter)
            comparable += i < j && config_leq(a, b);
    os << "; decoded run configurations for c1 = 0.." << (by_counter.empty() ? 0 : by_counter.rbegin()->first)
       << ": " << comparable << " comparable pairs";

    std::size_t proven = 0;
    for (const auto& sm : kHalting) {
        const CompiledNet cn = compile(parse_machine(sm.text));
        const Verdict h = termination(cn.net, *cn.net.initial, budget);
        if (h.outcome == dnets::Outcome::Proven)
            ++proven;
        else
            os << "; " << sm.name << ": " << to_string(h.outcome);
    }
    ok = ok && proven == std::size(kHalting);
    os << "; halting suite proven " << proven << "/" << std::size(kHalting);
    return {ok, os.str()};
}

// 10 -------------------------------------------------------------------------

Check classifier_coverage()
{
    std::ostringstream os;
    bool ok = true;
    const auto report = [&](const DomainSpec& d, const char* label, bool expected) {
        const CaseReport r = case_evidence(d, 6);
        const std::string invalid = validate_report(d, r);
        ok = ok && expected && invalid.empty();
        os << label << (expected ? " ok" : " missing") << (invalid.empty() ? "" : " (invalid: " + invalid + ")") << "; ";
        return r;
    };
    const DomainSpec grid = DomainSpec::grid();
    report(grid, "grid D", case_evidence(grid, 6).d_witnessed());

    const DomainSpec nested = DomainSpec::nested_equality();
    const CaseReport nr = case_evidence(nested, 6);
    const bool b13 = std::any_of(nr.b.begin(), nr.b.end(), [](const auto& t) { return t.x == 0 && t.y == 2 && t.holds; });
    report(nested, "nested B(C1,C3)", b13);

    const DomainSpec striped = DomainSpec::striped(3, 0);
    const CaseReport sr = case_evidence(striped, 6);
    const bool c3 = sr.c[0].witnessed && sr.c[0].classes == ClassCountBound{true, 3};
    report(striped, "striped C(k=3)", c3);

    const DomainSpec free = parse_domain("forbidden");
    report(free, "forbidden(none) A", case_evidence(free, 6).a.witnessed);
    return {ok, os.str()};
}

// 11 -------------------------------------------------------------------------

Check strong_monotonicity()
{
    std::mt19937_64 rng(99);
    std::size_t instances = 0, steps = 0, violations = 0;
    while (instances < 200) {
        const DataNet net = parse_net(oracle::random_net(rng, false, 3, 3));
        const oracle::Tokens big = oracle::random_tokens(rng, net.places.size(), 4);
        // Drop a random sub-multiset of tokens to get c ⊴ c'.
        oracle::Tokens small = big;
        for (auto& row : small)
            for (auto& k : row)
                k = std::uniform_int_distribution<std::uint32_t>(0, k)(rng);
        small = oracle::normalize(small);
        const Configuration c = oracle::to_configuration(net, small), c2 = oracle::to_configuration(net, big);
        if (!config_leq(c, c2) || !oracle::covers(small, big)) {
            ++violations;
            ++instances;
            continue;
        }
        ++instances;
        std::vector<Configuration> upper;
        for (const FiringEvent& e : enabled_firings(net, c2))
            upper.push_back(fire(net, c2, e));
        for (const FiringEvent& e : enabled_firings(net, c)) {
            ++steps;
            const Configuration s = fire(net, c, e);
            const bool matched = std::any_of(upper.begin(), upper.end(), [&](const Configuration& u) {
                return u.tokens() >= s.tokens() && config_leq(s, u) && oracle::covers(oracle::tokens_of(s), oracle::tokens_of(u));
            });
            violations += !matched;
        }
    }
    std::ostringstream os;
    os << instances << " instances, " << steps << " steps, " << violations << " violations";
    return {violations == 0 && steps > 0, os.str()};
}

const Criterion kCriteria[] = {
    {1, "figure replay", 1, figure_replay},
    {2, "multiset embedding oracle", 5, multiset_oracle},
    {3, "equality-domain order is multiset inclusion", 5, equality_isomorphism},
    {4, "grid staircase", 10, grid_staircase},
    {5, "grid strong amalgamation witness", 30, grid_amalgamation},
    {6, "backward/forward coverability agreement", 60, backward_forward},
    {7, "pred_basis oracle", 60, pred_oracle},
    {8, "reduction fidelity", 300, reduction_fidelity},
    {9, "reduction termination", 300, reduction_termination},
    {10, "classifier coverage", 60, classifier_coverage},
    {11, "strong monotonicity", 60, strong_monotonicity},
};

} // namespace

int main(int argc, char** argv)
{
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (const Criterion& c : kCriteria) {
        if (!only.empty() && !only.count(c.id))
            continue;
        const auto start = std::chrono::steady_clock::now();
        Check o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.ok && secs < c.limit_seconds;
        failed += !pass;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2f s / limit %.0f s", secs, c.limit_seconds);
        std::cout << (pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << " [" << timing
                  << "]" << std::endl;
    }
    return failed ? 1 : 0;
}
