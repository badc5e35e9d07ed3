#include "dnets/analysis.hpp"

#include <chrono>
#include <deque>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace dnets {

const char* to_string(Problem p)
{
    switch (p) {
    case Problem::Termination: return "termination";
    case Problem::Boundedness: return "boundedness";
    case Problem::Coverability: return "coverability";
    }
    return "?";
}

const char* to_string(Outcome o)
{
    switch (o) {
    case Outcome::Proven: return "proven";
    case Outcome::Refuted: return "refuted";
    case Outcome::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::optional<Problem> problem_from_string(std::string_view s)
{
    if (s == "termination")
        return Problem::Termination;
    if (s == "boundedness")
        return Problem::Boundedness;
    if (s == "coverability")
        return Problem::Coverability;
    return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Node {
    Configuration config;
    std::optional<std::size_t> parent;
    std::optional<FiringEvent> event;
    std::size_t depth = 0;
};

Trace path_to(const std::vector<Node>& nodes, std::size_t leaf)
{
    std::vector<std::size_t> chain;
    for (std::optional<std::size_t> i = leaf; i; i = nodes[*i].parent)
        chain.push_back(*i);
    std::reverse(chain.begin(), chain.end());
    Trace t{nodes[chain.front()].config, {}, false};
    for (std::size_t k = 1; k < chain.size(); ++k)
        t.steps.push_back({*nodes[chain[k]].event, nodes[chain[k]].config});
    return t;
}

// Forward tree search shared by termination and boundedness.
Verdict forward_search(const DataNet& net, const Configuration& c0, const AnalysisBudget& budget, bool strict)
{
    const auto start = Clock::now();
    Verdict v;
    v.problem = strict ? Problem::Boundedness : Problem::Termination;
    v.wqo_backed = net.domain.wqo_backed();
    std::vector<Node> nodes;
    nodes.push_back({c0, std::nullopt, std::nullopt, 0});
    std::unordered_set<CanonicalKey, CanonicalKeyHash> memo{c0.key()};
    bool truncated = false;

    const auto finish = [&](Outcome o, std::string result) {
        v.outcome = o;
        v.result = std::move(result);
        v.stats.nodes = nodes.size();
        v.stats.millis = millis_since(start);
        return v;
    };

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].depth >= budget.max_depth) {
            truncated = true;
            continue;
        }
        const Configuration cur = nodes[i].config;
        std::unordered_set<CanonicalKey, CanonicalKeyHash> children;
        for (FiringEvent& e : enabled_firings(net, cur)) {
            Configuration next = fire(net, cur, e);
            if (!children.insert(next.key()).second)
                continue;
            for (std::optional<std::size_t> a = i; a; a = nodes[*a].parent) {
                const Configuration& anc = nodes[*a].config;
                if (strict ? config_strictly_below(anc, next) : config_leq(anc, next)) {
                    nodes.push_back({std::move(next), i, std::move(e), nodes[i].depth + 1});
                    v.stats.depth = std::max(v.stats.depth, nodes.back().depth);
                    v.run = path_to(nodes, nodes.size() - 1);
                    v.ancestor_index = nodes[*a].depth;
                    return finish(Outcome::Refuted, strict ? "unbounded" : "non-terminating");
                }
            }
            if (strict && !memo.insert(next.key()).second)
                continue;
            if (nodes.size() >= budget.max_nodes)
                return finish(Outcome::Inconclusive, "budget exhausted");
            nodes.push_back({std::move(next), i, std::move(e), nodes[i].depth + 1});
            v.stats.depth = std::max(v.stats.depth, nodes.back().depth);
        }
    }
    if (truncated)
        return finish(Outcome::Inconclusive, "budget exhausted");
    v.explored = strict ? memo.size() : nodes.size();
    return finish(Outcome::Proven, strict ? "bounded" : "terminating");
}

bool literal_holds(const DomainSpec& d, const Literal& l, const FiniteStructure& s, Vertex u, Vertex v)
{
    bool value;
    if (l.kind == LiteralKind::Identity)
        value = u == v;
    else
        value = d.relations()[l.relation].holds(u == v, u == v ? 0 : s.type(u, v));
    return value != l.negated;
}

// Enumerates predecessor candidates for one transition and one configuration.
//
// Each value class of the guard (variables joined by `=`) is mapped onto a
// vertex of m, an extra vertex created earlier, or a new extension vertex.
// The predecessor keeps what outputs do not cover plus the consumed tokens.
// Classes without input variables that miss m carry no tokens in the
// predecessor, so for them only the existence of some placement is checked.
class PredSearch {
public:
    static constexpr Vertex kElsewhere = Vertex(-1);

    /// With `relevant`, skips predecessors whose outputs cover no token of m.
    PredSearch(const DataNet& net, std::size_t ti, const Configuration& m, bool relevant, std::size_t limit)
        : net_(net), t_(net.transitions[ti]), m_(m), relevant_(relevant), limit_(limit)
    {
    }

    std::vector<Configuration> run()
    {
        for (const Conjunction& conj : t_.guard.disjuncts)
            if (!exhausted_)
                run_disjunct(conj);
        return found_;
    }

    bool exhausted() const { return exhausted_; }

private:
    void run_disjunct(const Conjunction& conj)
    {
        const std::size_t nv = t_.vars.size();
        std::vector<std::size_t> parent(nv);
        std::iota(parent.begin(), parent.end(), 0);
        const auto find = [&](std::size_t x) {
            while (parent[x] != x)
                x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const Literal& l : conj)
            if (l.kind == LiteralKind::Identity && !l.negated)
                parent[find(l.x)] = find(l.y);

        // Classes touching m's places first, then other input classes, then
        // output-only classes.
        std::vector<std::size_t> root_class(nv, SIZE_MAX);
        std::vector<std::vector<std::size_t>> members;
        for (std::size_t x = 0; x < nv; ++x) {
            const std::size_t r = find(x);
            if (root_class[r] == SIZE_MAX) {
                root_class[r] = members.size();
                members.emplace_back();
            }
            members[root_class[r]].push_back(x);
        }
        const auto touches_m = [&](const std::vector<std::size_t>& vars) {
            return std::any_of(vars.begin(), vars.end(), [&](std::size_t x) {
                return !t_.is_input(x) && m_.tokens_on(t_.place_of(x)) > 0;
            });
        };
        const auto has_input = [&](const std::vector<std::size_t>& vars) {
            return std::any_of(vars.begin(), vars.end(), [&](std::size_t x) { return t_.is_input(x); });
        };
        std::vector<std::size_t> order(members.size());
        std::iota(order.begin(), order.end(), 0);
        const auto rank = [&](std::size_t c) { return touches_m(members[c]) ? 0 : has_input(members[c]) ? 1 : 2; };
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rank(a) < rank(b); });

        const std::size_t classes = members.size();
        class_of_.assign(nv, 0);
        input_class_.assign(classes, false);
        for (std::size_t k = 0; k < classes; ++k) {
            input_class_[k] = has_input(members[order[k]]);
            for (std::size_t x : members[order[k]])
                class_of_[x] = k;
        }
        overlap_classes_ = 0;
        while (overlap_classes_ < classes && touches_m(members[order[overlap_classes_]]))
            ++overlap_classes_;

        lits_.assign(classes, {});
        for (const Literal& l : conj) {
            const std::size_t a = class_of_[l.x], b = class_of_[l.y];
            if (a == b) {
                FiniteStructure one(net_.domain.alphabet(), 1);
                if (!literal_holds(net_.domain, l, one, 0, 0))
                    return;
                continue;
            }
            lits_[a].push_back(l);
            lits_[b].push_back(l);
        }
        if (relevant_ && overlap_classes_ == 0)
            return;
        assign_.assign(classes, kElsewhere);
        work_ = m_.carrier();
        assign(0);
    }

    // Literals of class k whose other side is among the first k classes and
    // not placed elsewhere.
    bool literals_hold(std::size_t k) const
    {
        for (const Literal& l : lits_[k]) {
            const std::size_t a = class_of_[l.x], b = class_of_[l.y];
            const std::size_t other = a == k ? b : a;
            if (other > k || assign_[other] == kElsewhere)
                continue;
            if (!literal_holds(net_.domain, l, work_, assign_[a], assign_[b]))
                return false;
        }
        return true;
    }

    bool overlaps() const
    {
        for (const Arc& arc : t_.outputs)
            for (std::size_t x : arc.vars) {
                const Vertex v = assign_[class_of_[x]];
                if (v < m_.size() && m_.count(v, arc.place) > 0)
                    return true;
            }
        return false;
    }

    void assign(std::size_t k)
    {
        if (exhausted_)
            return;
        if (k == overlap_classes_ && relevant_ && !overlaps())
            return;
        if (k == assign_.size()) {
            if (place_elsewhere(0))
                emit();
            return;
        }
        if (!input_class_[k]) {
            for (Vertex v = 0; v < m_.size(); ++v) {
                assign_[k] = v;
                if (literals_hold(k))
                    assign(k + 1);
            }
            assign_[k] = kElsewhere;
            assign(k + 1);
            return;
        }
        for (Vertex v = 0; v < work_.size(); ++v) {
            assign_[k] = v;
            if (literals_hold(k))
                assign(k + 1);
        }
        const FiniteStructure saved = work_;
        for (const TypeRow& row : extension_rows(net_.domain, saved)) {
            work_ = saved.extended(row);
            assign_[k] = Vertex(saved.size());
            if (literals_hold(k))
                assign(k + 1);
        }
        work_ = saved;
        assign_[k] = kElsewhere;
    }

    // Finds some placement of the elsewhere classes off m; restores state.
    bool place_elsewhere(std::size_t from)
    {
        std::size_t k = from;
        while (k < assign_.size() && assign_[k] != kElsewhere)
            ++k;
        if (k == assign_.size())
            return all_literals_hold();
        bool ok = false;
        for (Vertex v = Vertex(m_.size()); v < work_.size() && !ok; ++v) {
            assign_[k] = v;
            ok = partial_ok(k) && place_elsewhere(k + 1);
        }
        const FiniteStructure saved = work_;
        if (!ok)
            for (const TypeRow& row : extension_rows(net_.domain, saved)) {
                work_ = saved.extended(row);
                assign_[k] = Vertex(saved.size());
                if (partial_ok(k) && place_elsewhere(k + 1)) {
                    ok = true;
                    break;
                }
            }
        work_ = saved;
        assign_[k] = kElsewhere;
        return ok;
    }

    // Literals of class k against every class already placed.
    bool partial_ok(std::size_t k) const
    {
        for (const Literal& l : lits_[k]) {
            const std::size_t a = class_of_[l.x], b = class_of_[l.y];
            if (assign_[a] == kElsewhere || assign_[b] == kElsewhere)
                continue;
            if (!literal_holds(net_.domain, l, work_, assign_[a], assign_[b]))
                return false;
        }
        return true;
    }

    bool all_literals_hold() const
    {
        for (std::size_t k = 0; k < lits_.size(); ++k)
            if (!partial_ok(k))
                return false;
        return true;
    }

    void emit()
    {
        if (++emitted_ > limit_) {
            exhausted_ = true;
            return;
        }
        const std::size_t np = net_.places.size();
        std::vector<Counts> counts(work_.size(), Counts(np, 0));
        for (Vertex v = 0; v < m_.size(); ++v)
            counts[v] = m_.counts(v);
        for (const Arc& a : t_.outputs)
            for (std::size_t x : a.vars) {
                const Vertex v = assign_[class_of_[x]];
                if (v < m_.size() && counts[v][a.place] > 0)
                    --counts[v][a.place];
            }
        for (const Arc& a : t_.inputs)
            for (std::size_t x : a.vars)
                ++counts[assign_[class_of_[x]]][a.place];
        Configuration c = Configuration::make(work_, counts, np);
        if (seen_.insert(c.key()).second)
            found_.push_back(std::move(c));
    }

    const DataNet& net_;
    const Transition& t_;
    const Configuration& m_;
    bool relevant_;
    std::size_t limit_;
    std::size_t emitted_ = 0;
    bool exhausted_ = false;
    std::vector<std::size_t> class_of_;
    std::vector<bool> input_class_;
    std::size_t overlap_classes_ = 0;
    std::vector<std::vector<Literal>> lits_;
    std::vector<Vertex> assign_;
    FiniteStructure work_;
    std::vector<Configuration> found_;
    std::unordered_set<CanonicalKey, CanonicalKeyHash> seen_;
};

} // namespace

Verdict termination(const DataNet& net, const Configuration& c0, const AnalysisBudget& budget)
{
    return forward_search(net, c0, budget, false);
}

Verdict boundedness(const DataNet& net, const Configuration& c0, const AnalysisBudget& budget)
{
    return forward_search(net, c0, budget, true);
}

std::vector<Configuration> minimize(const std::vector<Configuration>& xs)
{
    std::vector<Configuration> basis;
    for (const Configuration& c : xs) {
        if (covered_by(basis, c))
            continue;
        std::erase_if(basis, [&](const Configuration& b) { return config_leq(c, b); });
        basis.push_back(c);
    }
    return basis;
}

bool covered_by(const std::vector<Configuration>& basis, const Configuration& c)
{
    return std::any_of(basis.begin(), basis.end(), [&](const Configuration& b) { return config_leq(b, c); });
}

std::vector<Configuration> pred_basis(const DataNet& net, std::size_t transition, const Configuration& m)
{
    if (transition >= net.transitions.size())
        throw NetError("pred_basis: transition out of range");
    return minimize(PredSearch(net, transition, m, false, SIZE_MAX).run());
}

namespace {

struct BasisEntry {
    Configuration config;
    std::optional<std::size_t> parent;
    std::size_t transition = 0;
    std::size_t depth = 0;
    bool alive = true;
};

// Forward replay of a backward derivation: each step picks an event whose
// successor covers the next basis element.
std::optional<Trace> reconstruct(const DataNet& net, const Configuration& c0, const std::vector<BasisEntry>& entries,
                                 std::size_t from)
{
    Trace trace{c0, {}, false};
    Configuration cur = c0;
    for (std::size_t i = from; entries[i].parent;) {
        const std::size_t next = *entries[i].parent;
        bool moved = false;
        for (FiringEvent& e : enabled_firings(net, cur, entries[i].transition)) {
            Configuration after = fire(net, cur, e);
            if (config_leq(entries[next].config, after)) {
                cur = after;
                trace.steps.push_back({std::move(e), std::move(after)});
                moved = true;
                break;
            }
        }
        if (!moved)
            return std::nullopt;
        i = next;
    }
    return trace;
}

// Breadth-first search from c0 for a configuration covering a target, over at
// most `limit` distinct configurations. Returns the run and the covered target.
std::optional<std::pair<Trace, std::size_t>> forward_probe(const DataNet& net, const Configuration& c0,
                                                           const std::vector<Configuration>& targets,
                                                           std::size_t limit)
{
    struct Node {
        Configuration config;
        std::optional<std::size_t> parent;
        std::optional<FiringEvent> event;
    };
    const auto covered = [&](const Configuration& c) -> std::optional<std::size_t> {
        for (std::size_t k = 0; k < targets.size(); ++k)
            if (config_leq(targets[k], c))
                return k;
        return std::nullopt;
    };
    std::vector<Node> nodes{{c0, std::nullopt, std::nullopt}};
    std::unordered_set<CanonicalKey, CanonicalKeyHash> seen{c0.key()};
    for (std::size_t i = 0; i < nodes.size() && nodes.size() < limit; ++i) {
        const Configuration cur = nodes[i].config;
        for (FiringEvent& e : enabled_firings(net, cur)) {
            Configuration after = fire(net, cur, e);
            if (!seen.insert(after.key()).second)
                continue;
            const auto hit = covered(after);
            nodes.push_back({std::move(after), i, std::move(e)});
            if (hit) {
                std::vector<std::size_t> path;
                for (std::optional<std::size_t> k = nodes.size() - 1; k && nodes[*k].parent; k = nodes[*k].parent)
                    path.push_back(*k);
                Trace trace{c0, {}, false};
                for (auto it = path.rbegin(); it != path.rend(); ++it)
                    trace.steps.push_back({*nodes[*it].event, nodes[*it].config});
                return std::make_pair(std::move(trace), *hit);
            }
            if (nodes.size() >= limit)
                break;
        }
    }
    return std::nullopt;
}

} // namespace

Verdict coverability(const DataNet& net, const Configuration& c0, const std::vector<Configuration>& targets,
                     const AnalysisBudget& budget)
{
    const auto start = Clock::now();
    Verdict v;
    v.problem = Problem::Coverability;
    v.wqo_backed = net.domain.wqo_backed();
    std::vector<BasisEntry> entries;
    std::deque<std::size_t> work;
    std::size_t alive = 0;
    bool truncated = false;

    const auto finish = [&](Outcome o, std::string result) {
        v.outcome = o;
        v.result = std::move(result);
        v.stats.basis = std::max(v.stats.basis, alive);
        v.stats.millis = millis_since(start);
        return v;
    };
    const auto proven = [&](std::size_t i) {
        auto run = reconstruct(net, c0, entries, i);
        if (!run)
            return finish(Outcome::Inconclusive, "witness reconstruction failed");
        v.run = std::move(run);
        std::size_t root = i;
        while (entries[root].parent)
            root = *entries[root].parent;
        v.basis = {entries[root].config};
        return finish(Outcome::Proven, "coverable");
    };
    // Inserts unless covered; returns the new index.
    const auto insert = [&](Configuration c, std::optional<std::size_t> parent, std::size_t t,
                            std::size_t depth) -> std::optional<std::size_t> {
        for (const BasisEntry& e : entries)
            if (e.alive && config_leq(e.config, c))
                return std::nullopt;
        for (BasisEntry& e : entries)
            if (e.alive && config_leq(c, e.config)) {
                e.alive = false;
                --alive;
            }
        entries.push_back({std::move(c), parent, t, depth, true});
        ++alive;
        v.stats.basis = std::max(v.stats.basis, alive);
        v.stats.depth = std::max(v.stats.depth, depth);
        work.push_back(entries.size() - 1);
        return entries.size() - 1;
    };

    for (const Configuration& target : targets)
        if (auto i = insert(target, std::nullopt, 0, 0); i && config_leq(entries[*i].config, c0))
            return proven(*i);

    // Forward phase, bounded by a quarter of the node budget.
    if (auto hit = forward_probe(net, c0, targets, budget.max_nodes / 4)) {
        v.run = std::move(hit->first);
        v.basis = {targets[hit->second]};
        v.stats.depth = v.run->steps.size();
        return finish(Outcome::Proven, "coverable");
    }

    while (!work.empty()) {
        const std::size_t i = work.front();
        work.pop_front();
        if (!entries[i].alive)
            continue;
        if (entries[i].depth >= budget.max_depth) {
            truncated = true;
            continue;
        }
        for (std::size_t t = 0; t < net.transitions.size(); ++t) {
            const Configuration m = entries[i].config;
            PredSearch search(net, t, m, true, budget.max_nodes - std::min(budget.max_nodes, v.stats.nodes));
            std::vector<Configuration> preds = minimize(search.run());
            if (search.exhausted())
                return finish(Outcome::Inconclusive, "budget exhausted");
            for (Configuration& p : preds) {
                ++v.stats.nodes;
                auto j = insert(std::move(p), i, t, entries[i].depth + 1);
                if (!j)
                    continue;
                if (config_leq(entries[*j].config, c0))
                    return proven(*j);
                if (alive > budget.max_basis || v.stats.nodes > budget.max_nodes)
                    return finish(Outcome::Inconclusive, "budget exhausted");
            }
            if (!entries[i].alive)
                break;
        }
    }
    if (truncated)
        return finish(Outcome::Inconclusive, "budget exhausted");
    for (const BasisEntry& e : entries)
        if (e.alive)
            v.basis.push_back(e.config);
    return finish(Outcome::Refuted, "not coverable");
}

bool replay(const DataNet& net, const Trace& trace)
{
    Configuration cur = trace.initial;
    try {
        for (const TraceStep& s : trace.steps) {
            cur = fire(net, cur, s.event);
            if (cur.key() != s.after.key())
                return false;
        }
    } catch (const NetError&) {
        return false;
    }
    return true;
}

std::string check_certificate(const DataNet& net, const Configuration& c0, const std::vector<Configuration>& targets,
                              const Verdict& v)
{
    if (v.outcome == Outcome::Inconclusive)
        return {};
    const auto check_run = [&]() -> std::string {
        if (!v.run)
            return "missing witness run";
        if (v.run->initial.key() != c0.key())
            return "witness run does not start at the initial configuration";
        if (!replay(net, *v.run))
            return "witness run does not replay";
        return {};
    };
    const auto at = [&](std::size_t k) -> const Configuration& {
        return k == 0 ? v.run->initial : v.run->steps[k - 1].after;
    };
    switch (v.problem) {
    case Problem::Termination:
    case Problem::Boundedness:
        if (v.outcome == Outcome::Proven)
            return {};
        if (auto r = check_run(); !r.empty())
            return r;
        if (!v.ancestor_index || *v.ancestor_index > v.run->steps.size() || v.run->steps.empty())
            return "missing subsumption pair";
        if (*v.ancestor_index == v.run->steps.size())
            return "subsumption pair is not a proper ancestor";
        if (v.problem == Problem::Termination ? !config_leq(at(*v.ancestor_index), at(v.run->steps.size()))
                                              : !config_strictly_below(at(*v.ancestor_index),
                                                                       at(v.run->steps.size())))
            return "subsumption pair does not embed";
        return {};
    case Problem::Coverability:
        if (v.outcome == Outcome::Proven) {
            if (auto r = check_run(); !r.empty())
                return r;
            const Configuration& last = at(v.run->steps.size());
            for (const Configuration& t : targets)
                if (config_leq(t, last))
                    return {};
            return "witness run does not cover the target";
        }
        for (const Configuration& t : targets)
            if (!covered_by(v.basis, t))
                return "basis does not cover the target";
        if (covered_by(v.basis, c0))
            return "basis covers the initial configuration";
        // Predecessors whose outputs miss b lie above b already.
        for (const Configuration& b : v.basis)
            for (std::size_t t = 0; t < net.transitions.size(); ++t)
                for (const Configuration& p : PredSearch(net, t, b, true, SIZE_MAX).run())
                    if (!covered_by(v.basis, p))
                        return "basis is not closed under predecessors";
        return {};
    }
    return {};
}

} // namespace dnets
