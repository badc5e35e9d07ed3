#include "dnets/nets.hpp"

#include <numeric>
#include <set>
#include <unordered_set>

namespace dnets {

namespace {

std::string encode_counts(const Counts& counts)
{
    std::string out;
    out.reserve(counts.size() * 4);
    for (std::uint32_t x : counts)
        for (int i = 0; i < 4; ++i)
            out.push_back(char((x >> (8 * i)) & 0xff));
    return out;
}

std::uint64_t total(const Counts& counts) { return std::accumulate(counts.begin(), counts.end(), std::uint64_t(0)); }

} // namespace

// Configurations -----------------------------------------------------------

Configuration::Configuration(AlphabetRef alphabet, std::size_t places) : carrier_(std::move(alphabet)), places_(places)
{
    key_ = canonical_labeling(carrier_).key;
    summarize();
}

void Configuration::summarize()
{
    totals_.assign(places_, 0);
    for (const Counts& row : counts_)
        for (std::size_t p = 0; p < places_; ++p)
            totals_[p] += row[p];
    pairs_.assign(carrier_.alphabet().size(), 0);
    for (Vertex v = 1; v < carrier_.size(); ++v)
        for (Vertex u = 0; u < v; ++u)
            ++pairs_[carrier_.type(u, v)];
}

Configuration Configuration::make(const FiniteStructure& carrier, const std::vector<Counts>& counts,
                                  std::size_t places)
{
    if (counts.size() != carrier.size())
        throw NetError("configuration: count rows differ from carrier size");
    std::vector<Vertex> keep;
    for (Vertex v = 0; v < carrier.size(); ++v) {
        if (counts[v].size() != places)
            throw NetError("configuration: count row has the wrong place count");
        if (total(counts[v]) > 0)
            keep.push_back(v);
    }
    FiniteStructure kept = carrier.induced(keep);
    std::vector<std::string> labels;
    labels.reserve(keep.size());
    for (Vertex v : keep)
        labels.push_back(encode_counts(counts[v]));
    CanonicalLabeling cl = canonical_labeling(kept, labels);

    Configuration c;
    c.carrier_ = kept.restricted(cl.order);
    c.places_ = places;
    c.counts_.reserve(keep.size());
    for (Vertex i : cl.order)
        c.counts_.push_back(counts[keep[i]]);
    c.key_ = std::move(cl.key);
    c.summarize();
    return c;
}

std::size_t Configuration::tokens() const
{
    std::size_t n = 0;
    for (const auto& row : counts_)
        n += total(row);
    return n;
}

std::optional<EmbeddingWitness> config_embedding(const Configuration& a, const Configuration& b)
{
    if (a.size() > b.size() || a.place_count() != b.place_count())
        return std::nullopt;
    for (std::size_t p = 0; p < a.place_count(); ++p)
        if (a.tokens_on(p) > b.tokens_on(p))
            return std::nullopt;
    for (std::size_t t = 0; t < a.pair_histogram().size(); ++t)
        if (a.pair_histogram()[t] > b.pair_histogram()[t])
            return std::nullopt;
    return find_embedding(a.carrier(), b.carrier(), [&](Vertex u, Vertex v) {
        return pointwise_leq(a.counts(u), b.counts(v));
    });
}

bool config_leq(const Configuration& a, const Configuration& b) { return config_embedding(a, b).has_value(); }

bool config_strictly_below(const Configuration& a, const Configuration& b)
{
    return a.key() != b.key() && config_leq(a, b);
}

// Transitions ----------------------------------------------------------------

std::size_t Transition::place_of(std::size_t var) const
{
    for (const auto* arcs : {&inputs, &outputs})
        for (const Arc& a : *arcs)
            if (std::find(a.vars.begin(), a.vars.end(), var) != a.vars.end())
                return a.place;
    throw NetError("variable " + std::to_string(var) + " is on no arc of " + name);
}

bool Transition::is_input(std::size_t var) const
{
    for (const Arc& a : inputs)
        if (std::find(a.vars.begin(), a.vars.end(), var) != a.vars.end())
            return true;
    return false;
}

std::size_t Transition::input_tokens() const
{
    std::size_t n = 0;
    for (const Arc& a : inputs)
        n += a.vars.size();
    return n;
}

std::size_t Transition::output_tokens() const
{
    std::size_t n = 0;
    for (const Arc& a : outputs)
        n += a.vars.size();
    return n;
}

std::optional<std::size_t> DataNet::find_place(std::string_view name) const
{
    for (std::size_t i = 0; i < places.size(); ++i)
        if (places[i] == name)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> DataNet::find_transition(std::string_view name) const
{
    for (std::size_t i = 0; i < transitions.size(); ++i)
        if (transitions[i].name == name)
            return i;
    return std::nullopt;
}

void DataNet::validate() const
{
    std::set<std::string, std::less<>> place_names(places.begin(), places.end());
    if (place_names.size() != places.size())
        throw NetError("duplicate place name");
    std::set<std::string, std::less<>> names;
    for (const Transition& t : transitions) {
        if (!names.insert(t.name).second)
            throw NetError("duplicate transition " + t.name);
        std::vector<int> seen(t.vars.size(), 0);
        for (const auto* arcs : {&t.inputs, &t.outputs}) {
            std::set<std::size_t> arc_places;
            for (const Arc& a : *arcs) {
                if (a.place >= places.size())
                    throw NetError(t.name + ": arc place out of range");
                if (!arc_places.insert(a.place).second)
                    throw NetError(t.name + ": two arcs on place " + places[a.place]);
                if (a.vars.empty())
                    throw NetError(t.name + ": empty arc on place " + places[a.place]);
                for (std::size_t x : a.vars) {
                    if (x >= t.vars.size())
                        throw NetError(t.name + ": arc variable out of range");
                    if (seen[x]++)
                        throw NetError(t.name + ": variable " + t.vars[x] + " on two arcs");
                }
            }
        }
        for (std::size_t x = 0; x < t.vars.size(); ++x)
            if (!seen[x])
                throw NetError(t.name + ": variable " + t.vars[x] + " is on no arc");
        for (const Conjunction& conj : t.guard.disjuncts)
            for (const Literal& l : conj) {
                if (l.x >= t.vars.size() || l.y >= t.vars.size())
                    throw NetError(t.name + ": guard variable out of range");
                if (l.kind == LiteralKind::Relation && l.relation >= domain.relations().size())
                    throw NetError(t.name + ": guard relation out of range");
            }
    }
    if (initial && initial->place_count() != places.size())
        throw NetError("initial configuration has the wrong place count");
}

Configuration DataNet::empty_configuration() const { return Configuration(domain.alphabet(), places.size()); }

bool same_net(const DataNet& a, const DataNet& b)
{
    if (a.domain.describe() != b.domain.describe() || a.places != b.places || a.transitions != b.transitions)
        return false;
    if (a.initial.has_value() != b.initial.has_value())
        return false;
    return !a.initial || a.initial->key() == b.initial->key();
}

// Firing ---------------------------------------------------------------------

namespace {

bool literal_holds(const DomainSpec& d, const Literal& l, const FiniteStructure& s, Vertex u, Vertex v)
{
    bool value;
    if (l.kind == LiteralKind::Identity)
        value = u == v;
    else
        value = d.relations()[l.relation].holds(u == v, u == v ? 0 : s.type(u, v));
    return value != l.negated;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) { return parent_[x] == x ? x : parent_[x] = find(parent_[x]); }
    void join(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

// Enumerates the events of one transition on one configuration.
class FiringSearch {
public:
    FiringSearch(const DataNet& net, const Configuration& c, std::size_t ti)
        : net_(net), c_(c), ti_(ti), t_(net.transitions[ti]), n_(c.size())
    {
    }

    void run(std::vector<FiringEvent>& out, std::unordered_set<CanonicalKey, CanonicalKeyHash>& seen)
    {
        out_ = &out;
        seen_ = &seen;
        for (const Conjunction& conj : t_.guard.disjuncts)
            run_disjunct(conj);
    }

private:
    void run_disjunct(const Conjunction& conj)
    {
        const std::size_t nv = t_.vars.size();
        UnionFind uf(nv);
        for (const Literal& l : conj)
            if (l.kind == LiteralKind::Identity && !l.negated)
                uf.join(l.x, l.y);
        // Classes: input classes first, then output-only ones.
        std::vector<std::size_t> root_class(nv, SIZE_MAX);
        classes_.clear();
        class_input_.clear();
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t x = 0; x < nv; ++x) {
                const std::size_t r = uf.find(x);
                bool has_input = false;
                for (std::size_t y = 0; y < nv; ++y)
                    if (uf.find(y) == r && t_.is_input(y))
                        has_input = true;
                if (has_input != (pass == 0) || root_class[r] != SIZE_MAX)
                    continue;
                root_class[r] = classes_.size();
                classes_.emplace_back();
                class_input_.push_back(has_input);
            }
        class_of_.assign(nv, 0);
        for (std::size_t x = 0; x < nv; ++x) {
            class_of_[x] = root_class[uf.find(x)];
            classes_[class_of_[x]].push_back(x);
        }
        checks_.assign(classes_.size(), {});
        for (const Literal& l : conj) {
            const std::size_t a = class_of_[l.x], b = class_of_[l.y];
            if (a == b) {
                // Decided regardless of the assignment.
                FiniteStructure dummy(net_.domain.alphabet(), 1);
                if (!literal_holds(net_.domain, l, dummy, 0, 0))
                    return;
                continue;
            }
            checks_[std::max(a, b)].push_back(l);
        }
        // Token demand of each input class per place.
        demand_.assign(classes_.size(), Counts(net_.places.size(), 0));
        for (std::size_t x = 0; x < nv; ++x)
            if (t_.is_input(x))
                ++demand_[class_of_[x]][t_.place_of(x)];
        used_.assign(n_, Counts(net_.places.size(), 0));
        assign_.assign(classes_.size(), 0);
        work_ = c_.carrier();
        assign(0);
    }

    bool literals_hold(std::size_t k) const
    {
        for (const Literal& l : checks_[k])
            if (!literal_holds(net_.domain, l, work_, assign_[class_of_[l.x]], assign_[class_of_[l.y]]))
                return false;
        return true;
    }

    void assign(std::size_t k)
    {
        if (k == classes_.size()) {
            emit();
            return;
        }
        if (class_input_[k]) {
            for (Vertex v = 0; v < n_; ++v) {
                bool fits = true;
                for (std::size_t p = 0; p < demand_[k].size(); ++p)
                    if (used_[v][p] + demand_[k][p] > c_.count(v, p))
                        fits = false;
                if (!fits)
                    continue;
                assign_[k] = v;
                if (!literals_hold(k))
                    continue;
                for (std::size_t p = 0; p < demand_[k].size(); ++p)
                    used_[v][p] += demand_[k][p];
                assign(k + 1);
                for (std::size_t p = 0; p < demand_[k].size(); ++p)
                    used_[v][p] -= demand_[k][p];
            }
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
    }

    void emit()
    {
        FiringEvent e;
        e.transition = ti_;
        e.base = c_.key();
        e.carrier = work_;
        e.fresh = work_.size() - n_;
        e.valuation.resize(t_.vars.size());
        for (std::size_t x = 0; x < t_.vars.size(); ++x)
            e.valuation[x] = assign_[class_of_[x]];
        // Pointed labels: current counts, consumed counts, produced counts.
        const std::size_t np = net_.places.size();
        std::vector<Counts> rows(work_.size(), Counts(3 * np, 0));
        for (Vertex v = 0; v < n_; ++v)
            std::copy(c_.counts(v).begin(), c_.counts(v).end(), rows[v].begin());
        for (std::size_t x = 0; x < t_.vars.size(); ++x)
            ++rows[e.valuation[x]][(t_.is_input(x) ? 1 : 2) * np + t_.place_of(x)];
        std::vector<std::string> labels;
        labels.reserve(rows.size());
        for (const auto& r : rows)
            labels.push_back(std::string(1, char(ti_ & 0xff)) + encode_counts(r));
        e.key = canonical_labeling(work_, labels).key;
        if (seen_->insert(e.key).second)
            out_->push_back(std::move(e));
    }

    const DataNet& net_;
    const Configuration& c_;
    std::size_t ti_;
    const Transition& t_;
    std::size_t n_;

    std::vector<std::vector<std::size_t>> classes_;
    std::vector<bool> class_input_;
    std::vector<std::size_t> class_of_;
    std::vector<std::vector<Literal>> checks_;
    std::vector<Counts> demand_;
    std::vector<Counts> used_;
    std::vector<Vertex> assign_;
    FiniteStructure work_;
    std::vector<FiringEvent>* out_ = nullptr;
    std::unordered_set<CanonicalKey, CanonicalKeyHash>* seen_ = nullptr;
};

} // namespace

bool guard_holds(const DataNet& net, const Transition& t, const FiniteStructure& s, std::span<const Vertex> valuation)
{
    for (const Conjunction& conj : t.guard.disjuncts) {
        bool ok = true;
        for (const Literal& l : conj)
            if (!literal_holds(net.domain, l, s, valuation[l.x], valuation[l.y])) {
                ok = false;
                break;
            }
        if (ok)
            return true;
    }
    return false;
}

std::vector<FiringEvent> enabled_firings(const DataNet& net, const Configuration& c, std::size_t transition)
{
    std::vector<FiringEvent> out;
    std::unordered_set<CanonicalKey, CanonicalKeyHash> seen;
    FiringSearch(net, c, transition).run(out, seen);
    return out;
}

std::vector<FiringEvent> enabled_firings(const DataNet& net, const Configuration& c)
{
    std::vector<FiringEvent> out;
    std::unordered_set<CanonicalKey, CanonicalKeyHash> seen;
    for (std::size_t t = 0; t < net.transitions.size(); ++t)
        FiringSearch(net, c, t).run(out, seen);
    return out;
}

Configuration fire(const DataNet& net, const Configuration& c, const FiringEvent& e)
{
    if (e.base != c.key() || e.transition >= net.transitions.size() || e.carrier.size() != c.size() + e.fresh)
        throw NetError("stale firing event");
    const Transition& t = net.transitions[e.transition];
    if (e.valuation.size() != t.vars.size())
        throw NetError("stale firing event");
    std::vector<Counts> counts(e.carrier.size(), Counts(net.places.size(), 0));
    for (Vertex v = 0; v < c.size(); ++v)
        counts[v] = c.counts(v);
    for (const Arc& a : t.inputs)
        for (std::size_t x : a.vars) {
            auto& slot = counts.at(e.valuation[x])[a.place];
            if (slot == 0)
                throw NetError("firing event consumes a missing token");
            --slot;
        }
    for (const Arc& a : t.outputs)
        for (std::size_t x : a.vars)
            ++counts.at(e.valuation[x])[a.place];
    return Configuration::make(e.carrier, counts, net.places.size());
}

// Simulation ---------------------------------------------------------------

Trace simulate(const DataNet& net, const Configuration& c0, const RandomPolicy& policy)
{
    Trace trace{c0, {}, false};
    std::mt19937_64 rng(policy.seed);
    Configuration cur = c0;
    for (std::size_t i = 0; i < policy.steps; ++i) {
        auto events = enabled_firings(net, cur);
        if (events.empty()) {
            trace.maximal = true;
            return trace;
        }
        std::uniform_int_distribution<std::size_t> pick(0, events.size() - 1);
        FiringEvent& e = events[pick(rng)];
        cur = fire(net, cur, e);
        trace.steps.push_back({std::move(e), cur});
    }
    trace.maximal = enabled_firings(net, cur).empty();
    return trace;
}

Trace simulate(const DataNet& net, const Configuration& c0, const ScriptPolicy& policy)
{
    Trace trace{c0, {}, false};
    Configuration cur = c0;
    for (std::size_t choice : policy.choices) {
        auto events = enabled_firings(net, cur);
        if (choice >= events.size())
            throw NetError("script choice " + std::to_string(choice) + " out of range (" +
                           std::to_string(events.size()) + " events enabled)");
        cur = fire(net, cur, events[choice]);
        trace.steps.push_back({std::move(events[choice]), cur});
    }
    trace.maximal = enabled_firings(net, cur).empty();
    return trace;
}

ExplorationTree simulate(const DataNet& net, const Configuration& c0, const ExhaustivePolicy& policy)
{
    ExplorationTree tree;
    tree.nodes.push_back({c0, std::nullopt, std::nullopt, 0});
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (tree.nodes[i].depth >= policy.depth)
            continue;
        const Configuration cur = tree.nodes[i].config;
        std::unordered_set<CanonicalKey, CanonicalKeyHash> children;
        for (FiringEvent& e : enabled_firings(net, cur)) {
            Configuration next = fire(net, cur, e);
            if (!children.insert(next.key()).second)
                continue;
            if (tree.nodes.size() >= policy.max_nodes) {
                tree.truncated = true;
                return tree;
            }
            tree.nodes.push_back({std::move(next), i, std::move(e), tree.nodes[i].depth + 1});
        }
    }
    return tree;
}

} // namespace dnets
