#pragma once

// Petri nets with data: model, configurations, firing, and simulation.

#include "dnets/domains.hpp"
#include "dnets/wqo.hpp"

#include <cstdint>
#include <random>

namespace dnets {

using Counts = std::vector<std::uint32_t>;

/// A multiset over places × data values, stored as a carrier structure whose
/// vertices carry per-place token counts. Always canonical: vertices without
/// tokens are dropped and vertices are in canonical order, so equal keys mean
/// isomorphic configurations.
class Configuration {
public:
    Configuration(AlphabetRef alphabet, std::size_t places);
    /// Normalizes an arbitrary (carrier, counts) pair. counts[v] has one entry per place.
    static Configuration make(const FiniteStructure& carrier, const std::vector<Counts>& counts,
                              std::size_t places);

    const FiniteStructure& carrier() const { return carrier_; }
    std::size_t size() const { return carrier_.size(); }
    std::size_t place_count() const { return places_; }
    const Counts& counts(Vertex v) const { return counts_[v]; }
    const std::vector<Counts>& all_counts() const { return counts_; }
    std::uint32_t count(Vertex v, std::size_t place) const { return counts_[v][place]; }
    std::size_t tokens() const;
    std::size_t tokens_on(std::size_t place) const { return totals_[place]; }
    /// Number of vertex pairs of each type.
    const std::vector<std::uint32_t>& pair_histogram() const { return pairs_; }
    const CanonicalKey& key() const { return key_; }

    LabeledStructure<Counts> labeled() const { return {carrier_, counts_}; }

    bool operator==(const Configuration& o) const { return key_ == o.key_; }

private:
    Configuration() = default;
    void summarize();

    FiniteStructure carrier_;
    std::vector<Counts> counts_;
    std::size_t places_ = 0;
    std::vector<std::uint32_t> totals_;
    std::vector<std::uint32_t> pairs_;
    CanonicalKey key_;
};

/// Lifted order ⊴ over M(P): a shape embedding with pointwise count inclusion.
std::optional<EmbeddingWitness> config_embedding(const Configuration& a, const Configuration& b);
bool config_leq(const Configuration& a, const Configuration& b);
/// a ⊴ b and a ≇ b.
bool config_strictly_below(const Configuration& a, const Configuration& b);

enum class LiteralKind { Identity, Relation };

/// x = y / x != y (Identity), or x R y / !(x R y) (Relation).
struct Literal {
    LiteralKind kind = LiteralKind::Identity;
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t relation = 0;
    bool negated = false;

    bool operator==(const Literal&) const = default;
};

using Conjunction = std::vector<Literal>;

/// Disjunctive normal form. No disjuncts means false; one empty disjunct means true.
struct Guard {
    std::vector<Conjunction> disjuncts;

    static Guard always() { return Guard{{Conjunction{}}}; }
    bool operator==(const Guard&) const = default;
};

struct Arc {
    std::size_t place = 0;
    std::vector<std::size_t> vars;

    bool operator==(const Arc&) const = default;
};

struct Transition {
    std::string name;
    std::vector<std::string> vars;
    std::vector<Arc> inputs;
    std::vector<Arc> outputs;
    Guard guard = Guard::always();

    /// Place of each variable and whether it is an input variable.
    std::size_t place_of(std::size_t var) const;
    bool is_input(std::size_t var) const;
    std::size_t input_tokens() const;
    std::size_t output_tokens() const;

    bool operator==(const Transition&) const = default;
};

class NetError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct DataNet {
    DomainSpec domain;
    std::vector<std::string> places;
    std::vector<Transition> transitions;
    std::optional<Configuration> initial;

    std::optional<std::size_t> find_place(std::string_view name) const;
    std::optional<std::size_t> find_transition(std::string_view name) const;
    /// Checks arc disjointness, guard scoping and index ranges; throws NetError.
    void validate() const;
    Configuration empty_configuration() const;
};

bool same_net(const DataNet& a, const DataNet& b);

/// One step up to isomorphism. `carrier` is the base carrier extended by the
/// fresh vertices; `valuation[x]` is the vertex of variable x in it.
struct FiringEvent {
    std::size_t transition = 0;
    CanonicalKey base;
    FiniteStructure carrier;
    std::vector<Vertex> valuation;
    std::size_t fresh = 0;
    /// Canonical key of the pointed extended configuration.
    CanonicalKey key;
};

/// Does the guard hold for a valuation into structure s?
bool guard_holds(const DataNet& net, const Transition& t, const FiniteStructure& s,
                 std::span<const Vertex> valuation);

/// Every step from c, one event per isomorphism class of the pointed
/// extended configuration, in a deterministic order.
std::vector<FiringEvent> enabled_firings(const DataNet& net, const Configuration& c);
std::vector<FiringEvent> enabled_firings(const DataNet& net, const Configuration& c, std::size_t transition);

/// Throws NetError if the event was not computed for c.
Configuration fire(const DataNet& net, const Configuration& c, const FiringEvent& e);

struct TraceStep {
    FiringEvent event;
    Configuration after;
};

struct Trace {
    Configuration initial;
    std::vector<TraceStep> steps;
    /// No event is enabled at the last configuration.
    bool maximal = false;
};

struct RandomPolicy {
    std::uint64_t seed = 0;
    std::size_t steps = 0;
};

/// Event indices into enabled_firings at each step.
struct ScriptPolicy {
    std::vector<std::size_t> choices;
};

struct ExhaustivePolicy {
    std::size_t depth = 0;
    std::size_t max_nodes = 100000;
};

struct TreeNode {
    Configuration config;
    std::optional<std::size_t> parent;
    std::optional<FiringEvent> event;
    std::size_t depth = 0;
};

struct ExplorationTree {
    std::vector<TreeNode> nodes;
    /// Node budget hit before reaching the depth bound everywhere.
    bool truncated = false;
};

Trace simulate(const DataNet& net, const Configuration& c0, const RandomPolicy& policy);
Trace simulate(const DataNet& net, const Configuration& c0, const ScriptPolicy& policy);
/// Reachability tree to the given depth; siblings are deduplicated by key.
ExplorationTree simulate(const DataNet& net, const Configuration& c0, const ExhaustivePolicy& policy);

// Text formats --------------------------------------------------------------

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

/// A file could not be read.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& file);

DataNet parse_net(std::string_view text, const std::filesystem::path& base_dir = {});
DataNet load_net(const std::filesystem::path& file);
std::string unparse(const DataNet& net);
std::string guard_to_string(const DataNet& net, const Transition& t);

/// `atoms a b with a R b, ...` followed by `place: atom+` lines, as in an init block.
Configuration parse_configuration(const DataNet& net, std::string_view text);
std::string configuration_to_string(const DataNet& net, const Configuration& c);

/// Coverability target: `&`- or `,`-separated clauses `place>=k` (anonymous
/// tokens) or `place(atom)>=k`, optionally followed by `; atoms a b with a R b`.
/// Returns the minimal configurations of the upward-closed target set.
std::vector<Configuration> parse_target(const DataNet& net, std::string_view text);

} // namespace dnets
