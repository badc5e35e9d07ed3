#pragma once

// Well-structured decision procedures over data nets.
//
// All three procedures are sound on every domain. They are complete (up to
// the budget) only where the lifted order is a wqo; verdicts carry that flag.

#include "dnets/nets.hpp"

namespace dnets {

struct AnalysisBudget {
    std::size_t max_nodes = 200000;
    std::size_t max_basis = 20000;
    std::size_t max_depth = 10000;
};

enum class Problem { Termination, Boundedness, Coverability };
enum class Outcome { Proven, Refuted, Inconclusive };

const char* to_string(Problem p);
const char* to_string(Outcome o);
std::optional<Problem> problem_from_string(std::string_view s);

struct AnalysisStats {
    std::size_t nodes = 0;
    std::size_t basis = 0;
    std::size_t depth = 0;
    double millis = 0;
};

struct Verdict {
    Problem problem = Problem::Termination;
    Outcome outcome = Outcome::Inconclusive;
    /// terminating, non-terminating, bounded, unbounded, coverable, not coverable,
    /// or budget exhausted.
    std::string result;
    bool wqo_backed = false;
    AnalysisStats stats;

    /// Witness run from the initial configuration (non-termination,
    /// unboundedness, coverability).
    std::optional<Trace> run;
    /// Subsumption pair: run configuration at this index ⊴ the run's last one.
    std::optional<std::size_t> ancestor_index;
    /// Closed basis for "not coverable"; the covered target for "coverable".
    std::vector<Configuration> basis;
    /// Tree size (terminating) or reachable configurations up to isomorphism (bounded).
    std::size_t explored = 0;
};

Verdict termination(const DataNet& net, const Configuration& c0, const AnalysisBudget& budget);
Verdict boundedness(const DataNet& net, const Configuration& c0, const AnalysisBudget& budget);

/// ⊴-minimal configurations c with a step c -t-> c' and m ⊴ c'.
std::vector<Configuration> pred_basis(const DataNet& net, std::size_t transition, const Configuration& m);

/// Is some configuration above one of `targets` reachable from c0?
Verdict coverability(const DataNet& net, const Configuration& c0, const std::vector<Configuration>& targets,
                     const AnalysisBudget& budget);

/// Keeps the ⊴-minimal elements, first occurrence first.
std::vector<Configuration> minimize(const std::vector<Configuration>& xs);
bool covered_by(const std::vector<Configuration>& basis, const Configuration& c);

/// Replays every step through fire from the trace's initial configuration.
bool replay(const DataNet& net, const Trace& trace);

/// Re-checks a verdict's certificate. Empty string when valid, otherwise the reason.
std::string check_certificate(const DataNet& net, const Configuration& c0, const std::vector<Configuration>& targets,
                              const Verdict& v);

} // namespace dnets
