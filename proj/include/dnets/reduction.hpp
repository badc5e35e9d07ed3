#pragma once

// Two-counter machines and their simulation by nets over the grid domain.
//
// Counter j holding n is a path of n + 2 nodes in the graph E = (=1 ∪ =2):
// its ends sit on b_j and e_j, the inner nodes on m_j.

#include "dnets/nets.hpp"

#include <array>
#include <map>

namespace dnets {

struct Instruction {
    enum Kind { Inc, Test };
    Kind kind = Inc;
    int counter = 1;
    /// Inc: the next state. Test: the state taken when the counter is zero.
    std::size_t next = 0;
    /// Test only: the state taken after decrementing.
    std::size_t if_dec = 0;
};

struct MinskyMachine {
    std::vector<std::string> states;
    std::size_t init = 0;
    std::size_t halt = 0;
    /// One entry per state; empty exactly for the halting state.
    std::vector<std::optional<Instruction>> program;

    std::optional<std::size_t> find_state(std::string_view name) const;
};

MinskyMachine parse_machine(std::string_view text);
std::string unparse_machine(const MinskyMachine& m);

struct MachineRun {
    bool halted = false;
    std::size_t steps = 0;
    std::size_t state = 0;
    std::uint64_t c1 = 0;
    std::uint64_t c2 = 0;
};

/// Executes at most `fuel` instructions from (init, 0, 0).
MachineRun run_machine(const MinskyMachine& m, std::size_t fuel);

struct CompiledNet {
    DataNet net;
    std::vector<std::size_t> state_place;
    std::size_t halt_place = 0;
    /// b1 m1 e1 b2 m2 e2 p r, in this order.
    std::array<std::size_t, 8> counter_places{};
};

CompiledNet compile(const MinskyMachine& m);

/// Counter values encoded by a configuration whose control token sits on a
/// state place, or nullopt if the encoding is broken or an increment is in
/// progress.
std::optional<std::pair<std::size_t, std::size_t>> decode_counters(const CompiledNet& cn, const Configuration& c);

/// State whose place holds the control token, if any.
std::optional<std::size_t> control_state(const CompiledNet& cn, const Configuration& c);

} // namespace dnets
