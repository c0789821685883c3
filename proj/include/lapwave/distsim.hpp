#pragma once

#include <cstdint>
#include <vector>

#include "lapwave/integrate.hpp"

namespace lapwave::distsim {

// Stats for one iteration of the synchronous protocol. The packet counter
// counts one packet per undirected edge per diffusion-fusion cycle;
// messages_directed counts physical directed sends (two per edge per cycle).
struct RoundStats {
    long long iteration = 0; // 0 is the initialization round
    long long packets = 0;
    long long messages_directed = 0;
    int barriers = 0;
    long long cum_packets = 0;
    long long cum_messages_directed = 0;
    int cum_barriers = 0;
};

struct SimOptions {
    // Seeded permutation of node execution order per phase; 0 = natural
    // order. Output must not depend on it.
    std::uint64_t schedule_seed = 0;
    // Every node-state access is checked against the currently scheduled
    // node (slower; proves the locality contract).
    bool locality_check = false;
    // Fault injection for tests: drop the payload sender->receiver in the
    // given global cycle, which must surface as a ProtocolError at fusion.
    int drop_sender = -1;
    int drop_receiver = -1;
    long long drop_cycle = -1;
    // Test tripwire: perform one deliberate out-of-turn state access so the
    // locality checker can be shown to fire.
    bool inject_locality_violation = false;
};

struct SimResult {
    Trajectory trajectory;
    std::vector<RoundStats> rounds; // rounds[0] = init, rounds[i] = iteration i
    long long total_packets = 0;
    long long total_messages_directed = 0;
    int total_barriers = 0;
    // count of protocol-level global reductions; stays 0 (barriers are the
    // only global synchronization the algorithm needs)
    long long global_reductions = 0;
};

// Synchronous message-passing execution of the SI2 step: per iteration an
// iteration-start barrier plus two diffusion-fusion cycles (3 barriers,
// 2|E| per-edge packets). Trajectory is bit-identical to si2_run.
SimResult run_distributed_si2(const Graph& g, const RunConfig& config,
                              const StatePair& state, const SimOptions& opts = {});

// One diffusion-fusion cycle per iteration; bit-identical to leapfrog2_run.
SimResult run_distributed_leapfrog2(const Graph& g, const RunConfig& config,
                                    const StatePair& state, const SimOptions& opts = {});

} // namespace lapwave::distsim
