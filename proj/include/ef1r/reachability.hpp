#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ef1r/core.hpp"

// Exact decision procedure for restoration reachability: breadth-first search
// over allocations connected by valid operations, with deterministic op order
// and shortest traces. Serves as the ground-truth oracle for the algorithms.

namespace ef1r {

enum class OpSet { TransfersOnly, TransfersAndExchanges };

struct SearchConfig {
    OpSet ops = OpSet::TransfersOnly;
    std::uint64_t max_states = 5'000'000;
    std::optional<int> max_depth;
    Fairness fairness = Fairness::Ef1;
    // Restrict to operations whose recipients positively value the items they
    // receive, so orientations stay orientations.
    bool orientation_preserving = false;
};

// All valid operations from x, ordered by kind, then agents, then items.
// Exchanges are canonicalized with agent_a < agent_b.
std::vector<Operation> enumerate_valid_ops(const Instance& inst,
                                           const Allocation& x,
                                           const SearchConfig& config);

// Injective encoding of an allocation of a fixed instance.
std::string canonical_key(const Allocation& x);

enum class Verdict { Reachable, Unreachable, ResourceLimit };

struct SearchResult {
    Verdict verdict = Verdict::Unreachable;
    std::optional<RestorationTrace> trace;  // present iff reachable
    std::uint64_t states_explored = 0;
};

// BFS from a near-fair allocation toward any fair one. Returns a shortest
// trace when reachable, `Unreachable` only once the whole reachable set has
// been exhausted within budget, and `ResourceLimit` otherwise.
SearchResult decide_restoration(const Instance& inst, const Allocation& start,
                                const SearchConfig& config);

}  // namespace ef1r
