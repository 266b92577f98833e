#pragma once

#include "ef1r/core.hpp"

// EF1 restoration over orientations of multigraph instances with binary
// additive valuations: every item is an edge valued at 1 by its endpoints
// (pendant items have a single endpoint) and must stay with an endpoint.

namespace ef1r {

struct MultigraphEdge {
    ItemId id;
    int endpoint_a = 0;
    int endpoint_b = -1;  // -1 for a pendant item valued by one agent only
};

struct MultigraphInstance {
    int agent_count = 0;
    std::vector<MultigraphEdge> edges;  // parallel edges allowed, no self-loops

    // Instance with one graphical valuation per agent. Throws on self-loops
    // or out-of-range endpoints.
    Instance to_instance() const;
};

// True iff every item is held by an agent with positive value for it.
bool is_orientation(const Instance& inst, const Allocation& x);

// Structural facts about orientations under graphical binary valuations:
// (1) each agent values its own bundle at |bundle|, at least as much as
//     anyone else values it;
// (2) along any directed envy path of length d the endpoint's bundle value
//     exceeds the source's by at least d;
// (3) the envy graph is acyclic.
struct OrientationChecks {
    bool own_bundle_dominant = false;
    bool path_growth = false;
    bool acyclic = false;

    bool all() const { return own_bundle_dominant && path_growth && acyclic; }
};

OrientationChecks check_orientation_properties(const Instance& inst,
                                               const Allocation& x);

// Repeatedly transfers an item from the closest sink of the envy graph to the
// sink's predecessor on a shortest path from the distinguished agent, until
// the distinguished agent has no EF1-envy. Requires a near-EF1 orientation;
// every intermediate allocation is again a near-EF1 orientation.
RestorationTrace restore_orientation(const Instance& inst,
                                     const Allocation& start);

// Largest envy amount involving the distinguished agent, clamped at 0:
// max_j eps_{d->j} for goods/mixed and max_i eps_{i->d} for chores.
std::int64_t max_envy_amount(const Instance& inst, const Allocation& x);

struct PathOrientation {
    MultigraphInstance graph;
    Instance instance;
    Allocation start;
};

// Near-EF1 orientation whose envy graph is the single path 0 -> 1 -> ... ->
// n-1: agent 0 holds one pendant item, agent i >= 1 holds i+2 items shared
// with agent i-1, and restoring EF1 takes exactly n-1 transfers. Total item
// count is (n^2 + 3n - 2) / 2.
PathOrientation gen_path_orientation(int n);

}  // namespace ef1r
