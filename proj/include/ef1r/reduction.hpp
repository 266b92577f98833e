#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "ef1r/core.hpp"

// Perfect matching reconfiguration on bipartite graphs, and the construction
// that embeds it into restoration instances with monotone binary valuations:
// n+3 agents, 3n+4 items, and exactly one fair target allocation.

namespace ef1r {

struct PmrInstance {
    std::vector<std::string> left;               // names of the A side
    std::vector<std::string> right;              // names of the B side
    std::vector<std::pair<int, int>> edges;      // (left index, right index)
    std::vector<std::pair<int, int>> m0;         // start matching, edge list
    std::vector<std::pair<int, int>> mstar;      // target matching, edge list
};

// A perfect matching as sigma: left vertex i is matched to right sigma[i].
using PmrMatching = std::vector<int>;

struct PmrReport {
    std::vector<std::string> violations;
    // Target permutation after renaming the right side so m0 becomes the
    // identity; meaningful only when ok().
    std::vector<int> pi;

    bool ok() const { return violations.empty(); }
};

PmrReport validate_pmr(const PmrInstance& p);

// Edge list of a matching as sigma form; throws if not a perfect matching.
PmrMatching matching_from_edges(const PmrInstance& p,
                                const std::vector<std::pair<int, int>>& edges);

// All matchings reachable from m by one flip: swap the partners of two left
// vertices around a 4-cycle of the graph. Deterministic order by vertex pair.
std::vector<PmrMatching> pmr_flips(const PmrInstance& p, const PmrMatching& m);

// BFS over flips from m0; true iff mstar is reached.
bool pmr_reachable(const PmrInstance& p);

struct ReductionInstance {
    Instance instance;
    Allocation start;    // distinguished agent 0 with an empty bundle
    Allocation target;   // the unique fair allocation
    int n = 0;           // matching size; agents are {0, .., n+2}

    // Right side renamed so the start matching is the identity.
    std::vector<int> pi;                       // target permutation
    std::vector<std::vector<char>> adjacency;  // adjacency[i][j]: edge (a_i, b_j)

    std::vector<int> a_items, abar_items, b_items;  // item indices per pair
    std::array<int, 4> r_items{};                   // r1..r4

    // Name of the original right vertex behind canonical b_j.
    std::vector<std::string> right_names;
};

// Builds the restoration instance of a valid PMR instance. The constructor
// re-checks every zero-valued set of the construction against the generator
// families and that the start allocation is near-EF1 with only agent 0
// possibly EF1-envious; violations throw std::logic_error.
ReductionInstance build_reduction(const PmrInstance& p);

// Mutually inverse bijection between canonical-shape allocations (agent i
// holds {a_i, abar_i, one b item}) and perfect matchings in canonical
// indexing. Non-canonical allocations throw std::invalid_argument.
PmrMatching allocation_to_matching(const ReductionInstance& r,
                                   const Allocation& y);
Allocation matching_to_allocation(const ReductionInstance& r,
                                  const PmrMatching& m);

// Flips of a canonical matching legal in the reduced graph.
std::vector<PmrMatching> reduction_flips(const ReductionInstance& r,
                                         const PmrMatching& m);

}  // namespace ef1r
