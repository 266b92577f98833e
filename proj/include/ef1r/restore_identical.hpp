#pragma once

#include "ef1r/core.hpp"

// Restoration for identical monotone valuations: repeatedly move the most
// valuable item of the least-affected donor to the unhappy agent (goods), or
// the worst chore of the least-burdened donor to the envied agent (chores).

namespace ef1r {

// Item g in B minimizing v(B \ g): removing the bundle's best item leaves the
// least value behind. Ties break to the lowest item index.
int best_item(const Valuation& v, const Bundle& bundle);

// Chore c in B maximizing v(B \ c). Ties break to the lowest item index.
int worst_chore(const Valuation& v, const Bundle& bundle);

// Requires an identical monotone goods valuation and a near-EF1 start.
// Every transfer in the trace goes to the distinguished agent.
RestorationTrace restore_goods(const Instance& inst, const Allocation& start);

// Chores counterpart; runs until nobody EF1-envies the distinguished agent.
RestorationTrace restore_chores(const Instance& inst, const Allocation& start);

// Worst-case transfer count for identical additive valuations starting from
// an empty distinguished bundle and equal item values: ceil((m-n+1)/n),
// clamped at 0. A single agent needs no transfers.
std::int64_t transfer_bound(int n, std::int64_t m);

struct TightInstance {
    Instance instance;
    Allocation start;
    bool already_ef1 = false;
};

// Identical additive instance with all item values 1, an empty distinguished
// bundle and the remaining items split as evenly as possible over the other
// agents (lower-indexed agents take the extras).
TightInstance gen_tight_identical(int n, int m);

}  // namespace ef1r
