#pragma once

#include "ef1r/core.hpp"

// Fixed counterexample instances: a mixed-manna allocation and an EFX goods
// allocation from which no valid operation exists, plus the parametric EFX
// family generalizing the latter.

namespace ef1r {

struct Counterexample {
    Instance instance;
    Allocation start;
};

// 4 agents, 17 mixed items, identical additive valuation; the only EF1-envy
// is from the distinguished agent, and no transfer or exchange is valid.
Counterexample gen_mixed_counterexample();

// 2 agents, 6 goods, identical additive valuation; near-EFX with the only
// EFX-envy from the distinguished agent, and no valid operation.
Counterexample gen_efx_counterexample();

// n agents, m goods (m >= n + 2): m-n unit goods with the distinguished
// agent, and n goods of value m-n+1 split two/one/one/... over the rest.
Counterexample gen_efx_family(int n, int m);

// True iff no transfer and no exchange is valid from x under the given
// fairness notion.
bool no_valid_ops(const Instance& inst, const Allocation& x, Fairness fairness);

}  // namespace ef1r
