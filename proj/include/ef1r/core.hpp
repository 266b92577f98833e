#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

// Core domain model for fair division of indivisible items: instances,
// valuations, allocations, envy arithmetic and the validity predicates for
// single-item transfers and pairwise exchanges.

namespace ef1r {

using ItemId = std::string;

// A bundle is a set of item indices, kept sorted ascending.
using Bundle = std::vector<int>;

enum class Mode { Goods, Chores, Mixed };

enum class Fairness { Ef1, Efx };

// v(S) = sum of per-item values over S.
struct AdditiveValuation {
    std::vector<std::int64_t> values;  // indexed by item
};

// Monotone binary valuation given by its minimal value-1 sets:
// v(S) = 1 iff some generator is a subset of S.
struct GeneratorValuation {
    std::vector<Bundle> generators;  // each sorted; none empty
};

// Additive binary valuation induced by edge incidence: the agent values
// exactly the items marked incident, at 1 each.
struct GraphicalValuation {
    std::vector<char> incident;  // indexed by item, 0/1
};

// Explicit monotone valuation over all subsets, indexed by bitmask.
// Only admissible for item counts <= kTableMaxItems.
struct TableValuation {
    std::vector<std::int64_t> values;  // size 1 << m
};

inline constexpr int kTableMaxItems = 24;

struct Valuation {
    std::variant<AdditiveValuation, GeneratorValuation, GraphicalValuation,
                 TableValuation>
        repr;
};

struct Instance {
    Mode mode = Mode::Goods;
    std::vector<ItemId> items;  // sorted, unique; index = position
    int agent_count = 0;
    bool identical = false;
    // One entry when identical, agent_count entries otherwise.
    std::vector<Valuation> valuations;

    int item_count() const { return static_cast<int>(items.size()); }
    const Valuation& valuation(int agent) const {
        return valuations[identical ? 0 : static_cast<std::size_t>(agent)];
    }
    // Index of an item id; throws std::invalid_argument on unknown ids.
    int item_index(const ItemId& id) const;
};

// Ordered partition of the items plus the distinguished agent: the unhappy
// agent for goods/mixed, the envied agent for chores.
struct Allocation {
    std::vector<Bundle> bundles;
    int distinguished = 0;
};

struct Operation {
    enum class Kind { Transfer, Exchange };
    Kind kind = Kind::Transfer;
    int agent_a = 0;   // transfer: source; exchange: first agent
    int agent_b = 0;   // transfer: recipient; exchange: second agent
    int item_a = -1;   // transfer: the item; exchange: item leaving agent_a
    int item_b = -1;   // exchange only: item leaving agent_b

    static Operation transfer(int from, int to, int item) {
        return Operation{Kind::Transfer, from, to, item, -1};
    }
    static Operation exchange(int a, int b, int item_a, int item_b) {
        return Operation{Kind::Exchange, a, b, item_a, item_b};
    }

    friend bool operator==(const Operation&, const Operation&) = default;
};

// Deterministic ordering: transfers before exchanges, then by agents/items.
bool operation_less(const Operation& lhs, const Operation& rhs);

struct EnvyGraph {
    int n = 0;
    std::vector<std::vector<int>> out;  // out[i] = sorted envied agents

    bool has_edge(int i, int j) const;
    bool is_sink(int i) const { return out[static_cast<std::size_t>(i)].empty(); }
};

struct RestorationTrace {
    Allocation initial;
    std::vector<Operation> steps;
    Allocation final;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    const std::string& first() const { return violations.front(); }
};

// --- valuation evaluation ---------------------------------------------------

// Value of a bundle under one valuation. Item indices must be in range;
// table valuations must cover every subset.
std::int64_t value(const Valuation& v, const Bundle& bundle);

std::int64_t agent_value(const Instance& inst, int agent, const Bundle& bundle);

// --- envy arithmetic ---------------------------------------------------------

// Goods: min over g in X_j of v_i(X_j \ g) - v_i(X_i); empty X_j falls back
// to the no-removal margin. Positive iff i EF1-envies j.
std::int64_t envy_amount_goods(const Instance& inst, int i, int j,
                               const Allocation& x);

// Chores: min over c in X_i of v_i(X_j) - v_i(X_i \ c); empty X_i falls back
// to the no-removal margin.
std::int64_t envy_amount_chores(const Instance& inst, int i, int j,
                                const Allocation& x);

// Mixed manna (additive only): minimum over removals of one negative-valued
// item from X_i or one positive-valued item from X_j; the plain margin when
// no such removal exists.
std::int64_t envy_amount_mixed(const Instance& inst, int i, int j,
                               const Allocation& x);

// Mode dispatch over the three variants above.
std::int64_t envy_amount(const Instance& inst, int i, int j,
                         const Allocation& x);

// Plain envy: v_i(X_i) < v_i(X_j).
bool envies(const Instance& inst, int i, int j, const Allocation& x);

// EFX-envy for goods: some single removal from X_j leaves i still envious.
bool efx_envy(const Instance& inst, int i, int j, const Allocation& x);

// max over g in X_j of v_i(X_j \ g) - v_i(X_i); positive iff i EFX-envies j.
std::int64_t efx_envy_amount(const Instance& inst, int i, int j,
                             const Allocation& x);

bool is_ef1(const Instance& inst, const Allocation& x);
bool is_efx(const Instance& inst, const Allocation& x);

// Goods/mixed: every agent except the distinguished one is EF1-happy.
// Chores: no agent except the distinguished one is EF1-envied.
bool is_near_ef1(const Instance& inst, const Allocation& x);
bool is_near_efx(const Instance& inst, const Allocation& x);

bool is_fair(const Instance& inst, const Allocation& x, Fairness fairness);
bool is_near_fair(const Instance& inst, const Allocation& x, Fairness fairness);

EnvyGraph envy_graph(const Instance& inst, const Allocation& x);

// --- allocation mutation ------------------------------------------------------

// Applies an operation, returning the new allocation; the input is untouched.
// Throws std::invalid_argument on malformed operations (item not held by the
// source agent, identical agents, out-of-range indices).
Allocation apply(const Instance& inst, const Allocation& x, const Operation& op);

// A transfer is valid when the result is near-fair with the same
// distinguished agent and the distinguished agent's envy amounts do not grow
// toward any target (for chores: no agent's envy toward the distinguished
// agent grows). An exchange is valid when the result is near-fair with the
// same distinguished agent.
bool is_valid(const Instance& inst, const Allocation& x, const Operation& op,
              Fairness fairness = Fairness::Ef1);

// --- structural validation ----------------------------------------------------

ValidationReport validate(const Instance& inst, const Allocation& x);
ValidationReport validate_instance(const Instance& inst);

// --- construction helpers -----------------------------------------------------

// Builds an instance from per-agent value rows aligned with `ids`; items are
// sorted by id and the rows are permuted accordingly. Pass a single row with
// identical = true for identical valuations.
Instance make_additive_instance(Mode mode, int agent_count,
                                std::vector<ItemId> ids,
                                std::vector<std::vector<std::int64_t>> rows,
                                bool identical);

// Allocation from bundles of item ids.
Allocation make_allocation(const Instance& inst,
                           const std::vector<std::vector<ItemId>>& bundles,
                           int distinguished);

}  // namespace ef1r
