#include "ef1r/core.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace ef1r {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

Bundle without(const Bundle& bundle, int item) {
    Bundle out;
    out.reserve(bundle.size() - 1);
    for (int g : bundle) {
        if (g != item) out.push_back(g);
    }
    return out;
}

void insert_sorted(Bundle& bundle, int item) {
    bundle.insert(std::lower_bound(bundle.begin(), bundle.end(), item), item);
}

void erase_item(Bundle& bundle, int item) {
    auto it = std::lower_bound(bundle.begin(), bundle.end(), item);
    if (it == bundle.end() || *it != item)
        throw std::invalid_argument("operation item not held by source agent");
    bundle.erase(it);
}

std::uint32_t bundle_mask(const Bundle& bundle) {
    std::uint32_t mask = 0;
    for (int g : bundle) mask |= 1u << g;
    return mask;
}

void check_agent(const Allocation& x, int agent) {
    if (agent < 0 || agent >= static_cast<int>(x.bundles.size()))
        throw std::invalid_argument("agent index out of range");
}

}  // namespace

int Instance::item_index(const ItemId& id) const {
    auto it = std::lower_bound(items.begin(), items.end(), id);
    if (it == items.end() || *it != id)
        throw std::invalid_argument("unknown item id: " + id);
    return static_cast<int>(it - items.begin());
}

bool operation_less(const Operation& lhs, const Operation& rhs) {
    auto key = [](const Operation& op) {
        return std::tuple(static_cast<int>(op.kind), op.agent_a, op.agent_b,
                          op.item_a, op.item_b);
    };
    return key(lhs) < key(rhs);
}

bool EnvyGraph::has_edge(int i, int j) const {
    const auto& row = out[static_cast<std::size_t>(i)];
    return std::binary_search(row.begin(), row.end(), j);
}

std::int64_t value(const Valuation& v, const Bundle& bundle) {
    struct Eval {
        const Bundle& bundle;

        std::int64_t operator()(const AdditiveValuation& a) const {
            std::int64_t sum = 0;
            for (int g : bundle) {
                if (g < 0 || g >= static_cast<int>(a.values.size()))
                    throw std::invalid_argument("item index out of range");
                sum += a.values[static_cast<std::size_t>(g)];
            }
            return sum;
        }
        std::int64_t operator()(const GeneratorValuation& gv) const {
            for (const Bundle& gen : gv.generators) {
                if (std::includes(bundle.begin(), bundle.end(), gen.begin(),
                                  gen.end()))
                    return 1;
            }
            return 0;
        }
        std::int64_t operator()(const GraphicalValuation& gr) const {
            std::int64_t sum = 0;
            for (int g : bundle) {
                if (g < 0 || g >= static_cast<int>(gr.incident.size()))
                    throw std::invalid_argument("item index out of range");
                sum += gr.incident[static_cast<std::size_t>(g)] ? 1 : 0;
            }
            return sum;
        }
        std::int64_t operator()(const TableValuation& t) const {
            std::uint32_t mask = bundle_mask(bundle);
            if (mask >= t.values.size())
                throw std::invalid_argument("table valuation missing an entry");
            return t.values[mask];
        }
    };
    return std::visit(Eval{bundle}, v.repr);
}

std::int64_t agent_value(const Instance& inst, int agent, const Bundle& bundle) {
    return value(inst.valuation(agent), bundle);
}

std::int64_t envy_amount_goods(const Instance& inst, int i, int j,
                               const Allocation& x) {
    if (i == j) throw std::invalid_argument("envy amount needs distinct agents");
    const Valuation& v = inst.valuation(i);
    const Bundle& own = x.bundles[static_cast<std::size_t>(i)];
    const Bundle& other = x.bundles[static_cast<std::size_t>(j)];
    std::int64_t own_value = value(v, own);
    if (other.empty()) return value(v, {}) - own_value;
    std::int64_t best = kInf;
    for (int g : other) best = std::min(best, value(v, without(other, g)));
    return best - own_value;
}

std::int64_t envy_amount_chores(const Instance& inst, int i, int j,
                                const Allocation& x) {
    if (i == j) throw std::invalid_argument("envy amount needs distinct agents");
    const Valuation& v = inst.valuation(i);
    const Bundle& own = x.bundles[static_cast<std::size_t>(i)];
    std::int64_t other_value = value(v, x.bundles[static_cast<std::size_t>(j)]);
    if (own.empty()) return other_value - value(v, {});
    std::int64_t best = -kInf;
    for (int c : own) best = std::max(best, value(v, without(own, c)));
    return other_value - best;
}

std::int64_t envy_amount_mixed(const Instance& inst, int i, int j,
                               const Allocation& x) {
    if (i == j) throw std::invalid_argument("envy amount needs distinct agents");
    const Valuation& v = inst.valuation(i);
    if (!std::holds_alternative<AdditiveValuation>(v.repr))
        throw std::invalid_argument("mixed mode supports additive valuations only");
    const auto& add = std::get<AdditiveValuation>(v.repr);
    const Bundle& own = x.bundles[static_cast<std::size_t>(i)];
    const Bundle& other = x.bundles[static_cast<std::size_t>(j)];
    std::int64_t own_value = value(v, own);
    std::int64_t other_value = value(v, other);

    std::int64_t best = kInf;
    for (int c : own) {
        std::int64_t vc = add.values[static_cast<std::size_t>(c)];
        if (vc < 0) best = std::min(best, other_value - (own_value - vc));
    }
    for (int g : other) {
        std::int64_t vg = add.values[static_cast<std::size_t>(g)];
        if (vg > 0) best = std::min(best, (other_value - vg) - own_value);
    }
    if (best == kInf) return other_value - own_value;
    return best;
}

std::int64_t envy_amount(const Instance& inst, int i, int j,
                         const Allocation& x) {
    switch (inst.mode) {
        case Mode::Goods:
            return envy_amount_goods(inst, i, j, x);
        case Mode::Chores:
            return envy_amount_chores(inst, i, j, x);
        case Mode::Mixed:
            return envy_amount_mixed(inst, i, j, x);
    }
    throw std::logic_error("unknown mode");
}

bool envies(const Instance& inst, int i, int j, const Allocation& x) {
    const Valuation& v = inst.valuation(i);
    return value(v, x.bundles[static_cast<std::size_t>(i)]) <
           value(v, x.bundles[static_cast<std::size_t>(j)]);
}

bool efx_envy(const Instance& inst, int i, int j, const Allocation& x) {
    if (i == j) throw std::invalid_argument("EFX-envy needs distinct agents");
    if (inst.mode != Mode::Goods)
        throw std::invalid_argument("EFX-envy is defined for goods");
    const Valuation& v = inst.valuation(i);
    const Bundle& other = x.bundles[static_cast<std::size_t>(j)];
    std::int64_t own_value = value(v, x.bundles[static_cast<std::size_t>(i)]);
    for (int g : other) {
        if (own_value < value(v, without(other, g))) return true;
    }
    return false;
}

std::int64_t efx_envy_amount(const Instance& inst, int i, int j,
                             const Allocation& x) {
    if (i == j) throw std::invalid_argument("EFX-envy needs distinct agents");
    if (inst.mode != Mode::Goods)
        throw std::invalid_argument("EFX-envy is defined for goods");
    const Valuation& v = inst.valuation(i);
    const Bundle& other = x.bundles[static_cast<std::size_t>(j)];
    std::int64_t own_value = value(v, x.bundles[static_cast<std::size_t>(i)]);
    if (other.empty()) return value(v, {}) - own_value;
    std::int64_t worst = -kInf;
    for (int g : other) worst = std::max(worst, value(v, without(other, g)));
    return worst - own_value;
}

bool is_ef1(const Instance& inst, const Allocation& x) {
    int n = inst.agent_count;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && envy_amount(inst, i, j, x) > 0) return false;
    return true;
}

bool is_efx(const Instance& inst, const Allocation& x) {
    int n = inst.agent_count;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && efx_envy(inst, i, j, x)) return false;
    return true;
}

bool is_near_ef1(const Instance& inst, const Allocation& x) {
    int n = inst.agent_count;
    int d = x.distinguished;
    if (inst.mode == Mode::Chores) {
        // No agent other than d may be EF1-envied.
        for (int j = 0; j < n; ++j) {
            if (j == d) continue;
            for (int i = 0; i < n; ++i)
                if (i != j && envy_amount(inst, i, j, x) > 0) return false;
        }
        return true;
    }
    for (int i = 0; i < n; ++i) {
        if (i == d) continue;
        for (int j = 0; j < n; ++j)
            if (i != j && envy_amount(inst, i, j, x) > 0) return false;
    }
    return true;
}

bool is_near_efx(const Instance& inst, const Allocation& x) {
    int n = inst.agent_count;
    int d = x.distinguished;
    for (int i = 0; i < n; ++i) {
        if (i == d) continue;
        for (int j = 0; j < n; ++j)
            if (i != j && efx_envy(inst, i, j, x)) return false;
    }
    return true;
}

bool is_fair(const Instance& inst, const Allocation& x, Fairness fairness) {
    return fairness == Fairness::Ef1 ? is_ef1(inst, x) : is_efx(inst, x);
}

bool is_near_fair(const Instance& inst, const Allocation& x, Fairness fairness) {
    return fairness == Fairness::Ef1 ? is_near_ef1(inst, x) : is_near_efx(inst, x);
}

EnvyGraph envy_graph(const Instance& inst, const Allocation& x) {
    EnvyGraph g;
    g.n = inst.agent_count;
    g.out.resize(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (i != j && envies(inst, i, j, x))
                g.out[static_cast<std::size_t>(i)].push_back(j);
    return g;
}

Allocation apply(const Instance& inst, const Allocation& x, const Operation& op) {
    Allocation y = x;
    if (op.kind == Operation::Kind::Transfer) {
        check_agent(x, op.agent_a);
        check_agent(x, op.agent_b);
        if (op.agent_a == op.agent_b)
            throw std::invalid_argument("transfer needs distinct agents");
        if (op.item_a < 0 || op.item_a >= inst.item_count())
            throw std::invalid_argument("item index out of range");
        erase_item(y.bundles[static_cast<std::size_t>(op.agent_a)], op.item_a);
        insert_sorted(y.bundles[static_cast<std::size_t>(op.agent_b)], op.item_a);
    } else {
        check_agent(x, op.agent_a);
        check_agent(x, op.agent_b);
        if (op.agent_a == op.agent_b)
            throw std::invalid_argument("exchange needs distinct agents");
        if (op.item_a == op.item_b)
            throw std::invalid_argument("exchange needs distinct items");
        erase_item(y.bundles[static_cast<std::size_t>(op.agent_a)], op.item_a);
        erase_item(y.bundles[static_cast<std::size_t>(op.agent_b)], op.item_b);
        insert_sorted(y.bundles[static_cast<std::size_t>(op.agent_a)], op.item_b);
        insert_sorted(y.bundles[static_cast<std::size_t>(op.agent_b)], op.item_a);
    }
    return y;
}

namespace {

bool ef1_transfer_monotone(const Instance& inst, const Allocation& x,
                           const Allocation& y) {
    int n = inst.agent_count;
    int d = x.distinguished;
    if (inst.mode == Mode::Chores) {
        for (int i = 0; i < n; ++i) {
            if (i == d) continue;
            if (envy_amount(inst, i, d, y) > envy_amount(inst, i, d, x))
                return false;
        }
        return true;
    }
    for (int j = 0; j < n; ++j) {
        if (j == d) continue;
        if (envy_amount(inst, d, j, y) > envy_amount(inst, d, j, x)) return false;
    }
    return true;
}

bool efx_transfer_monotone(const Instance& inst, const Allocation& x,
                           const Allocation& y) {
    int n = inst.agent_count;
    int d = x.distinguished;
    for (int j = 0; j < n; ++j) {
        if (j == d) continue;
        if (efx_envy_amount(inst, d, j, y) > efx_envy_amount(inst, d, j, x))
            return false;
    }
    return true;
}

}  // namespace

bool is_valid(const Instance& inst, const Allocation& x, const Operation& op,
              Fairness fairness) {
    Allocation y = apply(inst, x, op);
    if (!is_near_fair(inst, y, fairness)) return false;
    if (op.kind == Operation::Kind::Exchange) return true;
    return fairness == Fairness::Ef1 ? ef1_transfer_monotone(inst, x, y)
                                     : efx_transfer_monotone(inst, x, y);
}

namespace {

void check_valuation(const Instance& inst, const Valuation& v, int agent,
                     ValidationReport& report) {
    int m = inst.item_count();
    std::string who =
        agent < 0 ? std::string("identical valuation")
                  : "valuation of agent " + std::to_string(agent);

    if (const auto* a = std::get_if<AdditiveValuation>(&v.repr)) {
        if (static_cast<int>(a->values.size()) != m) {
            report.violations.push_back(who + ": additive value count != item count");
            return;
        }
        for (int g = 0; g < m; ++g) {
            std::int64_t val = a->values[static_cast<std::size_t>(g)];
            if (inst.mode == Mode::Goods && val < 0)
                report.violations.push_back(who + ": negative value for good " +
                                            inst.items[static_cast<std::size_t>(g)]);
            if (inst.mode == Mode::Chores && val > 0)
                report.violations.push_back(who + ": positive value for chore " +
                                            inst.items[static_cast<std::size_t>(g)]);
        }
        return;
    }
    if (inst.mode == Mode::Mixed) {
        report.violations.push_back(who + ": mixed mode requires additive valuations");
        return;
    }
    if (const auto* gv = std::get_if<GeneratorValuation>(&v.repr)) {
        if (inst.mode != Mode::Goods)
            report.violations.push_back(who + ": generator valuations are goods-only");
        for (const Bundle& gen : gv->generators) {
            if (gen.empty()) {
                report.violations.push_back(who + ": empty generator set");
                continue;
            }
            if (!std::is_sorted(gen.begin(), gen.end()) ||
                std::adjacent_find(gen.begin(), gen.end()) != gen.end())
                report.violations.push_back(who + ": generator set not sorted/unique");
            for (int g : gen)
                if (g < 0 || g >= m)
                    report.violations.push_back(who + ": generator references unknown item");
        }
        return;
    }
    if (const auto* gr = std::get_if<GraphicalValuation>(&v.repr)) {
        if (inst.mode != Mode::Goods)
            report.violations.push_back(who + ": graphical valuations are goods-only");
        if (static_cast<int>(gr->incident.size()) != m)
            report.violations.push_back(who + ": incidence vector size != item count");
        return;
    }
    const auto& t = std::get<TableValuation>(v.repr);
    if (m > kTableMaxItems) {
        report.violations.push_back(who + ": table valuations capped at " +
                                    std::to_string(kTableMaxItems) + " items");
        return;
    }
    if (t.values.size() != (std::size_t{1} << m)) {
        report.violations.push_back(who + ": table does not cover every subset");
        return;
    }
    if (t.values[0] != 0)
        report.violations.push_back(who + ": table value of the empty set is not 0");
    // Monotone non-decreasing for goods, non-increasing for chores; one-item
    // extensions suffice.
    for (std::uint32_t mask = 0; mask < t.values.size(); ++mask) {
        for (int g = 0; g < m; ++g) {
            if (mask & (1u << g)) continue;
            std::int64_t lo = t.values[mask];
            std::int64_t hi = t.values[mask | (1u << g)];
            bool bad = inst.mode == Mode::Goods ? hi < lo : hi > lo;
            if (bad) {
                report.violations.push_back(
                    who + ": table not monotone at item " +
                    inst.items[static_cast<std::size_t>(g)]);
                return;
            }
        }
    }
}

}  // namespace

ValidationReport validate_instance(const Instance& inst) {
    ValidationReport report;
    if (inst.agent_count < 1)
        report.violations.push_back("instance needs at least one agent");
    if (!std::is_sorted(inst.items.begin(), inst.items.end()))
        report.violations.push_back("item ids not sorted");
    if (std::adjacent_find(inst.items.begin(), inst.items.end()) != inst.items.end())
        report.violations.push_back("duplicate item id");

    std::size_t expected = inst.identical
                               ? 1u
                               : static_cast<std::size_t>(inst.agent_count);
    if (inst.valuations.size() != expected) {
        report.violations.push_back("valuation count mismatch");
        return report;
    }
    if (inst.identical) {
        check_valuation(inst, inst.valuations[0], -1, report);
    } else {
        for (int i = 0; i < inst.agent_count; ++i)
            check_valuation(inst, inst.valuations[static_cast<std::size_t>(i)], i,
                            report);
    }

    // Each item may be positively valued by at most two agents when any
    // graphical valuation is present.
    bool any_graphical = false;
    for (const Valuation& v : inst.valuations)
        if (std::holds_alternative<GraphicalValuation>(v.repr)) any_graphical = true;
    if (any_graphical && report.ok()) {
        for (int g = 0; g < inst.item_count(); ++g) {
            int holders = 0;
            for (int i = 0; i < inst.agent_count; ++i)
                if (value(inst.valuation(i), {g}) > 0) ++holders;
            if (holders > 2) {
                report.violations.push_back(
                    "item " + inst.items[static_cast<std::size_t>(g)] +
                    " positively valued by more than two agents");
            }
        }
    }
    return report;
}

ValidationReport validate(const Instance& inst, const Allocation& x) {
    ValidationReport report = validate_instance(inst);

    if (static_cast<int>(x.bundles.size()) != inst.agent_count) {
        report.violations.push_back("bundle count != agent count");
        return report;
    }
    if (x.distinguished < 0 || x.distinguished >= inst.agent_count)
        report.violations.push_back("distinguished agent out of range");

    std::vector<int> seen(static_cast<std::size_t>(inst.item_count()), 0);
    for (const Bundle& bundle : x.bundles) {
        if (!std::is_sorted(bundle.begin(), bundle.end()))
            report.violations.push_back("bundle not sorted");
        for (int g : bundle) {
            if (g < 0 || g >= inst.item_count()) {
                report.violations.push_back("bundle references unknown item");
                continue;
            }
            ++seen[static_cast<std::size_t>(g)];
        }
    }
    for (int g = 0; g < inst.item_count(); ++g) {
        if (seen[static_cast<std::size_t>(g)] == 0)
            report.violations.push_back("item " + inst.items[static_cast<std::size_t>(g)] +
                                        " not allocated");
        else if (seen[static_cast<std::size_t>(g)] > 1)
            report.violations.push_back("item " + inst.items[static_cast<std::size_t>(g)] +
                                        " allocated more than once");
    }
    return report;
}

Instance make_additive_instance(Mode mode, int agent_count,
                                std::vector<ItemId> ids,
                                std::vector<std::vector<std::int64_t>> rows,
                                bool identical) {
    if (identical ? rows.size() != 1
                  : rows.size() != static_cast<std::size_t>(agent_count))
        throw std::invalid_argument("valuation row count mismatch");
    std::vector<int> order(ids.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ids[static_cast<std::size_t>(a)] <
                                         ids[static_cast<std::size_t>(b)]; });

    Instance inst;
    inst.mode = mode;
    inst.identical = identical;
    inst.agent_count = agent_count;
    inst.items.reserve(ids.size());
    for (int k : order) inst.items.push_back(ids[static_cast<std::size_t>(k)]);

    for (const auto& row : rows) {
        if (row.size() != ids.size())
            throw std::invalid_argument("valuation row size mismatch");
        AdditiveValuation add;
        add.values.reserve(row.size());
        for (int k : order) add.values.push_back(row[static_cast<std::size_t>(k)]);
        inst.valuations.push_back(Valuation{std::move(add)});
    }
    return inst;
}

Allocation make_allocation(const Instance& inst,
                           const std::vector<std::vector<ItemId>>& bundles,
                           int distinguished) {
    Allocation x;
    x.distinguished = distinguished;
    x.bundles.reserve(bundles.size());
    for (const auto& ids : bundles) {
        Bundle b;
        b.reserve(ids.size());
        for (const ItemId& id : ids) b.push_back(inst.item_index(id));
        std::sort(b.begin(), b.end());
        x.bundles.push_back(std::move(b));
    }
    return x;
}

}  // namespace ef1r
