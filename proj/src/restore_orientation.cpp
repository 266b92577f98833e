#include "ef1r/restore_orientation.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

namespace ef1r {

Instance MultigraphInstance::to_instance() const {
    if (agent_count < 1)
        throw std::invalid_argument("multigraph needs at least one agent");

    std::vector<ItemId> ids;
    ids.reserve(edges.size());
    for (const MultigraphEdge& e : edges) {
        if (e.endpoint_a < 0 || e.endpoint_a >= agent_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (e.endpoint_b >= agent_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (e.endpoint_b == e.endpoint_a)
            throw std::invalid_argument("self-loop edge: " + e.id);
        ids.push_back(e.id);
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw std::invalid_argument("duplicate edge item id");

    Instance inst;
    inst.mode = Mode::Goods;
    inst.agent_count = agent_count;
    inst.identical = false;
    inst.items = ids;

    std::vector<GraphicalValuation> vals(
        static_cast<std::size_t>(agent_count),
        GraphicalValuation{std::vector<char>(ids.size(), 0)});
    for (const MultigraphEdge& e : edges) {
        int g = inst.item_index(e.id);
        vals[static_cast<std::size_t>(e.endpoint_a)].incident[static_cast<std::size_t>(g)] = 1;
        if (e.endpoint_b >= 0)
            vals[static_cast<std::size_t>(e.endpoint_b)].incident[static_cast<std::size_t>(g)] = 1;
    }
    inst.valuations.reserve(vals.size());
    for (auto& v : vals) inst.valuations.push_back(Valuation{std::move(v)});
    return inst;
}

bool is_orientation(const Instance& inst, const Allocation& x) {
    for (int i = 0; i < inst.agent_count; ++i) {
        const Valuation& v = inst.valuation(i);
        for (int g : x.bundles[static_cast<std::size_t>(i)])
            if (value(v, {g}) <= 0) return false;
    }
    return true;
}

namespace {

// BFS distances from `source` along envy edges; -1 where unreachable.
std::vector<int> envy_distances(const EnvyGraph& g, int source) {
    std::vector<int> dist(static_cast<std::size_t>(g.n), -1);
    std::deque<int> queue;
    dist[static_cast<std::size_t>(source)] = 0;
    queue.push_back(source);
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int w : g.out[static_cast<std::size_t>(u)]) {
            if (dist[static_cast<std::size_t>(w)] < 0) {
                dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

bool envy_graph_acyclic(const EnvyGraph& g) {
    std::vector<int> state(static_cast<std::size_t>(g.n), 0);  // 0 new, 1 open, 2 done
    std::vector<std::pair<int, std::size_t>> stack;
    for (int start = 0; start < g.n; ++start) {
        if (state[static_cast<std::size_t>(start)] != 0) continue;
        stack.push_back({start, 0});
        state[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            const auto& row = g.out[static_cast<std::size_t>(u)];
            if (next == row.size()) {
                state[static_cast<std::size_t>(u)] = 2;
                stack.pop_back();
                continue;
            }
            int w = row[next++];
            if (state[static_cast<std::size_t>(w)] == 1) return false;
            if (state[static_cast<std::size_t>(w)] == 0) {
                state[static_cast<std::size_t>(w)] = 1;
                stack.push_back({w, 0});
            }
        }
    }
    return true;
}

}  // namespace

OrientationChecks check_orientation_properties(const Instance& inst,
                                               const Allocation& x) {
    if (!is_orientation(inst, x))
        throw std::invalid_argument("allocation is not an orientation");
    int n = inst.agent_count;
    OrientationChecks checks;

    checks.own_bundle_dominant = true;
    for (int i = 0; i < n && checks.own_bundle_dominant; ++i) {
        const Bundle& own = x.bundles[static_cast<std::size_t>(i)];
        std::int64_t own_value = value(inst.valuation(i), own);
        if (own_value != static_cast<std::int64_t>(own.size())) {
            checks.own_bundle_dominant = false;
            break;
        }
        for (int j = 0; j < n; ++j) {
            if (j != i && value(inst.valuation(j), own) > own_value) {
                checks.own_bundle_dominant = false;
                break;
            }
        }
    }

    EnvyGraph g = envy_graph(inst, x);
    checks.acyclic = envy_graph_acyclic(g);

    checks.path_growth = true;
    if (checks.acyclic) {
        for (int source = 0; source < n && checks.path_growth; ++source) {
            std::vector<int> dist = envy_distances(g, source);
            std::int64_t source_value =
                value(inst.valuation(source), x.bundles[static_cast<std::size_t>(source)]);
            for (int target = 0; target < n; ++target) {
                int d = dist[static_cast<std::size_t>(target)];
                if (d <= 0) continue;
                std::int64_t target_value = value(
                    inst.valuation(target), x.bundles[static_cast<std::size_t>(target)]);
                if (target_value < source_value + d) {
                    checks.path_growth = false;
                    break;
                }
            }
        }
    }
    return checks;
}

std::int64_t max_envy_amount(const Instance& inst, const Allocation& x) {
    int n = inst.agent_count;
    int d = x.distinguished;
    std::int64_t worst = 0;
    for (int other = 0; other < n; ++other) {
        if (other == d) continue;
        std::int64_t amount = inst.mode == Mode::Chores
                                  ? envy_amount(inst, other, d, x)
                                  : envy_amount(inst, d, other, x);
        worst = std::max(worst, amount);
    }
    return worst;
}

RestorationTrace restore_orientation(const Instance& inst,
                                     const Allocation& start) {
    if (!is_orientation(inst, start))
        throw std::invalid_argument("restore_orientation requires an orientation");
    if (!is_near_ef1(inst, start))
        throw std::invalid_argument("restore_orientation requires a near-EF1 start");

    int n = inst.agent_count;
    int d = start.distinguished;

    RestorationTrace trace;
    trace.initial = start;
    Allocation x = start;

    auto d_has_ef1_envy = [&] {
        for (int j = 0; j < n; ++j)
            if (j != d && envy_amount(inst, d, j, x) > 0) return true;
        return false;
    };

    std::int64_t guard = max_envy_amount(inst, start) * (n - 1) + 1;
    while (d_has_ef1_envy()) {
        if (--guard < 0)
            throw std::logic_error("restore_orientation exceeded its transfer bound");
        EnvyGraph g = envy_graph(inst, x);
        std::vector<int> dist = envy_distances(g, d);

        // Closest sink reachable from d, lowest index on distance ties.
        int sink = -1;
        for (int i = 0; i < n; ++i) {
            if (dist[static_cast<std::size_t>(i)] < 0 || !g.is_sink(i)) continue;
            if (sink < 0 ||
                dist[static_cast<std::size_t>(i)] < dist[static_cast<std::size_t>(sink)])
                sink = i;
        }
        if (sink < 0 || sink == d)
            throw std::logic_error("no sink reachable while EF1-envy remains");

        // Lowest-index predecessor of the sink on a shortest path from d.
        int pred = -1;
        for (int u = 0; u < n; ++u) {
            if (dist[static_cast<std::size_t>(u)] ==
                    dist[static_cast<std::size_t>(sink)] - 1 &&
                g.has_edge(u, sink)) {
                pred = u;
                break;
            }
        }
        if (pred < 0) throw std::logic_error("sink has no predecessor on the path");

        // Lowest-indexed item of the sink's bundle the predecessor values.
        const Valuation& pv = inst.valuation(pred);
        int item = -1;
        for (int g_item : x.bundles[static_cast<std::size_t>(sink)]) {
            if (value(pv, {g_item}) > 0) {
                item = g_item;
                break;
            }
        }
        if (item < 0)
            throw std::logic_error("predecessor values nothing in the sink's bundle");

        Operation op = Operation::transfer(sink, pred, item);
        x = apply(inst, x, op);
        trace.steps.push_back(op);
    }
    trace.final = x;
    return trace;
}

PathOrientation gen_path_orientation(int n) {
    if (n < 2) throw std::invalid_argument("gen_path_orientation needs n >= 2");

    PathOrientation out;
    out.graph.agent_count = n;

    std::vector<std::vector<ItemId>> bundles(static_cast<std::size_t>(n));
    int next = 1;
    auto fresh = [&next] { return "g" + std::to_string(next++); };

    // Agent 0: one pendant item. Agent a >= 1: a+2 items shared with a-1.
    {
        ItemId id = fresh();
        out.graph.edges.push_back({id, 0, -1});
        bundles[0].push_back(id);
    }
    for (int a = 1; a < n; ++a) {
        for (int k = 0; k < a + 2; ++k) {
            ItemId id = fresh();
            out.graph.edges.push_back({id, a - 1, a});
            bundles[static_cast<std::size_t>(a)].push_back(id);
        }
    }

    out.instance = out.graph.to_instance();
    out.start = make_allocation(out.instance, bundles, /*distinguished=*/0);
    return out;
}

}  // namespace ef1r
