#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ef1r/core.hpp"
#include "ef1r/reachability.hpp"
#include "ef1r/restore_orientation.hpp"

// Shared test machinery: deterministic random instance generators and a
// brute-force reachability oracle that enumerates the full n^m allocation
// graph, independent of the library's search.

namespace ef1r::testing {

struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}
    int uniform(int lo, int hi) {  // inclusive bounds
        return std::uniform_int_distribution<int>(lo, hi)(gen);
    }
};

inline Instance random_identical_additive(Rng& rng, int n, int m, int lo,
                                          int hi, Mode mode) {
    std::vector<ItemId> ids;
    std::vector<std::int64_t> row;
    for (int k = 1; k <= m; ++k) {
        ids.push_back("g" + std::to_string(k));
        row.push_back(rng.uniform(lo, hi));
    }
    return make_additive_instance(mode, n, ids, {row}, /*identical=*/true);
}

// Deals items one by one to a currently extremal agent among 1..n-1 (least
// valuable bundle for goods, most valuable for chores), which keeps every
// dealt prefix EF1 among those agents; agent 0 stays empty and distinguished.
inline Allocation greedy_near_fair_start(const Instance& inst, Rng& rng) {
    int n = inst.agent_count;
    const Valuation& v = inst.valuation(0);
    std::vector<int> order(static_cast<std::size_t>(inst.item_count()));
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::shuffle(order.begin(), order.end(), rng.gen);

    Allocation x;
    x.distinguished = 0;
    x.bundles.assign(static_cast<std::size_t>(n), {});
    std::vector<std::int64_t> totals(static_cast<std::size_t>(n), 0);
    for (int g : order) {
        std::vector<int> pool;
        for (int k = 1; k < n; ++k) {
            if (pool.empty()) {
                pool.push_back(k);
                continue;
            }
            std::int64_t best = totals[static_cast<std::size_t>(pool.front())];
            std::int64_t cur = totals[static_cast<std::size_t>(k)];
            bool better = inst.mode == Mode::Chores ? cur > best : cur < best;
            if (cur == best) {
                pool.push_back(k);
            } else if (better) {
                pool = {k};
            }
        }
        int pick = pool[static_cast<std::size_t>(
            rng.uniform(0, static_cast<int>(pool.size()) - 1))];
        x.bundles[static_cast<std::size_t>(pick)].push_back(g);
        totals[static_cast<std::size_t>(pick)] += value(v, {g});
    }
    for (Bundle& b : x.bundles) std::sort(b.begin(), b.end());
    return x;
}

inline MultigraphInstance random_multigraph(Rng& rng, int n, int m) {
    MultigraphInstance graph;
    graph.agent_count = n;
    for (int k = 1; k <= m; ++k) {
        int a = rng.uniform(0, n - 1);
        int b = rng.uniform(0, n - 2);
        if (b >= a) ++b;
        graph.edges.push_back({"g" + std::to_string(k), a, b});
    }
    return graph;
}

inline Allocation random_orientation(const MultigraphInstance& graph,
                                     const Instance& inst, Rng& rng) {
    Allocation x;
    x.distinguished = 0;
    x.bundles.assign(static_cast<std::size_t>(inst.agent_count), {});
    for (const MultigraphEdge& e : graph.edges) {
        int owner = e.endpoint_b < 0 || rng.uniform(0, 1) == 0 ? e.endpoint_a
                                                               : e.endpoint_b;
        x.bundles[static_cast<std::size_t>(owner)].push_back(inst.item_index(e.id));
    }
    for (Bundle& b : x.bundles) std::sort(b.begin(), b.end());
    return x;
}

// Rejection sampling: random orientation accepted when at most one agent has
// EF1-envy; that agent (or agent 0) becomes distinguished.
inline std::optional<Allocation> random_near_ef1_orientation(
    const MultigraphInstance& graph, const Instance& inst, Rng& rng) {
    Allocation x = random_orientation(graph, inst, rng);
    int n = inst.agent_count;
    std::vector<int> enviers;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && envy_amount_goods(inst, i, j, x) > 0) {
                enviers.push_back(i);
                break;
            }
        }
    }
    if (enviers.size() > 1) return std::nullopt;
    x.distinguished = enviers.empty() ? 0 : enviers.front();
    return x;
}

// Validates a trace by replaying it with the core primitives only.
inline bool trace_is_sound(const Instance& inst, const RestorationTrace& trace,
                           Fairness fairness, std::string* why = nullptr) {
    auto fail = [&](const std::string& message) {
        if (why) *why = message;
        return false;
    };
    if (!is_near_fair(inst, trace.initial, fairness))
        return fail("initial allocation is not near-fair");
    Allocation x = trace.initial;
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        if (!is_valid(inst, x, trace.steps[k], fairness))
            return fail("step " + std::to_string(k + 1) + " is not valid");
        x = apply(inst, x, trace.steps[k]);
        if (!is_near_fair(inst, x, fairness))
            return fail("prefix after step " + std::to_string(k + 1) +
                        " is not near-fair");
    }
    if (x.bundles != trace.final.bundles)
        return fail("replayed final allocation differs from the recorded one");
    if (!is_fair(inst, x, fairness)) return fail("final allocation is not fair");
    return true;
}

struct NaiveSearchResult {
    bool reachable = false;
    int shortest = -1;
    std::uint64_t near_fair_states = 0;
};

// Ground-truth reachability on the full owner-vector state space: every one
// of the n^m allocations is materialized, edges are single-item moves and
// pairwise swaps filtered by is_valid, and BFS runs over that explicit graph.
inline NaiveSearchResult naive_reachability(const Instance& inst,
                                            const Allocation& start,
                                            bool exchanges, Fairness fairness) {
    int n = inst.agent_count;
    int m = inst.item_count();

    auto owners_of = [&](const Allocation& x) {
        std::vector<int> owners(static_cast<std::size_t>(m), -1);
        for (int i = 0; i < n; ++i)
            for (int g : x.bundles[static_cast<std::size_t>(i)])
                owners[static_cast<std::size_t>(g)] = i;
        return owners;
    };
    auto allocation_of = [&](const std::vector<int>& owners) {
        Allocation x;
        x.distinguished = start.distinguished;
        x.bundles.assign(static_cast<std::size_t>(n), {});
        for (int g = 0; g < m; ++g)
            x.bundles[static_cast<std::size_t>(owners[static_cast<std::size_t>(g)])].push_back(g);
        return x;
    };
    auto key_of = [&](const std::vector<int>& owners) {
        std::string key;
        for (int o : owners) key.push_back(static_cast<char>(o));
        return key;
    };

    NaiveSearchResult result;
    std::unordered_map<std::string, int> dist;
    std::deque<std::vector<int>> frontier;
    std::vector<int> start_owners = owners_of(start);
    dist[key_of(start_owners)] = 0;
    frontier.push_back(start_owners);

    while (!frontier.empty()) {
        std::vector<int> owners = std::move(frontier.front());
        frontier.pop_front();
        Allocation x = allocation_of(owners);
        int depth = dist.at(key_of(owners));
        ++result.near_fair_states;
        if (is_fair(inst, x, fairness)) {
            result.reachable = true;
            result.shortest = depth;
            return result;
        }
        auto try_op = [&](const Operation& op) {
            if (!is_valid(inst, x, op, fairness)) return;
            std::vector<int> next = owners_of(apply(inst, x, op));
            std::string key = key_of(next);
            if (dist.count(key)) return;
            dist[key] = depth + 1;
            frontier.push_back(std::move(next));
        };
        for (int g = 0; g < m; ++g)
            for (int to = 0; to < n; ++to)
                if (to != owners[static_cast<std::size_t>(g)])
                    try_op(Operation::transfer(owners[static_cast<std::size_t>(g)], to, g));
        if (exchanges) {
            for (int g = 0; g < m; ++g)
                for (int h = g + 1; h < m; ++h)
                    if (owners[static_cast<std::size_t>(g)] != owners[static_cast<std::size_t>(h)])
                        try_op(Operation::exchange(owners[static_cast<std::size_t>(g)],
                                                   owners[static_cast<std::size_t>(h)], g, h));
        }
    }
    return result;
}

}  // namespace ef1r::testing
