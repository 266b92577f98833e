#include "ef1r/reachability.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace ef1r {

namespace {

bool values_item(const Instance& inst, int agent, int item) {
    return value(inst.valuation(agent), {item}) > 0;
}

}  // namespace

std::vector<Operation> enumerate_valid_ops(const Instance& inst,
                                           const Allocation& x,
                                           const SearchConfig& config) {
    int n = inst.agent_count;
    std::vector<Operation> ops;

    for (int from = 0; from < n; ++from) {
        for (int to = 0; to < n; ++to) {
            if (to == from) continue;
            for (int item : x.bundles[static_cast<std::size_t>(from)]) {
                if (config.orientation_preserving && !values_item(inst, to, item))
                    continue;
                Operation op = Operation::transfer(from, to, item);
                if (is_valid(inst, x, op, config.fairness)) ops.push_back(op);
            }
        }
    }

    if (config.ops == OpSet::TransfersAndExchanges) {
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                for (int item_a : x.bundles[static_cast<std::size_t>(a)]) {
                    for (int item_b : x.bundles[static_cast<std::size_t>(b)]) {
                        if (config.orientation_preserving &&
                            (!values_item(inst, a, item_b) ||
                             !values_item(inst, b, item_a)))
                            continue;
                        Operation op = Operation::exchange(a, b, item_a, item_b);
                        if (is_valid(inst, x, op, config.fairness))
                            ops.push_back(op);
                    }
                }
            }
        }
    }
    return ops;  // loop order already matches operation_less
}

std::string canonical_key(const Allocation& x) {
    std::string key;
    for (const Bundle& bundle : x.bundles) {
        for (int g : bundle) {
            if (g >= 0xffff) throw std::invalid_argument("too many items to key");
            key.push_back(static_cast<char>(g & 0xff));
            key.push_back(static_cast<char>((g >> 8) & 0xff));
        }
        key.push_back('\xff');
        key.push_back('\xff');
    }
    return key;
}

SearchResult decide_restoration(const Instance& inst, const Allocation& start,
                                const SearchConfig& config) {
    if (config.max_states < 1)
        throw std::invalid_argument("state budget must be positive");
    if (!is_near_fair(inst, start, config.fairness))
        throw std::invalid_argument("search requires a near-fair start");

    struct Parent {
        std::string key;
        Operation op;
    };
    std::unordered_map<std::string, Parent> parents;

    std::string start_key = canonical_key(start);
    parents.emplace(start_key, Parent{});

    std::deque<std::pair<Allocation, int>> frontier;  // allocation, depth
    frontier.push_back({start, 0});

    SearchResult result;
    bool truncated = false;

    while (!frontier.empty()) {
        auto [x, depth] = std::move(frontier.front());
        frontier.pop_front();
        ++result.states_explored;

        if (is_fair(inst, x, config.fairness)) {
            RestorationTrace trace;
            trace.initial = start;
            trace.final = x;
            std::string key = canonical_key(x);
            while (key != start_key) {
                const Parent& p = parents.at(key);
                trace.steps.push_back(p.op);
                key = p.key;
            }
            std::reverse(trace.steps.begin(), trace.steps.end());
            result.verdict = Verdict::Reachable;
            result.trace = std::move(trace);
            return result;
        }

        if (config.max_depth && depth >= *config.max_depth) {
            truncated = true;
            continue;
        }

        std::string key = canonical_key(x);
        for (const Operation& op : enumerate_valid_ops(inst, x, config)) {
            Allocation y = apply(inst, x, op);
            std::string y_key = canonical_key(y);
            if (parents.count(y_key)) continue;
            if (parents.size() >= config.max_states) {
                result.verdict = Verdict::ResourceLimit;
                return result;
            }
            parents.emplace(y_key, Parent{key, op});
            frontier.push_back({std::move(y), depth + 1});
        }
    }

    result.verdict = truncated ? Verdict::ResourceLimit : Verdict::Unreachable;
    return result;
}

}  // namespace ef1r
