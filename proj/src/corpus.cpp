#include "ef1r/corpus.hpp"

#include <stdexcept>
#include <string>

#include "ef1r/reachability.hpp"

namespace ef1r {

Counterexample gen_mixed_counterexample() {
    std::vector<ItemId> ids;
    for (int k = 1; k <= 17; ++k) ids.push_back("g" + std::to_string(k));
    std::vector<std::int64_t> row = {3,  -10, 10, -1, -1, -1, -1, -1, -1,
                                     6,  -1,  -1, -1, -1, -1, -2, -1};

    Counterexample out;
    out.instance =
        make_additive_instance(Mode::Mixed, 4, ids, {row}, /*identical=*/true);
    out.start = make_allocation(
        out.instance,
        {{"g1", "g2"},
         {"g3", "g4", "g5", "g6", "g7", "g8", "g9"},
         {"g10", "g11", "g12", "g13", "g14", "g15"},
         {"g16", "g17"}},
        /*distinguished=*/0);
    return out;
}

Counterexample gen_efx_counterexample() {
    std::vector<ItemId> ids = {"g1", "g2", "g3", "g4", "g5", "g6"};
    std::vector<std::int64_t> row = {1, 1, 1, 1, 6, 6};

    Counterexample out;
    out.instance =
        make_additive_instance(Mode::Goods, 2, ids, {row}, /*identical=*/true);
    out.start = make_allocation(out.instance,
                                {{"g1", "g2", "g3", "g4"}, {"g5", "g6"}},
                                /*distinguished=*/0);
    return out;
}

Counterexample gen_efx_family(int n, int m) {
    if (n < 2) throw std::invalid_argument("gen_efx_family needs n >= 2");
    if (m < n + 2) throw std::invalid_argument("gen_efx_family needs m >= n + 2");

    std::vector<ItemId> ids;
    std::vector<std::int64_t> row;
    for (int k = 1; k <= m; ++k) {
        ids.push_back("g" + std::to_string(k));
        row.push_back(k <= m - n ? 1 : m - n + 1);
    }

    Counterexample out;
    out.instance =
        make_additive_instance(Mode::Goods, n, ids, {row}, /*identical=*/true);

    std::vector<std::vector<ItemId>> bundles(static_cast<std::size_t>(n));
    for (int k = 1; k <= m - n; ++k)
        bundles[0].push_back("g" + std::to_string(k));
    bundles[1] = {"g" + std::to_string(m - n + 1), "g" + std::to_string(m - n + 2)};
    for (int i = 2; i < n; ++i)
        bundles[static_cast<std::size_t>(i)] = {"g" + std::to_string(m - n + i + 1)};
    out.start = make_allocation(out.instance, bundles, /*distinguished=*/0);
    return out;
}

bool no_valid_ops(const Instance& inst, const Allocation& x, Fairness fairness) {
    SearchConfig config;
    config.ops = OpSet::TransfersAndExchanges;
    config.fairness = fairness;
    return enumerate_valid_ops(inst, x, config).empty();
}

}  // namespace ef1r
