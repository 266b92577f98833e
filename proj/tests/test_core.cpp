#include <doctest.h>

#include <algorithm>
#include <array>
#include <set>

#include "ef1r/core.hpp"
#include "ef1r/corpus.hpp"
#include "ef1r/restore_orientation.hpp"
#include "helpers.hpp"

using namespace ef1r;
using testing::Rng;

namespace {

Instance two_agent_singletons(std::int64_t item_value) {
    return make_additive_instance(Mode::Goods, 2, {"a", "b"},
                                  {{item_value, item_value}},
                                  /*identical=*/true);
}

}  // namespace

TEST_CASE("value evaluates every representation") {
    SUBCASE("additive") {
        Instance inst = make_additive_instance(
            Mode::Goods, 1, {"g5", "g6"}, {{6, 6}}, true);
        CHECK(value(inst.valuation(0), {0, 1}) == 12);
        CHECK(value(inst.valuation(0), {}) == 0);
    }
    SUBCASE("generators") {
        // Items r1..r4 at indices 0..3; value-1 sets {r3,r4}, {r1}, {r2}.
        GeneratorValuation gv;
        gv.generators = {{2, 3}, {0}, {1}};
        Valuation v{gv};
        CHECK(value(v, {2}) == 0);
        CHECK(value(v, {3}) == 0);
        CHECK(value(v, {2, 3}) == 1);
        CHECK(value(v, {0}) == 1);
        CHECK(value(v, {}) == 0);
    }
    SUBCASE("graphical") {
        GraphicalValuation gr;
        gr.incident = {1, 0, 1};
        Valuation v{gr};
        CHECK(value(v, {0, 1, 2}) == 2);
        CHECK(value(v, {1}) == 0);
        CHECK(value(v, {}) == 0);
    }
    SUBCASE("table") {
        TableValuation t;
        t.values = {0, 1, 1, 1};  // two items, union valued 1
        Valuation v{t};
        CHECK(value(v, {0}) == 1);
        CHECK(value(v, {0, 1}) == 1);
        CHECK(value(v, {}) == 0);
    }
    SUBCASE("errors") {
        Instance inst = make_additive_instance(Mode::Goods, 1, {"a"}, {{1}}, true);
        CHECK_THROWS_AS(value(inst.valuation(0), {5}), std::invalid_argument);
        TableValuation t;
        t.values = {0, 1};  // covers one item only
        CHECK_THROWS_AS(value(Valuation{t}, {1}), std::invalid_argument);
        CHECK_THROWS_AS(inst.item_index("zzz"), std::invalid_argument);
    }
}

TEST_CASE("goods envy amounts") {
    SUBCASE("envy path instance") {
        PathOrientation p = gen_path_orientation(3);
        CHECK(envy_amount_goods(p.instance, 0, 1, p.start) == 1);
    }
    SUBCASE("equal singletons") {
        Instance inst = two_agent_singletons(5);
        Allocation x = make_allocation(inst, {{"a"}, {"b"}}, 0);
        CHECK(envy_amount_goods(inst, 0, 1, x) == -5);
    }
    SUBCASE("both removals enumerated") {
        Instance inst = make_additive_instance(Mode::Goods, 2,
                                               {"g1", "g2", "g3"},
                                               {{3, 1, 1}}, true);
        Allocation x = make_allocation(inst, {{"g2"}, {"g1", "g3"}}, 0);
        CHECK(envy_amount_goods(inst, 0, 1, x) == 0);
    }
    SUBCASE("empty envied bundle uses the margin") {
        Instance inst = two_agent_singletons(5);
        Allocation x = make_allocation(inst, {{"a", "b"}, {}}, 0);
        CHECK(envy_amount_goods(inst, 0, 1, x) == -10);
        CHECK(envy_amount_goods(inst, 1, 0, x) > 0);
    }
    SUBCASE("identical agents rejected") {
        Instance inst = two_agent_singletons(1);
        Allocation x = make_allocation(inst, {{"a"}, {"b"}}, 0);
        CHECK_THROWS_AS(envy_amount_goods(inst, 1, 1, x), std::invalid_argument);
    }
}

TEST_CASE("chores envy amounts") {
    Instance inst = make_additive_instance(Mode::Chores, 2, {"c1", "c2"},
                                           {{-1, -1}}, true);
    SUBCASE("empty-handed agent is EF1-envied") {
        Allocation x = make_allocation(inst, {{"c1", "c2"}, {}}, 1);
        CHECK(envy_amount_chores(inst, 0, 1, x) == 1);
    }
    SUBCASE("empty own bundle never EF1-envies") {
        Allocation x = make_allocation(inst, {{}, {"c1", "c2"}}, 0);
        CHECK(envy_amount_chores(inst, 0, 1, x) == -2);
    }
    SUBCASE("symmetric singletons") {
        Allocation x = make_allocation(inst, {{"c1"}, {"c2"}}, 0);
        CHECK(envy_amount_chores(inst, 0, 1, x) == -1);
    }
}

TEST_CASE("mixed envy amounts") {
    Counterexample b = gen_mixed_counterexample();
    CHECK(envy_amount_mixed(b.instance, 0, 1, b.start) == 1);
    CHECK(envy_amount_mixed(b.instance, 2, 1, b.start) <= 0);

    SUBCASE("single good removal kills the envy") {
        Instance inst = make_additive_instance(Mode::Mixed, 2, {"g"}, {{7}}, true);
        Allocation x = make_allocation(inst, {{}, {"g"}}, 0);
        CHECK(envy_amount_mixed(inst, 0, 1, x) == 0);
    }
    SUBCASE("no removal candidates falls back to the margin") {
        Instance inst =
            make_additive_instance(Mode::Mixed, 2, {"g1", "g2"}, {{0, 0}}, true);
        Allocation x = make_allocation(inst, {{"g1"}, {"g2"}}, 0);
        CHECK(envy_amount_mixed(inst, 0, 1, x) == 0);
    }
    SUBCASE("non-additive valuations are rejected") {
        Instance inst = make_additive_instance(Mode::Mixed, 2, {"g"}, {{1}}, true);
        inst.valuations[0] = Valuation{GeneratorValuation{{{0}}}};
        Allocation x = make_allocation(inst, {{"g"}, {}}, 0);
        CHECK_THROWS_AS(envy_amount_mixed(inst, 0, 1, x), std::invalid_argument);
    }
}

TEST_CASE("is_ef1 and is_near_ef1") {
    PathOrientation p = gen_path_orientation(3);
    CHECK_FALSE(is_ef1(p.instance, p.start));
    CHECK(is_near_ef1(p.instance, p.start));

    SUBCASE("single agent is vacuously EF1") {
        Instance inst = make_additive_instance(Mode::Goods, 1, {"a", "b"},
                                               {{3, 4}}, true);
        Allocation x = make_allocation(inst, {{"a", "b"}}, 0);
        CHECK(is_ef1(inst, x));
        CHECK(is_near_ef1(inst, x));
    }
    SUBCASE("chores convention exempts the envied agent") {
        Instance inst = make_additive_instance(Mode::Chores, 3,
                                               {"c1", "c2", "c3", "c4"},
                                               {{-1, -1, -1, -1}}, true);
        Allocation x =
            make_allocation(inst, {{}, {"c1", "c2"}, {"c3", "c4"}}, 0);
        CHECK(is_near_ef1(inst, x));
        CHECK_FALSE(is_ef1(inst, x));
        Allocation wrong_d = x;
        wrong_d.distinguished = 1;
        CHECK_FALSE(is_near_ef1(inst, wrong_d));
    }
}

TEST_CASE("envy graph") {
    SUBCASE("path instance gives the single path") {
        PathOrientation p = gen_path_orientation(4);
        EnvyGraph g = envy_graph(p.instance, p.start);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j) CHECK(g.has_edge(i, j) == (j == i + 1));
    }
    SUBCASE("no items, no edges") {
        Instance inst = make_additive_instance(Mode::Goods, 3,
                                               std::vector<ItemId>{},
                                               {{}}, true);
        Allocation x{{{}, {}, {}}, 0};
        EnvyGraph g = envy_graph(inst, x);
        for (int i = 0; i < 3; ++i) CHECK(g.is_sink(i));
    }
    SUBCASE("stuck EFX instance has one envy edge") {
        Counterexample c = gen_efx_counterexample();
        EnvyGraph g = envy_graph(c.instance, c.start);
        CHECK(g.has_edge(0, 1));
        CHECK_FALSE(g.has_edge(1, 0));
    }
}

TEST_CASE("apply") {
    PathOrientation p = gen_path_orientation(3);
    const Instance& inst = p.instance;

    SUBCASE("transfer moves one item") {
        Allocation y = apply(inst, p.start,
                             Operation::transfer(2, 1, inst.item_index("g5")));
        Allocation want = make_allocation(
            inst, {{"g1"}, {"g2", "g3", "g4", "g5"}, {"g6", "g7", "g8"}}, 0);
        CHECK(y.bundles == want.bundles);
        CHECK(p.start.bundles[2].size() == 4);  // input untouched
    }
    SUBCASE("transfer then reverse restores the allocation") {
        int g5 = inst.item_index("g5");
        Allocation y = apply(inst, p.start, Operation::transfer(2, 1, g5));
        Allocation z = apply(inst, y, Operation::transfer(1, 2, g5));
        CHECK(z.bundles == p.start.bundles);
        CHECK(z.distinguished == p.start.distinguished);
    }
    SUBCASE("malformed operations throw") {
        CHECK_THROWS_AS(apply(inst, p.start,
                              Operation::transfer(0, 1, inst.item_index("g5"))),
                        std::invalid_argument);
        CHECK_THROWS_AS(apply(inst, p.start,
                              Operation::transfer(1, 1, inst.item_index("g2"))),
                        std::invalid_argument);
        CHECK_THROWS_AS(apply(inst, p.start, Operation::transfer(0, 1, 99)),
                        std::invalid_argument);
    }
}

TEST_CASE("transfer validity") {
    PathOrientation p = gen_path_orientation(3);
    const Instance& inst = p.instance;
    CHECK(is_valid(inst, p.start, Operation::transfer(2, 1, inst.item_index("g5"))));
    // Giving from the middle of the envy path creates EF1-envy downstream.
    CHECK_FALSE(is_valid(inst, p.start, Operation::transfer(1, 0, inst.item_index("g2"))));

    SUBCASE("zero-valued equal singletons: both cross transfers valid") {
        Instance inst0 = two_agent_singletons(0);
        Allocation x = make_allocation(inst0, {{"a"}, {"b"}}, 0);
        CHECK(is_ef1(inst0, x));
        CHECK(is_valid(inst0, x, Operation::transfer(0, 1, 0)));
        CHECK(is_valid(inst0, x, Operation::transfer(1, 0, 1)));
    }
    SUBCASE("positive equal singletons: both cross transfers invalid") {
        // Toward the distinguished agent near-EF1 breaks; away from it the
        // distinguished agent's envy amount grows.
        Instance inst5 = two_agent_singletons(5);
        Allocation x = make_allocation(inst5, {{"a"}, {"b"}}, 0);
        Allocation away = apply(inst5, x, Operation::transfer(0, 1, 0));
        CHECK(is_near_ef1(inst5, away));
        CHECK_FALSE(is_valid(inst5, x, Operation::transfer(0, 1, 0)));
        CHECK_FALSE(is_near_ef1(inst5, apply(inst5, x, Operation::transfer(1, 0, 1))));
        CHECK_FALSE(is_valid(inst5, x, Operation::transfer(1, 0, 1)));
    }
}

TEST_CASE("EFX envy") {
    Counterexample c = gen_efx_counterexample();
    CHECK(efx_envy(c.instance, 0, 1, c.start));
    CHECK_FALSE(efx_envy(c.instance, 1, 0, c.start));
    CHECK(is_near_efx(c.instance, c.start));

    SUBCASE("singleton bundles are never EFX-envied") {
        Instance inst = two_agent_singletons(9);
        Allocation x = make_allocation(inst, {{"a"}, {"b"}}, 0);
        CHECK_FALSE(efx_envy(inst, 0, 1, x));
    }
    SUBCASE("amount agrees with the indicator") {
        Rng rng(2024);
        for (int round = 0; round < 60; ++round) {
            int n = rng.uniform(2, 4);
            int m = rng.uniform(1, 7);
            Instance inst =
                testing::random_identical_additive(rng, n, m, 0, 6, Mode::Goods);
            Allocation x;
            x.distinguished = 0;
            x.bundles.assign(static_cast<std::size_t>(n), {});
            for (int g = 0; g < m; ++g)
                x.bundles[static_cast<std::size_t>(rng.uniform(0, n - 1))].push_back(g);
            for (auto& b : x.bundles) std::sort(b.begin(), b.end());
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j)
                        CHECK(efx_envy(inst, i, j, x) ==
                              (efx_envy_amount(inst, i, j, x) > 0));
        }
    }
}

TEST_CASE("validate") {
    PathOrientation p = gen_path_orientation(3);
    CHECK(validate(p.instance, p.start).ok());

    SUBCASE("duplicate allocation") {
        Allocation bad = p.start;
        bad.bundles[0].push_back(p.instance.item_index("g5"));
        std::sort(bad.bundles[0].begin(), bad.bundles[0].end());
        ValidationReport report = validate(p.instance, bad);
        CHECK_FALSE(report.ok());
        CHECK(report.first().find("more than once") != std::string::npos);
    }
    SUBCASE("missing item") {
        Allocation bad = p.start;
        bad.bundles[2].pop_back();
        CHECK_FALSE(validate(p.instance, bad).ok());
    }
    SUBCASE("non-monotone table") {
        Instance inst = make_additive_instance(Mode::Goods, 1, {"g1", "g2"},
                                               {{0, 0}}, true);
        TableValuation t;
        t.values = {0, 2, 0, 1};  // v({g1}) = 2 > v({g1,g2}) = 1
        inst.valuations[0] = Valuation{t};
        Allocation x = make_allocation(inst, {{"g1", "g2"}}, 0);
        ValidationReport report = validate(inst, x);
        CHECK_FALSE(report.ok());
        CHECK(report.first().find("monotone") != std::string::npos);
    }
    SUBCASE("sign consistency per mode") {
        Instance inst = make_additive_instance(Mode::Goods, 1, {"g"}, {{1}}, true);
        std::get<AdditiveValuation>(inst.valuations[0].repr).values[0] = -1;
        CHECK_FALSE(validate_instance(inst).ok());
    }
    SUBCASE("too many endpoints for a graphical item") {
        MultigraphInstance graph;
        graph.agent_count = 3;
        graph.edges = {{"g", 0, 1}};
        Instance inst = graph.to_instance();
        std::get<GraphicalValuation>(inst.valuations[2].repr).incident[0] = 1;
        CHECK_FALSE(validate_instance(inst).ok());
    }
}

TEST_CASE("fairness predicates agree with pairwise envy amounts") {
    Rng rng(7);
    for (int round = 0; round < 120; ++round) {
        Mode mode = std::array{Mode::Goods, Mode::Chores, Mode::Mixed}[
            static_cast<std::size_t>(rng.uniform(0, 2))];
        int lo = mode == Mode::Goods ? 0 : -5;
        int hi = mode == Mode::Chores ? 0 : 5;
        int n = rng.uniform(1, 4);
        int m = rng.uniform(0, 6);
        Instance inst = testing::random_identical_additive(rng, n, m, lo, hi, mode);
        Allocation x;
        x.distinguished = rng.uniform(0, n - 1);
        x.bundles.assign(static_cast<std::size_t>(n), {});
        for (int g = 0; g < m; ++g)
            x.bundles[static_cast<std::size_t>(rng.uniform(0, n - 1))].push_back(g);
        for (auto& b : x.bundles) std::sort(b.begin(), b.end());

        bool all_pairs_happy = true;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && envy_amount(inst, i, j, x) > 0) all_pairs_happy = false;
        CHECK(is_ef1(inst, x) == all_pairs_happy);
        if (is_ef1(inst, x)) CHECK(is_near_ef1(inst, x));
    }
}

TEST_CASE("generator valuations are monotone and binary") {
    Rng rng(11);
    for (int round = 0; round < 40; ++round) {
        int m = rng.uniform(1, 10);
        GeneratorValuation gv;
        int count = rng.uniform(1, 5);
        for (int k = 0; k < count; ++k) {
            Bundle gen;
            for (int g = 0; g < m; ++g)
                if (rng.uniform(0, 2) == 0) gen.push_back(g);
            if (gen.empty()) gen.push_back(rng.uniform(0, m - 1));
            gv.generators.push_back(gen);
        }
        Valuation v{gv};

        std::vector<std::int64_t> by_mask(std::size_t{1} << m);
        for (std::uint32_t mask = 0; mask < by_mask.size(); ++mask) {
            Bundle s;
            for (int g = 0; g < m; ++g)
                if (mask & (1u << g)) s.push_back(g);
            std::int64_t val = value(v, s);
            CHECK((val == 0 || val == 1));
            by_mask[mask] = val;
        }
        for (std::uint32_t mask = 0; mask < by_mask.size(); ++mask)
            for (int g = 0; g < m; ++g)
                if (!(mask & (1u << g)))
                    CHECK(by_mask[mask] <= by_mask[mask | (1u << g)]);
    }
}

TEST_CASE("valid operations keep the result near-fair") {
    Rng rng(23);
    int checked = 0;
    for (int round = 0; round < 200; ++round) {
        int n = rng.uniform(2, 4);
        int m = rng.uniform(2, 7);
        Instance inst = testing::random_identical_additive(rng, n, m, 1, 5, Mode::Goods);
        Allocation x = testing::greedy_near_fair_start(inst, rng);
        REQUIRE(is_near_ef1(inst, x));

        // A few random operations; whenever is_valid accepts one, re-derive
        // near-EF1 of the outcome from pairwise envy amounts directly.
        for (int t = 0; t < 8; ++t) {
            int from = rng.uniform(0, n - 1);
            if (x.bundles[static_cast<std::size_t>(from)].empty()) continue;
            int to = rng.uniform(0, n - 2);
            if (to >= from) ++to;
            const Bundle& bundle = x.bundles[static_cast<std::size_t>(from)];
            int item = bundle[static_cast<std::size_t>(
                rng.uniform(0, static_cast<int>(bundle.size()) - 1))];
            Operation op = Operation::transfer(from, to, item);
            if (!is_valid(inst, x, op)) continue;
            Allocation y = apply(inst, x, op);
            ++checked;
            for (int i = 0; i < n; ++i) {
                if (i == y.distinguished) continue;
                for (int j = 0; j < n; ++j)
                    if (i != j) CHECK(envy_amount_goods(inst, i, j, y) <= 0);
            }
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("orientations: own bundle dominates other agents' view of it") {
    Rng rng(31);
    for (int round = 0; round < 60; ++round) {
        int n = rng.uniform(2, 6);
        int m = rng.uniform(1, 15);
        MultigraphInstance graph = testing::random_multigraph(rng, n, m);
        Instance inst = graph.to_instance();
        Allocation x = testing::random_orientation(graph, inst, rng);
        for (int i = 0; i < n; ++i) {
            const Bundle& own = x.bundles[static_cast<std::size_t>(i)];
            std::int64_t own_value = value(inst.valuation(i), own);
            CHECK(own_value == static_cast<std::int64_t>(own.size()));
            for (int j = 0; j < n; ++j)
                if (j != i) CHECK(value(inst.valuation(j), own) <= own_value);
        }
    }
}
