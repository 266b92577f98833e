#include <doctest.h>

#include <deque>

#include "ef1r/restore_orientation.hpp"
#include "ef1r/reachability.hpp"
#include "helpers.hpp"

using namespace ef1r;
using testing::Rng;

namespace {

// Distance from the distinguished agent to its closest sink in the envy
// graph; -1 when no sink is reachable.
int closest_sink_distance(const Instance& inst, const Allocation& x) {
    EnvyGraph g = envy_graph(inst, x);
    std::deque<std::pair<int, int>> queue{{x.distinguished, 0}};
    std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
    seen[static_cast<std::size_t>(x.distinguished)] = 1;
    int best = -1;
    while (!queue.empty()) {
        auto [u, dist] = queue.front();
        queue.pop_front();
        if (g.is_sink(u) && (best < 0 || dist < best)) best = dist;
        for (int w : g.out[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                queue.push_back({w, dist + 1});
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("multigraph to instance") {
    MultigraphInstance graph;
    graph.agent_count = 2;
    graph.edges = {{"e1", 0, 1}, {"e2", 1, 0}, {"p", 1, -1}};
    Instance inst = graph.to_instance();
    CHECK(inst.item_count() == 3);
    CHECK(value(inst.valuation(0), {inst.item_index("e1")}) == 1);
    CHECK(value(inst.valuation(0), {inst.item_index("p")}) == 0);
    CHECK(value(inst.valuation(1), {inst.item_index("p")}) == 1);

    SUBCASE("self-loops are rejected") {
        graph.edges.push_back({"bad", 1, 1});
        CHECK_THROWS_AS(graph.to_instance(), std::invalid_argument);
    }
    SUBCASE("duplicate ids are rejected") {
        graph.edges.push_back({"e1", 0, 1});
        CHECK_THROWS_AS(graph.to_instance(), std::invalid_argument);
    }
}

TEST_CASE("is_orientation") {
    PathOrientation p = gen_path_orientation(3);
    CHECK(is_orientation(p.instance, p.start));

    SUBCASE("moving an unvalued item breaks the orientation") {
        Allocation y = apply(p.instance, p.start,
                             Operation::transfer(2, 0, p.instance.item_index("g5")));
        CHECK_FALSE(is_orientation(p.instance, y));
    }
    SUBCASE("no items is trivially an orientation") {
        MultigraphInstance graph;
        graph.agent_count = 2;
        Instance inst = graph.to_instance();
        Allocation x{{{}, {}}, 0};
        CHECK(is_orientation(inst, x));
    }
}

TEST_CASE("orientation structure checks") {
    SUBCASE("path instance satisfies all three parts") {
        PathOrientation p = gen_path_orientation(3);
        OrientationChecks checks = check_orientation_properties(p.instance, p.start);
        CHECK(checks.own_bundle_dominant);
        CHECK(checks.path_growth);
        CHECK(checks.acyclic);
        // The envy path end dominates its source by the path length.
        CHECK(value(p.instance.valuation(2), p.start.bundles[2]) >=
              value(p.instance.valuation(0), p.start.bundles[0]) + 2);
    }
    SUBCASE("non-orientations are rejected") {
        PathOrientation p = gen_path_orientation(3);
        Allocation y = apply(p.instance, p.start,
                             Operation::transfer(2, 0, p.instance.item_index("g5")));
        CHECK_THROWS_AS(check_orientation_properties(p.instance, y),
                        std::invalid_argument);
    }
    SUBCASE("random multigraph orientations always pass") {
        Rng rng(47);
        for (int round = 0; round < 80; ++round) {
            int n = rng.uniform(2, 6);
            int m = rng.uniform(1, 15);
            MultigraphInstance graph = testing::random_multigraph(rng, n, m);
            Instance inst = graph.to_instance();
            Allocation x = testing::random_orientation(graph, inst, rng);
            OrientationChecks checks = check_orientation_properties(inst, x);
            CHECK(checks.own_bundle_dominant);
            CHECK(checks.path_growth);
            CHECK(checks.acyclic);
        }
    }
}

TEST_CASE("max_envy_amount") {
    PathOrientation p = gen_path_orientation(3);
    CHECK(max_envy_amount(p.instance, p.start) == 1);
    CHECK(max_envy_amount(p.instance, restore_orientation(p.instance, p.start).final) == 0);

    SUBCASE("an agent two items short of its neighbour") {
        MultigraphInstance graph;
        graph.agent_count = 2;
        for (int k = 1; k <= 5; ++k)
            graph.edges.push_back({"e" + std::to_string(k), 0, 1});
        Instance inst = graph.to_instance();
        Allocation x = make_allocation(inst, {{"e1"}, {"e2", "e3", "e4", "e5"}}, 0);
        CHECK(max_envy_amount(inst, x) == 2);
    }
}

TEST_CASE("restore_orientation") {
    SUBCASE("path instance relays sink to predecessor") {
        PathOrientation p = gen_path_orientation(3);
        RestorationTrace trace = restore_orientation(p.instance, p.start);
        REQUIRE(trace.steps.size() == 2);
        CHECK(trace.steps[0] ==
              Operation::transfer(2, 1, p.instance.item_index("g5")));
        CHECK(trace.steps[1] ==
              Operation::transfer(1, 0, p.instance.item_index("g2")));
        CHECK(is_ef1(p.instance, trace.final));
        CHECK(is_orientation(p.instance, trace.final));
    }
    SUBCASE("already EF1 yields an empty trace") {
        MultigraphInstance graph;
        graph.agent_count = 2;
        graph.edges = {{"e1", 0, 1}, {"e2", 0, 1}};
        Instance inst = graph.to_instance();
        Allocation x = make_allocation(inst, {{"e1"}, {"e2"}}, 0);
        CHECK(restore_orientation(inst, x).steps.empty());
    }
    SUBCASE("exactly n-1 transfers on the path family") {
        for (int n = 2; n <= 6; ++n) {
            PathOrientation p = gen_path_orientation(n);
            RestorationTrace trace = restore_orientation(p.instance, p.start);
            CHECK(static_cast<int>(trace.steps.size()) == n - 1);
            Allocation x = p.start;
            for (const Operation& op : trace.steps) {
                x = apply(p.instance, x, op);
                CHECK(is_orientation(p.instance, x));
                CHECK(is_near_ef1(p.instance, x));
            }
            CHECK(is_ef1(p.instance, x));
        }
    }
    SUBCASE("non-orientation starts are rejected") {
        PathOrientation p = gen_path_orientation(3);
        Allocation y = apply(p.instance, p.start,
                             Operation::transfer(2, 0, p.instance.item_index("g5")));
        CHECK_THROWS_AS(restore_orientation(p.instance, y), std::invalid_argument);
    }
}

TEST_CASE("gen_path_orientation") {
    SUBCASE("three agents reproduce the eight-item valuation matrix") {
        PathOrientation p = gen_path_orientation(3);
        CHECK(p.instance.item_count() == 8);
        // Row by row: who values which item at 1.
        std::vector<std::vector<int>> want = {
            {1, 1, 1, 1, 0, 0, 0, 0},
            {0, 1, 1, 1, 1, 1, 1, 1},
            {0, 0, 0, 0, 1, 1, 1, 1},
        };
        for (int i = 0; i < 3; ++i)
            for (int k = 1; k <= 8; ++k)
                CHECK(value(p.instance.valuation(i),
                            {p.instance.item_index("g" + std::to_string(k))}) ==
                      want[static_cast<std::size_t>(i)][static_cast<std::size_t>(k - 1)]);
        CHECK(p.start.bundles[0].size() == 1);
        CHECK(p.start.bundles[1].size() == 3);
        CHECK(p.start.bundles[2].size() == 4);
        CHECK(is_near_ef1(p.instance, p.start));
        CHECK(is_orientation(p.instance, p.start));
    }
    SUBCASE("item counts follow (n^2 + 3n - 2) / 2") {
        CHECK(gen_path_orientation(2).instance.item_count() == 4);
        CHECK(gen_path_orientation(4).instance.item_count() == 13);
        CHECK(gen_path_orientation(6).instance.item_count() == 26);
    }
    SUBCASE("two agents need one transfer") {
        PathOrientation p = gen_path_orientation(2);
        CHECK(restore_orientation(p.instance, p.start).steps.size() == 1);
    }
    CHECK_THROWS_AS(gen_path_orientation(1), std::invalid_argument);
}

TEST_CASE("restoration invariants on random near-EF1 orientations") {
    Rng rng(53);
    int accepted = 0;
    for (int round = 0; round < 3000 && accepted < 120; ++round) {
        int n = rng.uniform(2, 6);
        int m = rng.uniform(1, 15);
        MultigraphInstance graph = testing::random_multigraph(rng, n, m);
        Instance inst = graph.to_instance();
        auto maybe = testing::random_near_ef1_orientation(graph, inst, rng);
        if (!maybe) continue;
        ++accepted;
        Allocation start = *maybe;
        REQUIRE(is_near_ef1(inst, start));

        std::int64_t bound = max_envy_amount(inst, start) * (n - 1);
        RestorationTrace trace = restore_orientation(inst, start);
        CHECK(static_cast<std::int64_t>(trace.steps.size()) <= bound);
        CHECK(is_ef1(inst, trace.final));

        // Each sink-to-predecessor transfer either shortens the distance to
        // the closest sink by one or hands the distinguished agent an item.
        Allocation x = start;
        int d = start.distinguished;
        for (const Operation& op : trace.steps) {
            int before = closest_sink_distance(inst, x);
            Allocation y = apply(inst, x, op);
            CHECK(is_orientation(inst, y));
            CHECK(is_near_ef1(inst, y));
            if (op.agent_b != d) {
                int after = closest_sink_distance(inst, y);
                CHECK(after == before - 1);
            }
            x = y;
        }
    }
    CHECK(accepted >= 120);
}
