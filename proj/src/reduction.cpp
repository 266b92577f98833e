#include "ef1r/reduction.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace ef1r {

namespace {

std::vector<std::vector<char>> adjacency_of(const PmrInstance& p) {
    std::vector<std::vector<char>> adj(
        p.left.size(), std::vector<char>(p.right.size(), 0));
    for (auto [a, b] : p.edges) adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
    return adj;
}

std::string matching_key(const PmrMatching& m) {
    std::string key;
    key.reserve(m.size());
    for (int b : m) key.push_back(static_cast<char>(b));
    return key;
}

}  // namespace

PmrMatching matching_from_edges(const PmrInstance& p,
                                const std::vector<std::pair<int, int>>& edges) {
    int n = static_cast<int>(p.left.size());
    PmrMatching sigma(static_cast<std::size_t>(n), -1);
    std::vector<char> right_used(p.right.size(), 0);
    for (auto [a, b] : edges) {
        if (a < 0 || a >= n || b < 0 || b >= static_cast<int>(p.right.size()))
            throw std::invalid_argument("matching edge out of range");
        if (sigma[static_cast<std::size_t>(a)] != -1 || right_used[static_cast<std::size_t>(b)])
            throw std::invalid_argument("matching repeats a vertex");
        sigma[static_cast<std::size_t>(a)] = b;
        right_used[static_cast<std::size_t>(b)] = 1;
    }
    for (int b : sigma)
        if (b < 0) throw std::invalid_argument("matching is not perfect");
    return sigma;
}

PmrReport validate_pmr(const PmrInstance& p) {
    PmrReport report;
    if (p.left.size() != p.right.size())
        report.violations.push_back("sides have different sizes");
    if (p.left.empty()) report.violations.push_back("empty vertex sides");

    std::set<std::pair<int, int>> edge_set;
    for (auto [a, b] : p.edges) {
        if (a < 0 || a >= static_cast<int>(p.left.size()) || b < 0 ||
            b >= static_cast<int>(p.right.size())) {
            report.violations.push_back("edge endpoint out of range");
            continue;
        }
        if (!edge_set.insert({a, b}).second)
            report.violations.push_back("duplicate edge");
    }
    if (!report.ok()) return report;

    auto check_matching = [&](const std::vector<std::pair<int, int>>& m,
                              const char* name) -> std::vector<int> {
        for (auto e : m) {
            if (!edge_set.count(e)) {
                report.violations.push_back(std::string(name) +
                                            " uses an edge outside the graph");
                return {};
            }
        }
        try {
            return matching_from_edges(p, m);
        } catch (const std::invalid_argument& err) {
            report.violations.push_back(std::string(name) + ": " + err.what());
            return {};
        }
    };

    PmrMatching sigma0 = check_matching(p.m0, "m0");
    PmrMatching sigma_star = check_matching(p.mstar, "mstar");
    if (!report.ok()) return report;

    // Rename the right side so m0 becomes the identity; mstar then reads as
    // the permutation pi.
    std::vector<int> canon_of_right(p.right.size(), -1);
    for (int i = 0; i < static_cast<int>(sigma0.size()); ++i)
        canon_of_right[static_cast<std::size_t>(sigma0[static_cast<std::size_t>(i)])] = i;
    report.pi.resize(sigma_star.size());
    for (int i = 0; i < static_cast<int>(sigma_star.size()); ++i)
        report.pi[static_cast<std::size_t>(i)] =
            canon_of_right[static_cast<std::size_t>(sigma_star[static_cast<std::size_t>(i)])];
    return report;
}

std::vector<PmrMatching> pmr_flips(const PmrInstance& p, const PmrMatching& m) {
    int n = static_cast<int>(p.left.size());
    if (static_cast<int>(m.size()) != n)
        throw std::invalid_argument("matching size mismatch");
    auto adj = adjacency_of(p);
    std::vector<char> right_used(p.right.size(), 0);
    for (int i = 0; i < n; ++i) {
        int b = m[static_cast<std::size_t>(i)];
        if (b < 0 || b >= static_cast<int>(p.right.size()) ||
            !adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)] ||
            right_used[static_cast<std::size_t>(b)])
            throw std::invalid_argument("matching is not a perfect matching of the graph");
        right_used[static_cast<std::size_t>(b)] = 1;
    }

    std::vector<PmrMatching> flips;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            int bi = m[static_cast<std::size_t>(i)];
            int bj = m[static_cast<std::size_t>(j)];
            if (adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(bj)] &&
                adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(bi)]) {
                PmrMatching next = m;
                std::swap(next[static_cast<std::size_t>(i)], next[static_cast<std::size_t>(j)]);
                flips.push_back(std::move(next));
            }
        }
    }
    return flips;
}

bool pmr_reachable(const PmrInstance& p) {
    PmrReport report = validate_pmr(p);
    if (!report.ok())
        throw std::invalid_argument("invalid PMR instance: " + report.violations.front());

    PmrMatching start = matching_from_edges(p, p.m0);
    PmrMatching goal = matching_from_edges(p, p.mstar);

    std::unordered_set<std::string> visited{matching_key(start)};
    std::deque<PmrMatching> frontier{start};
    while (!frontier.empty()) {
        PmrMatching m = std::move(frontier.front());
        frontier.pop_front();
        if (m == goal) return true;
        for (PmrMatching& next : pmr_flips(p, m)) {
            if (visited.insert(matching_key(next)).second)
                frontier.push_back(std::move(next));
        }
    }
    return false;
}

namespace {

Bundle sorted(Bundle b) {
    std::sort(b.begin(), b.end());
    return b;
}

// Construction-time self-checks: the listed zero-valued sets of each agent
// must contain no generator, the start must be near-EF1 with only agent 0
// possibly EF1-envious, and the target must be fair.
void verify_reduction(const ReductionInstance& r) {
    const Instance& inst = r.instance;
    int n = r.n;
    auto expect_zero = [&](int agent, Bundle s) {
        if (value(inst.valuation(agent), sorted(std::move(s))) != 0)
            throw std::logic_error("reduction valuation gives 1 on a zero-listed set");
    };

    const auto& A = r.a_items;
    const auto& Ab = r.abar_items;
    const auto& B = r.b_items;
    const auto& R = r.r_items;

    for (int i = 0; i < n; ++i) {
        int pi_i = r.pi[static_cast<std::size_t>(i)];
        // Agent 0 must not value a half pair joined with the matched b item.
        expect_zero(0, {A[static_cast<std::size_t>(i)], B[static_cast<std::size_t>(pi_i)]});
        expect_zero(0, {Ab[static_cast<std::size_t>(i)], B[static_cast<std::size_t>(pi_i)]});
        expect_zero(n + 1, {A[static_cast<std::size_t>(i)], B[static_cast<std::size_t>(pi_i)]});
        expect_zero(n + 1, {Ab[static_cast<std::size_t>(i)], B[static_cast<std::size_t>(pi_i)]});

        int agent = i + 1;
        expect_zero(agent, {A[static_cast<std::size_t>(i)]});
        expect_zero(agent, {Ab[static_cast<std::size_t>(i)]});
        expect_zero(agent, {A[static_cast<std::size_t>(i)], Ab[static_cast<std::size_t>(i)]});
        for (int j = 0; j < n; ++j) {
            if (!r.adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) continue;
            int bj = B[static_cast<std::size_t>(j)];
            expect_zero(agent, {bj});
            expect_zero(agent, {A[static_cast<std::size_t>(i)], bj});
            expect_zero(agent, {Ab[static_cast<std::size_t>(i)], bj});
            // One half of the pair, a neighbour b item, and any third item
            // other than the matching pair completion stays worthless.
            std::vector<int> others;
            for (int k = 0; k < n; ++k) {
                if (B[static_cast<std::size_t>(k)] != bj) others.push_back(B[static_cast<std::size_t>(k)]);
                if (k != i) {
                    others.push_back(A[static_cast<std::size_t>(k)]);
                    others.push_back(Ab[static_cast<std::size_t>(k)]);
                }
            }
            others.push_back(R[0]);
            others.push_back(R[1]);
            for (int c : others) {
                expect_zero(agent, {A[static_cast<std::size_t>(i)], bj, c});
                expect_zero(agent, {Ab[static_cast<std::size_t>(i)], bj, c});
            }
        }
    }
    expect_zero(n + 1, {R[0]});
    expect_zero(n + 1, {R[1]});
    for (int x : {R[0], R[1]}) {
        expect_zero(n + 1, {x, R[2]});
        expect_zero(n + 1, {x, R[3]});
        for (int j = 0; j < n; ++j) expect_zero(n + 1, {x, B[static_cast<std::size_t>(j)]});
    }
    expect_zero(n + 2, {R[2]});
    expect_zero(n + 2, {R[3]});
    for (int x : {R[2], R[3]}) {
        for (int k = 0; k < n; ++k) {
            expect_zero(n + 2, {x, A[static_cast<std::size_t>(k)]});
            expect_zero(n + 2, {x, Ab[static_cast<std::size_t>(k)]});
            expect_zero(n + 2, {x, B[static_cast<std::size_t>(k)]});
        }
    }

    if (!is_near_ef1(inst, r.start))
        throw std::logic_error("reduction start allocation is not near-EF1");
    for (int i = 1; i < inst.agent_count; ++i)
        for (int j = 0; j < inst.agent_count; ++j)
            if (i != j && envy_amount_goods(inst, i, j, r.start) > 0)
                throw std::logic_error("non-distinguished agent EF1-envies in start");
    if (!is_ef1(inst, r.target))
        throw std::logic_error("reduction target allocation is not EF1");
}

}  // namespace

ReductionInstance build_reduction(const PmrInstance& p) {
    PmrReport report = validate_pmr(p);
    if (!report.ok())
        throw std::invalid_argument("invalid PMR instance: " + report.violations.front());

    ReductionInstance r;
    r.n = static_cast<int>(p.left.size());
    r.pi = report.pi;

    // Canonical indexing: b_j is the right vertex matched to a_j in m0.
    PmrMatching sigma0 = matching_from_edges(p, p.m0);
    std::vector<int> canon_of_right(p.right.size(), -1);
    for (int i = 0; i < r.n; ++i)
        canon_of_right[static_cast<std::size_t>(sigma0[static_cast<std::size_t>(i)])] = i;
    r.right_names.resize(static_cast<std::size_t>(r.n));
    for (int b = 0; b < r.n; ++b)
        r.right_names[static_cast<std::size_t>(canon_of_right[static_cast<std::size_t>(b)])] =
            p.right[static_cast<std::size_t>(b)];

    r.adjacency.assign(static_cast<std::size_t>(r.n),
                       std::vector<char>(static_cast<std::size_t>(r.n), 0));
    for (auto [a, b] : p.edges)
        r.adjacency[static_cast<std::size_t>(a)]
                   [static_cast<std::size_t>(canon_of_right[static_cast<std::size_t>(b)])] = 1;

    Instance inst;
    inst.mode = Mode::Goods;
    inst.agent_count = r.n + 3;
    inst.identical = false;

    std::vector<ItemId> ids;
    for (int i = 1; i <= r.n; ++i) {
        ids.push_back("a" + std::to_string(i));
        ids.push_back("abar" + std::to_string(i));
        ids.push_back("b" + std::to_string(i));
    }
    for (int k = 1; k <= 4; ++k) ids.push_back("r" + std::to_string(k));
    std::sort(ids.begin(), ids.end());
    inst.items = ids;

    r.a_items.resize(static_cast<std::size_t>(r.n));
    r.abar_items.resize(static_cast<std::size_t>(r.n));
    r.b_items.resize(static_cast<std::size_t>(r.n));
    for (int i = 0; i < r.n; ++i) {
        r.a_items[static_cast<std::size_t>(i)] = inst.item_index("a" + std::to_string(i + 1));
        r.abar_items[static_cast<std::size_t>(i)] = inst.item_index("abar" + std::to_string(i + 1));
        r.b_items[static_cast<std::size_t>(i)] = inst.item_index("b" + std::to_string(i + 1));
    }
    for (int k = 0; k < 4; ++k)
        r.r_items[static_cast<std::size_t>(k)] = inst.item_index("r" + std::to_string(k + 1));

    auto gen = [&](std::initializer_list<int> items) { return sorted(Bundle(items)); };

    // Agent 0 values any full pair, or half a pair joined with a b item other
    // than the pair's matched target.
    GeneratorValuation v0;
    for (int i = 0; i < r.n; ++i) {
        v0.generators.push_back(
            gen({r.a_items[static_cast<std::size_t>(i)], r.abar_items[static_cast<std::size_t>(i)]}));
        for (int j = 0; j < r.n; ++j) {
            if (j == r.pi[static_cast<std::size_t>(i)]) continue;
            v0.generators.push_back(
                gen({r.a_items[static_cast<std::size_t>(i)], r.b_items[static_cast<std::size_t>(j)]}));
            v0.generators.push_back(
                gen({r.abar_items[static_cast<std::size_t>(i)], r.b_items[static_cast<std::size_t>(j)]}));
        }
    }
    inst.valuations.push_back(Valuation{v0});

    // Agent i values its own full pair completed by a neighbouring b item,
    // or either of r3, r4 alone.
    for (int i = 0; i < r.n; ++i) {
        GeneratorValuation vi;
        vi.generators.push_back(gen({r.r_items[2]}));
        vi.generators.push_back(gen({r.r_items[3]}));
        for (int j = 0; j < r.n; ++j) {
            if (!r.adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) continue;
            vi.generators.push_back(gen({r.a_items[static_cast<std::size_t>(i)],
                                         r.abar_items[static_cast<std::size_t>(i)],
                                         r.b_items[static_cast<std::size_t>(j)]}));
        }
        inst.valuations.push_back(Valuation{std::move(vi)});
    }

    // Agent n+1 values {r1, r2} together, plus the same pair sets as agent 0.
    GeneratorValuation vn1;
    vn1.generators.push_back(gen({r.r_items[0], r.r_items[1]}));
    for (const Bundle& g : v0.generators) vn1.generators.push_back(g);
    inst.valuations.push_back(Valuation{std::move(vn1)});

    // Agent n+2 values {r3, r4} together, or either of r1, r2 alone.
    GeneratorValuation vn2;
    vn2.generators.push_back(gen({r.r_items[2], r.r_items[3]}));
    vn2.generators.push_back(gen({r.r_items[0]}));
    vn2.generators.push_back(gen({r.r_items[1]}));
    inst.valuations.push_back(Valuation{std::move(vn2)});

    r.instance = std::move(inst);

    r.start.distinguished = 0;
    r.start.bundles.assign(static_cast<std::size_t>(r.n + 3), {});
    r.target = r.start;
    for (int i = 0; i < r.n; ++i) {
        r.start.bundles[static_cast<std::size_t>(i + 1)] =
            sorted({r.a_items[static_cast<std::size_t>(i)],
                    r.abar_items[static_cast<std::size_t>(i)],
                    r.b_items[static_cast<std::size_t>(i)]});
        r.target.bundles[static_cast<std::size_t>(i + 1)] =
            sorted({r.a_items[static_cast<std::size_t>(i)],
                    r.abar_items[static_cast<std::size_t>(i)],
                    r.b_items[static_cast<std::size_t>(r.pi[static_cast<std::size_t>(i)])]});
    }
    r.start.bundles[static_cast<std::size_t>(r.n + 1)] = sorted({r.r_items[0], r.r_items[1]});
    r.start.bundles[static_cast<std::size_t>(r.n + 2)] = sorted({r.r_items[2], r.r_items[3]});
    r.target.bundles[static_cast<std::size_t>(r.n + 1)] = r.start.bundles[static_cast<std::size_t>(r.n + 1)];
    r.target.bundles[static_cast<std::size_t>(r.n + 2)] = r.start.bundles[static_cast<std::size_t>(r.n + 2)];

    verify_reduction(r);
    return r;
}

PmrMatching allocation_to_matching(const ReductionInstance& r,
                                   const Allocation& y) {
    if (static_cast<int>(y.bundles.size()) != r.n + 3)
        throw std::invalid_argument("allocation has the wrong number of agents");
    if (!y.bundles[0].empty())
        throw std::invalid_argument("agent 0 must hold an empty bundle");
    if (y.bundles[static_cast<std::size_t>(r.n + 1)] != Bundle({std::min(r.r_items[0], r.r_items[1]),
                                                                std::max(r.r_items[0], r.r_items[1])}) ||
        y.bundles[static_cast<std::size_t>(r.n + 2)] != Bundle({std::min(r.r_items[2], r.r_items[3]),
                                                                std::max(r.r_items[2], r.r_items[3])}))
        throw std::invalid_argument("helper agents lost their r items");

    std::vector<int> b_owner(static_cast<std::size_t>(r.n), -1);
    PmrMatching sigma(static_cast<std::size_t>(r.n), -1);
    for (int i = 0; i < r.n; ++i) {
        const Bundle& bundle = y.bundles[static_cast<std::size_t>(i + 1)];
        if (bundle.size() != 3)
            throw std::invalid_argument("agent bundle is not of canonical shape");
        int b_found = -1;
        bool has_a = false, has_abar = false;
        for (int g : bundle) {
            if (g == r.a_items[static_cast<std::size_t>(i)]) {
                has_a = true;
            } else if (g == r.abar_items[static_cast<std::size_t>(i)]) {
                has_abar = true;
            } else {
                auto it = std::find(r.b_items.begin(), r.b_items.end(), g);
                if (it == r.b_items.end())
                    throw std::invalid_argument("agent holds a foreign item");
                b_found = static_cast<int>(it - r.b_items.begin());
            }
        }
        if (!has_a || !has_abar || b_found < 0)
            throw std::invalid_argument("agent bundle is not of canonical shape");
        if (b_owner[static_cast<std::size_t>(b_found)] != -1)
            throw std::invalid_argument("b item held twice");
        b_owner[static_cast<std::size_t>(b_found)] = i;
        sigma[static_cast<std::size_t>(i)] = b_found;
    }
    return sigma;
}

Allocation matching_to_allocation(const ReductionInstance& r,
                                  const PmrMatching& m) {
    if (static_cast<int>(m.size()) != r.n)
        throw std::invalid_argument("matching size mismatch");
    Allocation y;
    y.distinguished = 0;
    y.bundles.assign(static_cast<std::size_t>(r.n + 3), {});
    std::vector<char> used(static_cast<std::size_t>(r.n), 0);
    for (int i = 0; i < r.n; ++i) {
        int j = m[static_cast<std::size_t>(i)];
        if (j < 0 || j >= r.n || used[static_cast<std::size_t>(j)])
            throw std::invalid_argument("matching is not a permutation");
        used[static_cast<std::size_t>(j)] = 1;
        Bundle b{r.a_items[static_cast<std::size_t>(i)],
                 r.abar_items[static_cast<std::size_t>(i)],
                 r.b_items[static_cast<std::size_t>(j)]};
        std::sort(b.begin(), b.end());
        y.bundles[static_cast<std::size_t>(i + 1)] = std::move(b);
    }
    Bundle helper1{r.r_items[0], r.r_items[1]};
    Bundle helper2{r.r_items[2], r.r_items[3]};
    std::sort(helper1.begin(), helper1.end());
    std::sort(helper2.begin(), helper2.end());
    y.bundles[static_cast<std::size_t>(r.n + 1)] = std::move(helper1);
    y.bundles[static_cast<std::size_t>(r.n + 2)] = std::move(helper2);
    return y;
}

std::vector<PmrMatching> reduction_flips(const ReductionInstance& r,
                                         const PmrMatching& m) {
    std::vector<PmrMatching> flips;
    for (int i = 0; i < r.n; ++i) {
        for (int j = i + 1; j < r.n; ++j) {
            int bi = m[static_cast<std::size_t>(i)];
            int bj = m[static_cast<std::size_t>(j)];
            if (r.adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(bj)] &&
                r.adjacency[static_cast<std::size_t>(j)][static_cast<std::size_t>(bi)]) {
                PmrMatching next = m;
                std::swap(next[static_cast<std::size_t>(i)], next[static_cast<std::size_t>(j)]);
                flips.push_back(std::move(next));
            }
        }
    }
    return flips;
}

}  // namespace ef1r
