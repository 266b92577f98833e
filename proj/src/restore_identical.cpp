#include "ef1r/restore_identical.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ef1r {

namespace {

Bundle without(const Bundle& bundle, int item) {
    Bundle out;
    out.reserve(bundle.size() - 1);
    for (int g : bundle)
        if (g != item) out.push_back(g);
    return out;
}

void require_identical(const Instance& inst, Mode mode, const char* what) {
    if (!inst.identical)
        throw std::invalid_argument(std::string(what) +
                                    " requires identical valuations");
    if (inst.mode != mode)
        throw std::invalid_argument(std::string(what) + " requires " +
                                    (mode == Mode::Goods ? "goods" : "chores") +
                                    " mode");
}

}  // namespace

int best_item(const Valuation& v, const Bundle& bundle) {
    if (bundle.empty()) throw std::invalid_argument("best_item of empty bundle");
    int best = bundle.front();
    std::int64_t least_left = value(v, without(bundle, best));
    for (std::size_t k = 1; k < bundle.size(); ++k) {
        std::int64_t left = value(v, without(bundle, bundle[k]));
        if (left < least_left) {
            least_left = left;
            best = bundle[k];
        }
    }
    return best;
}

int worst_chore(const Valuation& v, const Bundle& bundle) {
    if (bundle.empty()) throw std::invalid_argument("worst_chore of empty bundle");
    int worst = bundle.front();
    std::int64_t most_left = value(v, without(bundle, worst));
    for (std::size_t k = 1; k < bundle.size(); ++k) {
        std::int64_t left = value(v, without(bundle, bundle[k]));
        if (left > most_left) {
            most_left = left;
            worst = bundle[k];
        }
    }
    return worst;
}

RestorationTrace restore_goods(const Instance& inst, const Allocation& start) {
    require_identical(inst, Mode::Goods, "restore_goods");
    if (!is_near_ef1(inst, start))
        throw std::invalid_argument("restore_goods requires a near-EF1 start");

    const Valuation& v = inst.valuation(0);
    int n = inst.agent_count;
    int d = start.distinguished;
    std::int64_t empty_value = value(v, {});

    RestorationTrace trace;
    trace.initial = start;
    Allocation x = start;

    auto d_has_ef1_envy = [&] {
        for (int j = 0; j < n; ++j)
            if (j != d && envy_amount_goods(inst, d, j, x) > 0) return true;
        return false;
    };

    int guard = inst.item_count() + 1;
    while (d_has_ef1_envy()) {
        if (--guard < 0) throw std::logic_error("restore_goods failed to converge");
        int donor = -1;
        std::int64_t donor_score = 0;
        for (int k = 0; k < n; ++k) {
            if (k == d) continue;
            const Bundle& bundle = x.bundles[static_cast<std::size_t>(k)];
            std::int64_t score =
                bundle.empty() ? empty_value
                               : value(v, without(bundle, best_item(v, bundle)));
            if (donor < 0 || score > donor_score) {
                donor = k;
                donor_score = score;
            }
        }
        int item = best_item(v, x.bundles[static_cast<std::size_t>(donor)]);
        Operation op = Operation::transfer(donor, d, item);
        x = apply(inst, x, op);
        trace.steps.push_back(op);
    }
    trace.final = x;
    return trace;
}

RestorationTrace restore_chores(const Instance& inst, const Allocation& start) {
    require_identical(inst, Mode::Chores, "restore_chores");
    if (!is_near_ef1(inst, start))
        throw std::invalid_argument("restore_chores requires a near-EF1 start");

    const Valuation& v = inst.valuation(0);
    int n = inst.agent_count;
    int d = start.distinguished;
    std::int64_t empty_value = value(v, {});

    RestorationTrace trace;
    trace.initial = start;
    Allocation x = start;

    auto d_is_ef1_envied = [&] {
        for (int i = 0; i < n; ++i)
            if (i != d && envy_amount_chores(inst, i, d, x) > 0) return true;
        return false;
    };

    int guard = inst.item_count() + 1;
    while (d_is_ef1_envied()) {
        if (--guard < 0) throw std::logic_error("restore_chores failed to converge");
        int donor = -1;
        std::int64_t donor_score = 0;
        for (int k = 0; k < n; ++k) {
            if (k == d) continue;
            const Bundle& bundle = x.bundles[static_cast<std::size_t>(k)];
            std::int64_t score =
                bundle.empty() ? empty_value
                               : value(v, without(bundle, worst_chore(v, bundle)));
            if (donor < 0 || score < donor_score) {
                donor = k;
                donor_score = score;
            }
        }
        int item = worst_chore(v, x.bundles[static_cast<std::size_t>(donor)]);
        Operation op = Operation::transfer(donor, d, item);
        x = apply(inst, x, op);
        trace.steps.push_back(op);
    }
    trace.final = x;
    return trace;
}

std::int64_t transfer_bound(int n, std::int64_t m) {
    if (n < 1) throw std::invalid_argument("transfer_bound needs n >= 1");
    if (m < 0) throw std::invalid_argument("transfer_bound needs m >= 0");
    if (n == 1) return 0;  // a lone agent is vacuously EF1
    std::int64_t numerator = m - n + 1;
    if (numerator <= 0) return 0;
    return (numerator + n - 1) / n;
}

TightInstance gen_tight_identical(int n, int m) {
    if (n < 2) throw std::invalid_argument("gen_tight_identical needs n >= 2");
    if (m < n - 1) throw std::invalid_argument("gen_tight_identical needs m >= n-1");

    std::vector<ItemId> ids;
    ids.reserve(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) ids.push_back("g" + std::to_string(k));
    std::vector<std::int64_t> row(static_cast<std::size_t>(m), 1);

    TightInstance out;
    out.instance =
        make_additive_instance(Mode::Goods, n, ids, {row}, /*identical=*/true);

    Allocation x;
    x.distinguished = 0;
    x.bundles.assign(static_cast<std::size_t>(n), {});
    // Items are interchangeable (all values 1); deal indices round-robin over
    // agents 1..n-1 so the sizes differ by at most one, extras low.
    for (int g = 0; g < m; ++g)
        x.bundles[static_cast<std::size_t>(1 + g % (n - 1))].push_back(g);
    for (Bundle& b : x.bundles) std::sort(b.begin(), b.end());
    out.start = x;
    out.already_ef1 = is_ef1(out.instance, x);
    return out;
}

}  // namespace ef1r
