#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ef1r/core.hpp"
#include "ef1r/corpus.hpp"
#include "ef1r/io.hpp"
#include "ef1r/reachability.hpp"
#include "ef1r/reduction.hpp"
#include "ef1r/restore_identical.hpp"
#include "ef1r/restore_orientation.hpp"

namespace {

constexpr int kExitOk = 0;        // success / reachable
constexpr int kExitNegative = 1;  // unreachable / negative verdict
constexpr int kExitBadInput = 2;  // malformed or invalid input
constexpr int kExitResource = 3;  // resource limit hit

ef1r::ParsedInstance load_instance(const std::string& path) {
    return ef1r::parse_instance(ef1r::read_file(path));
}

ef1r::Fairness parse_fairness(const std::string& name) {
    if (name == "ef1") return ef1r::Fairness::Ef1;
    if (name == "efx") return ef1r::Fairness::Efx;
    throw std::invalid_argument("unknown fairness notion '" + name + "'");
}

int cmd_validate(const std::string& path) {
    auto [inst, alloc] = load_instance(path);
    ef1r::ValidationReport report = ef1r::validate(inst, alloc);
    if (report.ok()) {
        std::cout << "valid: " << inst.agent_count << " agents, "
                  << inst.item_count() << " items\n";
        return kExitOk;
    }
    for (const std::string& v : report.violations) std::cout << "violation: " << v << '\n';
    return kExitBadInput;
}

int cmd_check(const std::string& path, const std::string& fairness_name) {
    auto [inst, alloc] = load_instance(path);
    ef1r::ValidationReport report = ef1r::validate(inst, alloc);
    if (!report.ok()) {
        std::cout << "violation: " << report.first() << '\n';
        return kExitBadInput;
    }
    ef1r::Fairness fairness = parse_fairness(fairness_name);
    int n = inst.agent_count;

    if (fairness == ef1r::Fairness::Ef1) {
        std::cout << "envy amounts (row envies column when positive):\n";
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j) std::cout << ' ';
                if (i == j)
                    std::cout << '.';
                else
                    std::cout << ef1r::envy_amount(inst, i, j, alloc);
            }
            std::cout << '\n';
        }
    } else {
        std::cout << "EFX-envy (1 when row EFX-envies column):\n";
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j) std::cout << ' ';
                if (i == j)
                    std::cout << '.';
                else
                    std::cout << (ef1r::efx_envy(inst, i, j, alloc) ? 1 : 0);
            }
            std::cout << '\n';
        }
    }
    bool fair = ef1r::is_fair(inst, alloc, fairness);
    bool near = ef1r::is_near_fair(inst, alloc, fairness);
    const char* notion = fairness == ef1r::Fairness::Ef1 ? "ef1" : "efx";
    std::cout << notion << ": " << (fair ? "yes" : "no") << '\n';
    std::cout << "near-" << notion << ": " << (near ? "yes" : "no")
              << " (distinguished agent " << alloc.distinguished << ")\n";
    return near ? kExitOk : kExitNegative;
}

int cmd_restore(const std::string& path, const std::string& method,
                const std::string& trace_out) {
    auto [inst, alloc] = load_instance(path);
    ef1r::ValidationReport report = ef1r::validate(inst, alloc);
    if (!report.ok()) {
        std::cout << "violation: " << report.first() << '\n';
        return kExitBadInput;
    }

    ef1r::RestorationTrace trace;
    if (method == "identical") {
        trace = ef1r::restore_goods(inst, alloc);
    } else if (method == "identical-chores") {
        trace = ef1r::restore_chores(inst, alloc);
    } else if (method == "orientation") {
        trace = ef1r::restore_orientation(inst, alloc);
    } else {
        throw std::invalid_argument("unknown method '" + method + "'");
    }

    // Independent replay before reporting success.
    ef1r::replay_trace(inst, trace.initial, trace.steps);
    if (!ef1r::is_ef1(inst, trace.final))
        throw std::logic_error("restoration did not end EF1");

    std::cout << "restored EF1 in " << trace.steps.size() << " transfers\n";
    if (!trace_out.empty())
        ef1r::write_file(trace_out, ef1r::emit_trace(inst, alloc, trace.steps));
    return kExitOk;
}

int cmd_reach(const std::string& path, const std::string& ops,
              std::uint64_t max_states, int max_depth,
              const std::string& fairness_name, bool orientation_preserving,
              const std::string& trace_out) {
    auto [inst, alloc] = load_instance(path);
    ef1r::ValidationReport report = ef1r::validate(inst, alloc);
    if (!report.ok()) {
        std::cout << "violation: " << report.first() << '\n';
        return kExitBadInput;
    }

    ef1r::SearchConfig config;
    if (ops == "transfers") {
        config.ops = ef1r::OpSet::TransfersOnly;
    } else if (ops == "transfers+exchanges") {
        config.ops = ef1r::OpSet::TransfersAndExchanges;
    } else {
        throw std::invalid_argument("unknown op set '" + ops + "'");
    }
    config.max_states = max_states;
    if (max_depth > 0) config.max_depth = max_depth;
    config.fairness = parse_fairness(fairness_name);
    config.orientation_preserving = orientation_preserving;

    ef1r::SearchResult result = ef1r::decide_restoration(inst, alloc, config);
    std::cout << ef1r::enumerate_valid_ops(inst, alloc, config).size()
              << " valid operations from the start state\n";
    std::cout << "states explored: " << result.states_explored << '\n';
    switch (result.verdict) {
        case ef1r::Verdict::Reachable:
            std::cout << "reachable in " << result.trace->steps.size() << " operations\n";
            if (!trace_out.empty())
                ef1r::write_file(trace_out,
                                 ef1r::emit_trace(inst, alloc, result.trace->steps));
            return kExitOk;
        case ef1r::Verdict::Unreachable:
            std::cout << "unreachable\n";
            return kExitNegative;
        case ef1r::Verdict::ResourceLimit:
            std::cout << "resource limit reached\n";
            return kExitResource;
    }
    return kExitBadInput;
}

int cmd_reduce_pmr(const std::string& pmr_path, const std::string& out_path) {
    ef1r::PmrInstance p = ef1r::parse_pmr(ef1r::read_file(pmr_path));
    ef1r::PmrReport report = ef1r::validate_pmr(p);
    if (!report.ok()) {
        std::cout << "violation: " << report.violations.front() << '\n';
        return kExitBadInput;
    }
    ef1r::ReductionInstance r = ef1r::build_reduction(p);
    ef1r::write_file(out_path, ef1r::emit_instance(r.instance, r.start));
    std::cout << "wrote restoration instance with " << r.instance.agent_count
              << " agents and " << r.instance.item_count() << " items\n";
    return kExitOk;
}

int cmd_pmr_reach(const std::string& pmr_path) {
    ef1r::PmrInstance p = ef1r::parse_pmr(ef1r::read_file(pmr_path));
    ef1r::PmrReport report = ef1r::validate_pmr(p);
    if (!report.ok()) {
        std::cout << "violation: " << report.violations.front() << '\n';
        return kExitBadInput;
    }
    if (ef1r::pmr_reachable(p)) {
        std::cout << "reachable\n";
        return kExitOk;
    }
    std::cout << "unreachable\n";
    return kExitNegative;
}

int emit_generated(const ef1r::Instance& inst, const ef1r::Allocation& alloc,
                   const std::string& out_path) {
    std::string doc = ef1r::emit_instance(inst, alloc);
    if (out_path.empty())
        std::cout << doc;
    else
        ef1r::write_file(out_path, doc);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EF1 restoration toolkit: envy checks, restoration algorithms,"
                 " exact reachability search, and matching-reconfiguration"
                 " reductions"};
    app.require_subcommand(1);

    std::string path, trace_out, method, fairness = "ef1";
    std::string ops = "transfers";
    std::uint64_t max_states = 5'000'000;
    int max_depth = 0;
    bool orientation_preserving = false;
    std::string pmr_path, out_path;
    int gen_n = 0, gen_m = 0;

    CLI::App* validate = app.add_subcommand("validate", "Check instance and allocation invariants");
    validate->add_option("file", path, "instance file")->required();

    CLI::App* check = app.add_subcommand("check", "Report envy amounts and fairness verdicts");
    check->add_option("file", path, "instance file")->required();
    check->add_option("--fairness", fairness, "ef1 or efx")->default_val("ef1");

    CLI::App* restore = app.add_subcommand("restore", "Run a restoration algorithm");
    restore->add_option("file", path, "instance file")->required();
    restore->add_option("--method", method, "identical, identical-chores, or orientation")->required();
    restore->add_option("--trace", trace_out, "write the transfer trace to this file");

    CLI::App* reach = app.add_subcommand("reach", "Decide reachability by exhaustive search");
    reach->add_option("file", path, "instance file")->required();
    reach->add_option("--ops", ops, "transfers or transfers+exchanges")->default_val("transfers");
    reach->add_option("--max-states", max_states, "state budget")->default_val(5'000'000);
    reach->add_option("--max-depth", max_depth, "optional depth cap");
    reach->add_option("--fairness", fairness, "ef1 or efx")->default_val("ef1");
    reach->add_flag("--orientation-preserving", orientation_preserving,
                    "only operations whose recipients value the items");
    reach->add_option("--trace", trace_out, "write the operation trace to this file");

    CLI::App* reduce = app.add_subcommand("reduce-pmr", "Build the restoration instance of a PMR input");
    reduce->add_option("pmr-file", pmr_path, "PMR file")->required();
    reduce->add_option("-o,--output", out_path, "output instance file")->required();

    CLI::App* pmr_reach = app.add_subcommand("pmr-reach", "Decide matching reconfiguration by flips");
    pmr_reach->add_option("pmr-file", pmr_path, "PMR file")->required();

    CLI::App* gen = app.add_subcommand("gen", "Generate a named instance family");
    gen->require_subcommand(1);
    CLI::App* gen_tight = gen->add_subcommand("tight-identical", "worst case for identical valuations");
    gen_tight->add_option("--n", gen_n, "agents")->required();
    gen_tight->add_option("--m", gen_m, "items")->required();
    gen_tight->add_option("-o,--output", out_path, "output file (stdout otherwise)");
    CLI::App* gen_path = gen->add_subcommand("path-orientation", "envy-path orientation lower bound");
    gen_path->add_option("--n", gen_n, "agents")->required();
    gen_path->add_option("-o,--output", out_path, "output file (stdout otherwise)");
    CLI::App* gen_mixed = gen->add_subcommand("mixed-counterexample", "stuck mixed-manna allocation");
    gen_mixed->add_option("-o,--output", out_path, "output file (stdout otherwise)");
    CLI::App* gen_efx = gen->add_subcommand("efx-counterexample", "stuck near-EFX allocation");
    gen_efx->add_option("-o,--output", out_path, "output file (stdout otherwise)");
    CLI::App* gen_family = gen->add_subcommand("efx-family", "parametric EFX family");
    gen_family->add_option("--n", gen_n, "agents")->required();
    gen_family->add_option("--m", gen_m, "items")->required();
    gen_family->add_option("-o,--output", out_path, "output file (stdout otherwise)");

    try {
        app.parse(argc, argv);

        if (*validate) return cmd_validate(path);
        if (*check) return cmd_check(path, fairness);
        if (*restore) return cmd_restore(path, method, trace_out);
        if (*reach)
            return cmd_reach(path, ops, max_states, max_depth, fairness,
                             orientation_preserving, trace_out);
        if (*reduce) return cmd_reduce_pmr(pmr_path, out_path);
        if (*pmr_reach) return cmd_pmr_reach(pmr_path);
        if (*gen_tight) {
            ef1r::TightInstance t = ef1r::gen_tight_identical(gen_n, gen_m);
            if (t.already_ef1)
                std::cerr << "note: generated allocation is already EF1\n";
            return emit_generated(t.instance, t.start, out_path);
        }
        if (*gen_path) {
            ef1r::PathOrientation p = ef1r::gen_path_orientation(gen_n);
            return emit_generated(p.instance, p.start, out_path);
        }
        if (*gen_mixed) {
            ef1r::Counterexample c = ef1r::gen_mixed_counterexample();
            return emit_generated(c.instance, c.start, out_path);
        }
        if (*gen_efx) {
            ef1r::Counterexample c = ef1r::gen_efx_counterexample();
            return emit_generated(c.instance, c.start, out_path);
        }
        if (*gen_family) {
            ef1r::Counterexample c = ef1r::gen_efx_family(gen_n, gen_m);
            return emit_generated(c.instance, c.start, out_path);
        }
        return kExitBadInput;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    } catch (const ef1r::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    }
}
