// hetsearch: run search scenarios and acceptance suites.
//
//   hetsearch run --scenario case1 --strategy hsds --out out/case1
//   hetsearch run --scenario case1 --check-gradient
//   hetsearch verify all
//
// Exit codes: 0 success, 1 invalid input, 2 runtime failure (including failed checks).

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "hetsearch/acceptance.hpp"
#include "hetsearch/run.hpp"
#include "hetsearch/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFailure = 2;

struct RunArgs {
    std::string scenario;
    std::string strategy;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid;
    std::string range_mode;
    bool check_gradient = false;
    bool field_snapshots = false;
};

hetsearch::Scenario load_scenario(const RunArgs& args) {
    using namespace hetsearch;
    Scenario scn = parse_scenario(resolve_scenario(args.scenario));
    if (args.grid) {
        scn.nx = *args.grid;
        scn.ny = *args.grid;
    }
    if (args.seed) {
        scn.seed = *args.seed;
        if (scn.initial_positions == InitialPositions::random) randomize_positions(scn);
    }
    if (args.range_mode == "on") {
        scn.strategy.range_mode = true;
    } else if (args.range_mode == "off") {
        scn.strategy.range_mode = false;
        if (scn.strategy.control.mode == ControlMode::range_limited_proportional)
            scn.strategy.control.mode = ControlMode::proportional;
    }
    validate_scenario(scn);
    return scn;
}

int do_run(const RunArgs& args) {
    using namespace hetsearch;
    const Scenario scn = load_scenario(args);

    if (args.check_gradient) {
        const auto chk = check_gradient(scn.grid(), scn.field(), scn.agents, scn.sensors);
        print_gradient_check(std::cout, chk);
        return chk.max_rel_error <= 5e-2 ? kOk : kFailure;
    }

    const std::filesystem::path out = args.out.empty() ? scn.out : args.out;
    const std::string which = args.strategy.empty() ? to_string(scn.strategy.kind) : args.strategy;
    if (which == "both") {
        const auto hsds = run_to_dir(scn, StrategyKind::hsds, out / "hsds", args.field_snapshots);
        const auto hcds = run_to_dir(scn, StrategyKind::hcds, out / "hcds", args.field_snapshots);
        const std::string cmp = format_comparison(hsds.report, hcds.report);
        detail::write_file(out / "comparison.txt", [&](std::ostream& os) { os << cmp; });
        std::cout << format_report(hsds.report) << '\n' << format_report(hcds.report) << '\n' << cmp;
    } else {
        const auto res = run_to_dir(scn, parse_strategy_kind(which), out, args.field_snapshots);
        std::cout << format_report(res.report);
    }
    std::cout << "output: " << out.string() << '\n';
    return kOk;
}

int do_verify(const std::string& suite) {
    using namespace hetsearch;
    const auto outcomes = acceptance::run(suite);
    bool all = true;
    for (const auto& o : outcomes) {
        std::cout << acceptance::format(o) << std::endl;
        all = all && o.pass;
    }
    return all ? kOk : kFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterogeneous multi-agent search on a gridded region"};
    app.require_subcommand(1);

    RunArgs args;
    auto* run = app.add_subcommand("run", "Run a scenario and write CSV traces");
    run->add_option("--scenario", args.scenario, "Scenario file, bundled name, or unique prefix")
        ->required();
    run->add_option("--strategy", args.strategy, "hsds, hcds, or both (default: scenario's)")
        ->check(CLI::IsMember({"hsds", "hcds", "both"}));
    run->add_option("--out", args.out, "Output directory (default: scenario's out)");
    run->add_option("--seed", args.seed, "Seed for random initial positions");
    run->add_option("--grid", args.grid, "Cells per side")->check(CLI::Range(2, 100000));
    run->add_option("--range-mode", args.range_mode, "Limited-range sensing")
        ->check(CLI::IsMember({"on", "off"}));
    run->add_flag("--check-gradient", args.check_gradient,
                  "Compare analytic and finite-difference gradients at the start");
    run->add_flag("--field-snapshots", args.field_snapshots,
                  "Also write the uncertainty field before every search");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "Run acceptance suites");
    verify->add_option("suite", suite, "Suite name or 'all'")->required();
    verify->footer("Suites: " + hetsearch::acceptance::suite_names());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*run) return do_run(args);
        return do_verify(suite);
    } catch (const hetsearch::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const hetsearch::ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const hetsearch::UnsupportedModeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kFailure;
    }
}
