#include <algorithm>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "csqfc/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Channel-selective frequency conversion simulator"};
    app.set_version_flag("--version", std::string(csqfc::kVersion));
    app.require_subcommand(1);

    csqfc::Scenario scenario;
    std::uint64_t seed = 0;
    int threads = 0;
    for (const auto& kind : csqfc::scenario_kinds()) {
        auto* sub = app.add_subcommand(kind, "Run the " + kind + " scenario");
        sub->add_option("--config", scenario.config_path, "Scenario config (JSON)")->required();
        sub->add_option("--out", scenario.output_dir, "Output directory")->required();
        sub->add_option("--seed", seed, "RNG seed for Monte Carlo scenarios");
        sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->callback([&, sub, kind] {
            scenario.kind = kind;
            if (sub->count("--seed") > 0) scenario.seed = seed;
            if (sub->count("--threads") > 0) scenario.threads = threads;
        });
    }

    if (argc > 1 && argv[1][0] != '-') {
        const auto& kinds = csqfc::scenario_kinds();
        if (std::find(kinds.begin(), kinds.end(), argv[1]) == kinds.end()) {
            std::cerr << "csqfc: unknown scenario kind '" << argv[1] << "'\n";
            return static_cast<int>(csqfc::ExitCode::config_error);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(csqfc::ExitCode::config_error);
    }

    const auto result = csqfc::run(scenario);
    if (result.code != csqfc::ExitCode::ok) {
        std::cerr << "csqfc " << scenario.kind << ": " << result.message << '\n';
        return static_cast<int>(result.code);
    }
    for (const auto& name : result.outputs) std::cout << scenario.output_dir << '/' << name << '\n';
    return 0;
}
