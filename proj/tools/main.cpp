#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
    using resurgence::cli::RunConfig;
    CLI::App app{"Resurgence toolkit: formal solutions, singularities, Gevrey and tree certificates, continuation"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", cfg.input, "Input JSON file")->required();
        sub->add_option("--out", cfg.out_dir, "Output directory");
        sub->add_option("--order", cfg.order, "Truncation order N");
        sub->add_option("--kmax", cfg.kmax, "Largest k examined");
        sub->add_option("--horizon", cfg.horizon, "Filtration horizon");
        sub->add_option("--delta", cfg.delta, "Clearance delta");
        sub->add_option("--arclen", cfg.arclen, "Path length L");
        sub->add_option("--nodes", cfg.nodes, "Gauss-Legendre nodes per dimension");
        sub->add_option("--tol", cfg.tol, "Tolerance");
        sub->add_option("--seed", cfg.seed, "Random seed");
        sub->add_flag("--rational", cfg.rational, "Exact rational arithmetic");
    };
    const std::pair<const char*, const char*> verbs[] = {
        {"solve", "Formal solution, Borel germs and substitution residual"},
        {"singularities", "Predicted singular support and its star closure"},
        {"gevrey", "Gevrey-1 certificate for the formal solution"},
        {"trees", "Tree expansion equality and counting bounds"},
        {"continue", "Continuation of an iterated convolution along a path"},
        {"norms", "Seminorm estimates and the iterated convolution bound"},
    };
    for (const auto& [name, help] : verbs) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub);
        sub->callback([&cfg, n = name] { cfg.command = n; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : resurgence::cli::kInputError;
    }
    return resurgence::cli::run(cfg, std::cerr);
}
