#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "obslab/cli/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Boundary-observation inverse problems: forward solves, recovery, certification"};
    app.require_subcommand(1);
    obslab::RunOptions opts;
    std::string out;
    std::uint64_t seed = 0;
    const std::map<std::string, std::string> about{
        {"forward", "solve the configured problem and write boundary traces"},
        {"deconvolve", "convolve a signal with the kernel and recover it"},
        {"invert-source", "recover a separable source from boundary traces"},
        {"invert-potential", "recover a potential (heat) or potential and damping (wave)"},
        {"invert-damping", "recover interior (wave) or boundary (square) damping"},
        {"verify-inequalities", "evaluate the Hardy, Hopf and interpolation suite"},
        {"stability-sweep", "run an amplitude sweep and fit a stability rate"},
        {"certify", "certify sweep records against a stability modulus"},
    };
    for (const auto& name : obslab::subcommands()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("--config", opts.config, "experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides experiment.output)");
        sub->add_option("--seed", seed, "noise seed (overrides experiment.seed)");
        sub->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->callback([&opts, &out, &seed, sub, name] {
            opts.subcommand = name;
            if (!out.empty()) opts.out = out;
            if (sub->count("--seed") > 0) opts.seed = seed;
        });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return obslab::run(opts, std::cout, std::cerr);
}
