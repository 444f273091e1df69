#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "sausage_lab/error.hpp"

namespace cli = sausage_lab::cli;

namespace {

std::string key_list(const cli::CommandInfo& info) {
    std::string out = "Keys (set in --config or as key=value arguments):";
    for (const auto& k : info.keys) out += " " + k;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo estimation of diffusion sausage growth rates"};
    app.require_subcommand(1);
    app.footer("Environment: SAUSAGE_LAB_WORKERS caps the worker count.\n"
               "Exit codes: 0 ok, 1 runtime error, 2 usage or config error, 3 check failed.");

    struct Args {
        std::string config_file;
        std::string preset = "reference";
        std::vector<std::string> assignments;
        std::string out_root = "runs";
        bool dry_run = false;
        std::size_t workers = 0;
    };
    Args args;
    for (const auto& info : cli::commands()) {
        auto* sub = app.add_subcommand(info.name, info.summary);
        sub->add_option("--config", args.config_file, "flat key=value config file");
        sub->add_option("--preset", args.preset, "reference (full-scale parameters) or desk (10x smaller)")
            ->check(CLI::IsMember({"reference", "desk"}));
        sub->add_option("--out", args.out_root, "root of the runs/ directory tree");
        sub->add_option("--workers", args.workers, "worker threads (0: SAUSAGE_LAB_WORKERS or all cores)");
        sub->add_flag("--dry-run", args.dry_run, "print the seed schedule and estimated work, run nothing");
        sub->add_option("overrides", args.assignments, "key=value overrides");
        sub->footer(key_list(info));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << cli::error_json("usage", e.what()).dump(2) << '\n';
        return cli::kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    cli::ExperimentConfig cfg(command);
    try {
        if (!args.config_file.empty()) cfg = cli::ExperimentConfig::load(args.config_file, command);
        for (const auto& a : args.assignments) cfg.set(a);
        cli::apply_preset(cfg, args.preset);
    } catch (const sausage_lab::Error& e) {
        std::cout << cli::error_json(e.kind(), e.what()).dump(2) << '\n';
        return cli::kExitUsage;
    }

    cli::RunOptions opts;
    opts.out_root = args.out_root;
    opts.dry_run = args.dry_run;
    opts.workers = args.workers;
    return cli::run(cfg, opts, std::cout);
}
