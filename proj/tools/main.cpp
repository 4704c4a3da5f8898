#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "activepool/cli/commands.hpp"
#include "activepool/cli/config.hpp"
#include "activepool/core.hpp"

namespace ap = activepool::cli;

int main(int argc, char** argv) {
    CLI::App app{"Pool-based active-learning experiment runner"};
    app.require_subcommand(1);

    ap::GenerateOptions gen;
    std::string gen_preset;
    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset (CSV per split + manifest)");
    generate->add_option("--preset", gen_preset, "Built-in generator preset")->check(CLI::IsMember({"paper-shape"}));
    generate->add_option("--config", gen.spec, "Generator spec JSON");
    generate->add_option("--seed", gen.seed, "Override the generator seed");
    generate->add_option("--out", gen.out, "Output directory")->required();

    ap::RunOptions run;
    std::string run_preset, run_seeds;
    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", run.config, "Experiment config file")->required();
        cmd->add_option("--preset", run_preset, "Use a built-in dataset instead of the config's")
            ->check(CLI::IsMember({"paper-shape"}));
        cmd->add_option("--seed", run.seed, "Run a single seed");
        cmd->add_option("--seeds", run_seeds, "Comma-separated seed list");
        cmd->add_option("--jobs", run.jobs, "Concurrent runs");
        cmd->add_option("--out", run.out, "Output directory");
    };
    auto* run_cmd = app.add_subcommand("run", "Run the configured arms and write run records");
    add_run_flags(run_cmd);
    auto* sweep_cmd = app.add_subcommand("sweep", "Run the configured arms over a seed list");
    add_run_flags(sweep_cmd);

    ap::ReportOptions rep;
    bool no_std = false;
    auto* report = app.add_subcommand("report", "Tabulate run records as mean(std) per arm");
    report->add_option("records", rep.inputs, "Record files or result directories")->required();
    report->add_flag("--no-std", no_std, "Print means only");
    report->add_option("--out", rep.out, "Also write report.txt and report.csv here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ap::kExitOk : ap::kExitUsage;
    }

    if (*generate) {
        gen.preset = !gen_preset.empty();
        return ap::cmd_generate(gen, std::cout, std::cerr);
    }
    if (*run_cmd || *sweep_cmd) {
        run.preset = !run_preset.empty();
        if (!run_seeds.empty()) {
            try {
                run.seeds = ap::parse_seed_list(run_seeds);
            } catch (const activepool::ConfigError& e) {
                std::cerr << "error: --seeds: " << e.what() << '\n';
                return ap::kExitUsage;
            }
        }
        if (*sweep_cmd && run.seed) {
            std::cerr << "error: sweep takes --seeds, not --seed\n";
            return ap::kExitUsage;
        }
        return ap::cmd_run(run, std::cout, std::cerr);
    }
    rep.show_std = !no_std;
    return ap::cmd_report(rep, std::cout, std::cerr);
}
