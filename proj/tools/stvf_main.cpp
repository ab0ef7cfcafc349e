#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stvf/experiments.hpp"
#include "stvf/version.hpp"

namespace {

void add_config_options(CLI::App* cmd, stvf::ExperimentConfig& cfg,
                        std::string& config_path) {
    cmd->add_option("experiment", cfg.experiment,
                    "experiment name (see `stvf list`)");
    cmd->add_option("--T", cfg.T, "final time (default 1.0)");
    cmd->add_option("--modes", cfg.modes,
                    "modal spectrum depth per axis (default 32)");
    cmd->add_option("--nt", cfg.nt, "time elements (default 256)");
    cmd->add_option("--domain-length", cfg.domain_lengths,
                    "box side lengths (default 1.0)");
    cmd->add_option("--seed", cfg.seed, "RNG seed (default 0)");
    cmd->add_option("--samples", cfg.samples,
                    "sample count for randomized experiments (default 1000)");
    cmd->add_option("--out", cfg.out,
                    "output file path (default: print the table to stdout)");
    cmd->add_option("--format", cfg.format, "csv or json (default csv)");
    cmd->add_option("--config", config_path,
                    "flat JSON config file; flags take precedence");
}

// flags win over the config file, the config file over defaults
void finalize_config(CLI::App* cmd, stvf::ExperimentConfig& cfg,
                     const std::string& config_path) {
    cfg.T_set = cmd->count("--T") > 0;
    cfg.modes_set = cmd->count("--modes") > 0;
    cfg.nt_set = cmd->count("--nt") > 0;
    cfg.domain_set = cmd->count("--domain-length") > 0;
    cfg.seed_set = cmd->count("--seed") > 0;
    cfg.samples_set = cmd->count("--samples") > 0;
    cfg.out_set = cmd->count("--out") > 0;
    cfg.format_set = cmd->count("--format") > 0;
    if (!config_path.empty()) {
        stvf::ExperimentConfig file = stvf::load_config_file(config_path);
        if (cmd->count("experiment") > 0) file.experiment.clear();
        stvf::apply_config_file(cfg, file);
    }
    if (cfg.experiment.empty())
        throw std::invalid_argument(
            "missing experiment name; pass it as an argument or via --config");
}

int execute(const stvf::ExperimentResult& res) {
    if (!res.config.out.empty()) {
        stvf::emit(res, res.config.out, res.config.format);
    } else {
        std::cout << (res.config.format == "json" ? stvf::render_json(res)
                                                  : stvf::render_csv(res));
    }
    for (const auto& a : res.summary) {
        std::printf("%s %s  value=%.6g threshold=%.6g  (%s)\n",
                    a.passed ? "PASS" : "FAIL", a.name.c_str(), a.value,
                    a.threshold, a.detail.c_str());
    }
    return res.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"space-time variational formulation workbench"};
    app.set_version_flag("--version", stvf::kVersion);
    app.require_subcommand(1);

    stvf::ExperimentConfig run_cfg;
    std::string run_config_path;
    CLI::App* run_cmd = app.add_subcommand("run", "run a named experiment");
    add_config_options(run_cmd, run_cfg, run_config_path);

    stvf::ExperimentConfig study_cfg;
    std::string study_config_path;
    int nt_doublings = 0;
    int mode_doublings = 0;
    CLI::App* study_cmd = app.add_subcommand(
        "study", "rerun an experiment over a refinement ladder");
    add_config_options(study_cmd, study_cfg, study_config_path);
    study_cmd->add_option("--nt-doublings", nt_doublings,
                          "time-grid doublings (required, >= 1)")
        ->required();
    study_cmd->add_option("--mode-doublings", mode_doublings,
                          "modal-spectrum doublings (default 0)");

    CLI::App* list_cmd =
        app.add_subcommand("list", "list the available experiments");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(list_cmd)) {
            for (const auto& info : stvf::experiment_registry())
                std::printf("%-24s %s\n", info.name.c_str(),
                            info.description.c_str());
            return 0;
        }
        if (app.got_subcommand(run_cmd)) {
            finalize_config(run_cmd, run_cfg, run_config_path);
            return execute(stvf::run_experiment(run_cfg));
        }
        finalize_config(study_cmd, study_cfg, study_config_path);
        return execute(stvf::convergence_study(
            study_cfg, stvf::StudyRefinement{nt_doublings, mode_doublings}));
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
