#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "ehsim/config.hpp"
#include "ehsim/errors.hpp"
#include "ehsim/presets.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ehsim - decentralized estimation in energy-harvesting sensor networks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "config file path")->required();
    run->add_option("--out", out_dir, "output directory");

    std::string preset_name;
    ehsim::PresetOptions popts;
    std::string scale = "desk";
    auto* preset = app.add_subcommand("preset", "run a named experiment preset");
    preset->add_option("name", preset_name, "preset name")->required();
    preset->add_option("--out", popts.out_dir, "output directory");
    preset->add_option("--seed", popts.seed, "master seed");
    preset->add_option("--scale", scale, "desk (default) or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    preset->add_flag("--per-trial", popts.per_trial_csv, "also write one CSV per trial");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "parse a config file and echo it back");
    validate->add_option("config", validate_path, "config file path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ehsim::exit_ok : ehsim::exit_usage;
    }

    try {
        if (run->parsed()) {
            const ehsim::ExperimentConfig cfg = ehsim::parse_config_file(config_path);
            return ehsim::run_config(cfg, out_dir);
        }
        if (preset->parsed()) {
            const ehsim::Preset* p = ehsim::find_preset(preset_name);
            if (p == nullptr) {
                std::cerr << "unknown preset '" << preset_name << "'. Valid names:\n";
                for (const auto& q : ehsim::preset_catalog()) {
                    std::cerr << "  " << q.name << "  (" << q.description << ")\n";
                }
                return ehsim::exit_usage;
            }
            popts.paper_scale = (scale == "paper");
            return ehsim::run_preset(*p, popts);
        }
        if (validate->parsed()) {
            const ehsim::ExperimentConfig cfg = ehsim::parse_config_file(validate_path);
            std::cout << ehsim::config_text(cfg);
            return ehsim::exit_ok;
        }
    } catch (const ehsim::config_error& e) {
        std::cerr << e.what() << "\n";
        return ehsim::exit_usage;
    } catch (const ehsim::contract_violation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return ehsim::exit_invariant;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return ehsim::exit_usage;
    }
    return ehsim::exit_usage;
}
