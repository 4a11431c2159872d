#ifndef EHSIM_PRESETS_HPP
#define EHSIM_PRESETS_HPP

#include <string>
#include <vector>

#include "ehsim/sim_engine.hpp"

namespace ehsim {

// A named experiment family sweeping one parameter, mirroring the standard
// plots (error vs V, active nodes vs V, battery vs time, ...).
struct Preset {
    std::string name;
    std::string description;
    ExperimentConfig base;             // desk-scale defaults
    std::string sweep_key;             // config key being swept
    std::vector<double> sweep_values;
    std::vector<ControllerKind> controllers;  // one summary per controller
};

const std::vector<Preset>& preset_catalog();
const Preset* find_preset(const std::string& name);

// Exit codes shared by the CLI.
enum ExitCode { exit_ok = 0, exit_usage = 1, exit_invariant = 2, exit_io = 3 };

struct PresetOptions {
    std::string out_dir = ".";
    std::uint64_t seed = 7;
    bool paper_scale = false;   // desk scale by default
    bool per_trial_csv = false; // additionally write one CSV per trial
};

// Runs every sweep point, writes one per-slot CSV per point (columns are the
// across-trial mean at each slot), a summary CSV per controller, and the
// resolved base config. Prints the summary table. Returns an ExitCode.
int run_preset(const Preset& preset, const PresetOptions& opts);

// Runs a single config: one CSV per trial plus a one-row summary.
int run_config(const ExperimentConfig& cfg, const std::string& out_dir);

// CSV helpers (schema is fixed; see README).
std::string trace_csv(const MetricsTrace& trace);
std::string mean_trace_csv(const std::vector<MetricsTrace>& trials);
std::string summary_header();
std::string summary_row(double sweep_value, const MonteCarloResult& result);

}  // namespace ehsim

#endif
