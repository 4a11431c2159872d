#include "ehsim/presets.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ehsim/config.hpp"
#include "ehsim/errors.hpp"

namespace ehsim {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ExperimentConfig desk_base() {
    ExperimentConfig cfg;
    cfg.nodes = 10;
    cfg.subspace_dim = 3;
    cfg.trials = 20;
    cfg.horizon = 10000;
    return cfg;
}

void apply_paper_scale(ExperimentConfig& cfg) {
    cfg.nodes = 50;
    cfg.subspace_dim = 6;
    cfg.trials = 50;
}

void apply_sweep(ExperimentConfig& cfg, const std::string& key, double value) {
    if (key == "controller.v_norm") cfg.v_norm = value;
    else if (key == "controller.v23_scale") cfg.v23_scale = value;
    else if (key == "controller.gamma_db") cfg.gamma_db = value;
    else if (key == "controller.mu_norm") cfg.mu_norm = value;
    else if (key == "controller.vartheta_scale") cfg.vartheta_scale = value;
    else if (key == "arrivals.rmax_scale") cfg.rmax_scale = value;
    else throw config_error("preset: unsupported sweep key " + key);
}

std::string controller_tag(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::alg1: return "alg1";
        case ControllerKind::alg2: return "alg2";
        case ControllerKind::alg3: return "alg3";
    }
    return "?";
}

std::vector<Preset> make_catalog() {
    std::vector<Preset> cat;
    const std::vector<double> v_decades = {1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    const std::vector<double> v23_grid = {0.1, 0.25, 0.5, 0.75, 0.95};

    {
        Preset p;
        p.name = "fig1_bmse_vs_v";
        p.description = "estimation error vs tradeoff V (battery-stable controller)";
        p.base = desk_base();
        p.sweep_key = "controller.v_norm";
        p.sweep_values = v_decades;
        p.controllers = {ControllerKind::alg1};
        cat.push_back(p);
    }
    {
        Preset p;
        p.name = "fig2_active_vs_v";
        p.description = "active node count vs tradeoff V";
        p.base = desk_base();
        p.sweep_key = "controller.v_norm";
        p.sweep_values = v_decades;
        p.controllers = {ControllerKind::alg1};
        cat.push_back(p);
    }
    {
        Preset p;
        p.name = "fig3_battery_vs_v";
        p.description = "mean battery level vs tradeoff V";
        p.base = desk_base();
        p.sweep_key = "controller.v_norm";
        p.sweep_values = v_decades;
        p.controllers = {ControllerKind::alg1};
        cat.push_back(p);
    }
    {
        Preset p;
        p.name = "fig4_onoff";
        p.description = "error trace under an on/off harvesting profile";
        p.base = desk_base();
        p.base.arrival_kind = ArrivalProcess::Kind::on_off;
        p.base.rmax_scale = 6.0;
        p.base.horizon = 4000;
        p.base.burn_in = 2000;
        p.sweep_key = "controller.v_norm";
        p.sweep_values = {1.0};
        p.controllers = {ControllerKind::alg1};
        cat.push_back(p);
    }
    {
        Preset p;
        p.name = "fig5_energy_vs_v";
        p.description = "network transmit energy vs V (energy-minimizing controllers)";
        p.base = desk_base();
        p.base.gamma_db = -16.0;
        p.base.battery_init = ExperimentConfig::BatteryInit::vartheta_half;
        p.base.trials = 6;
        p.sweep_key = "controller.v23_scale";
        p.sweep_values = v23_grid;
        p.controllers = {ControllerKind::alg2, ControllerKind::alg3};
        cat.push_back(p);
    }
    {
        Preset p;
        p.name = "fig6_active_vs_v_g";
        p.description = "active node count vs V under an error target";
        p.base = desk_base();
        p.base.gamma_db = -14.0;
        p.base.battery_init = ExperimentConfig::BatteryInit::vartheta_half;
        p.base.trials = 6;
        p.sweep_key = "controller.v23_scale";
        p.sweep_values = v23_grid;
        p.controllers = {ControllerKind::alg2, ControllerKind::alg3};
        cat.push_back(p);
    }
    {
        Preset p;
        p.name = "fig7_battery_vs_t";
        p.description = "battery stabilization around the offset";
        p.base = desk_base();
        p.base.battery_init = ExperimentConfig::BatteryInit::vartheta_half;
        p.base.horizon = 6000;
        p.base.burn_in = 3000;
        p.sweep_key = "controller.vartheta_scale";
        p.sweep_values = {15.0, 25.0, 40.0};
        p.controllers = {ControllerKind::alg3};
        cat.push_back(p);
    }
    {
        Preset p;
        p.name = "fig8_bmse_vs_t_alg2";
        p.description = "error tracking of the target (descent solver)";
        p.base = desk_base();
        p.base.battery_init = ExperimentConfig::BatteryInit::vartheta_half;
        p.base.trials = 5;
        p.base.burn_in = 5000;
        p.sweep_key = "controller.gamma_db";
        p.sweep_values = {-14.0, -16.0};
        p.controllers = {ControllerKind::alg2};
        cat.push_back(p);
    }
    {
        Preset p;
        p.name = "fig9_bmse_vs_t_alg3";
        p.description = "error tracking of the target (closed-form rule)";
        p.base = desk_base();
        p.base.battery_init = ExperimentConfig::BatteryInit::vartheta_half;
        p.base.burn_in = 5000;
        p.sweep_key = "controller.gamma_db";
        p.sweep_values = {-14.0, -16.0};
        p.controllers = {ControllerKind::alg3};
        cat.push_back(p);
    }
    {
        Preset p;
        p.name = "fig10_active_vs_t_mu";
        p.description = "active node convergence for different queue steps";
        p.base = desk_base();
        p.base.gamma_db = -15.0;
        p.base.battery_init = ExperimentConfig::BatteryInit::vartheta_half;
        p.base.horizon = 4000;
        p.base.burn_in = 2000;
        p.sweep_key = "controller.mu_norm";
        p.sweep_values = {0.3, 1.0, 3.0};
        p.controllers = {ControllerKind::alg3};
        cat.push_back(p);
    }
    return cat;
}

std::ostream& write_trace_row(std::ostream& os, long slot, double bmse_v, double err,
                              double active, double energy, double battery, double z,
                              double lyap) {
    os << slot << ',' << fmt(bmse_v) << ',' << fmt(err) << ',' << fmt(active) << ','
       << fmt(energy) << ',' << fmt(battery) << ',' << fmt(z) << ',' << fmt(lyap) << '\n';
    return os;
}

constexpr const char* kTraceHeader =
    "slot,bmse_model,err_empirical,active_count,energy_sum_j,battery_mean_j,z_queue,lyapunov";

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

}  // namespace

const std::vector<Preset>& preset_catalog() {
    static const std::vector<Preset> catalog = make_catalog();
    return catalog;
}

const Preset* find_preset(const std::string& name) {
    for (const auto& p : preset_catalog()) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

std::string trace_csv(const MetricsTrace& trace) {
    std::ostringstream os;
    os << kTraceHeader << '\n';
    for (long t = 0; t < trace.bmse_model.size(); ++t) {
        write_trace_row(os, t, trace.bmse_model(t), trace.err_empirical(t),
                        trace.active_count(t), trace.energy_sum(t), trace.battery_mean(t),
                        trace.z_queue(t), trace.lyapunov(t));
    }
    return os.str();
}

std::string mean_trace_csv(const std::vector<MetricsTrace>& trials) {
    std::ostringstream os;
    os << kTraceHeader << '\n';
    if (trials.empty()) return os.str();
    const long horizon = trials.front().bmse_model.size();
    const double k = static_cast<double>(trials.size());
    for (long t = 0; t < horizon; ++t) {
        double b = 0, e = 0, a = 0, s = 0, bat = 0, z = 0, l = 0;
        for (const auto& tr : trials) {
            b += tr.bmse_model(t);
            e += tr.err_empirical(t);
            a += tr.active_count(t);
            s += tr.energy_sum(t);
            bat += tr.battery_mean(t);
            z += tr.z_queue(t);
            l += tr.lyapunov(t);
        }
        write_trace_row(os, t, b / k, e / k, a / k, s / k, bat / k, z / k, l / k);
    }
    return os.str();
}

std::string summary_header() {
    return "sweep_value,bmse_mean,bmse_std,active_mean,energy_mean_j,battery_mean_j";
}

std::string summary_row(double sweep_value, const MonteCarloResult& result) {
    std::ostringstream os;
    os << fmt(sweep_value) << ',' << fmt(result.bmse_mean) << ',' << fmt(result.bmse_std)
       << ',' << fmt(result.active_mean) << ',' << fmt(result.energy_mean) << ','
       << fmt(result.battery_mean);
    return os.str();
}

int run_preset(const Preset& preset, const PresetOptions& opts) {
    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << opts.out_dir << ": "
                  << ec.message() << "\n";
        return exit_io;
    }

    ExperimentConfig base = preset.base;
    if (opts.paper_scale) apply_paper_scale(base);
    base.seed = opts.seed;

    try {
        if (!write_file(opts.out_dir + "/" + preset.name + "_config.txt", config_text(base))) {
            std::cerr << "cannot write config echo\n";
            return exit_io;
        }

        for (const ControllerKind ctl : preset.controllers) {
            const std::string tag = controller_tag(ctl);
            std::ostringstream summary;
            summary << summary_header() << '\n';

            std::cout << preset.name << " [" << tag << "]\n"
                      << "  " << summary_header() << "\n";
            for (size_t k = 0; k < preset.sweep_values.size(); ++k) {
                ExperimentConfig cfg = base;
                cfg.controller = ctl;
                apply_sweep(cfg, preset.sweep_key, preset.sweep_values[k]);
                const Experiment ex = resolve(cfg);
                const MonteCarloResult result = run_monte_carlo(ex);

                const std::string row = summary_row(preset.sweep_values[k], result);
                summary << row << '\n';
                std::cout << "  " << row << "\n";

                std::ostringstream point;
                point << opts.out_dir << "/" << preset.name << "_" << tag << "_pt" << k;
                if (!write_file(point.str() + ".csv", mean_trace_csv(result.trials))) {
                    std::cerr << "cannot write point CSV\n";
                    return exit_io;
                }
                if (opts.per_trial_csv) {
                    for (size_t j = 0; j < result.trials.size(); ++j) {
                        std::ostringstream tp;
                        tp << point.str() << "_trial" << j << ".csv";
                        if (!write_file(tp.str(), trace_csv(result.trials[j]))) {
                            std::cerr << "cannot write trial CSV\n";
                            return exit_io;
                        }
                    }
                }
            }
            if (!write_file(opts.out_dir + "/" + preset.name + "_" + tag + "_summary.csv",
                            summary.str())) {
                std::cerr << "cannot write summary CSV\n";
                return exit_io;
            }
        }
    } catch (const contract_violation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return exit_invariant;
    }
    return exit_ok;
}

int run_config(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << out_dir << ": " << ec.message()
                  << "\n";
        return exit_io;
    }
    try {
        const Experiment ex = resolve(cfg);
        const MonteCarloResult result = run_monte_carlo(ex);
        if (!write_file(out_dir + "/run_config.txt", config_text(cfg))) return exit_io;
        if (!write_file(out_dir + "/run_mean.csv", mean_trace_csv(result.trials))) return exit_io;
        for (size_t j = 0; j < result.trials.size(); ++j) {
            std::ostringstream tp;
            tp << out_dir << "/run_trial" << j << ".csv";
            if (!write_file(tp.str(), trace_csv(result.trials[j]))) return exit_io;
        }
        std::ostringstream summary;
        summary << summary_header() << '\n' << summary_row(0.0, result) << '\n';
        if (!write_file(out_dir + "/run_summary.csv", summary.str())) return exit_io;
        std::cout << summary_header() << "\n" << summary_row(0.0, result) << "\n";
    } catch (const contract_violation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return exit_invariant;
    }
    return exit_ok;
}

}  // namespace ehsim
