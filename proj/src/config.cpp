#include "ehsim/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ehsim/errors.hpp"

namespace ehsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& msg) {
    std::ostringstream os;
    os << "config line " << line << ", key '" << key << "': " << msg;
    throw config_error(os.str());
}

double parse_double(const std::string& v, int line, const std::string& key) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) fail(line, key, "trailing characters after number");
        return x;
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        fail(line, key, "expected a number, got '" + v + "'");
    }
}

long parse_long(const std::string& v, int line, const std::string& key) {
    long x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        fail(line, key, "expected an integer, got '" + v + "'");
    }
    return x;
}

std::uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
    std::uint64_t x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        fail(line, key, "expected an unsigned integer, got '" + v + "'");
    }
    return x;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(line, key, "expected true/false, got '" + v + "'");
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;

    using Setter = std::function<void(const std::string&, int)>;
    std::map<std::string, Setter> keys;

    auto dbl = [&](const std::string& name, double& field, auto check, const char* what) {
        keys[name] = [&field, check, what, name](const std::string& v, int line) {
            const double x = parse_double(v, line, name);
            if (!check(x)) fail(line, name, what);
            field = x;
        };
    };
    auto positive = [](double x) { return x > 0.0; };
    auto nonneg = [](double x) { return x >= 0.0; };
    auto any = [](double) { return true; };

    keys["network.nodes"] = [&](const std::string& v, int line) {
        const long x = parse_long(v, line, "nodes");
        if (x < 2) fail(line, "nodes", "need at least 2 nodes");
        cfg.nodes = static_cast<int>(x);
    };
    dbl("network.radius_m", cfg.radius_m, positive, "must be positive");
    dbl("network.kernel_variance", cfg.kernel_variance, positive, "must be positive");
    keys["network.subspace_dim"] = [&](const std::string& v, int line) {
        const long x = parse_long(v, line, "subspace_dim");
        if (x < 1) fail(line, "subspace_dim", "must be >= 1");
        cfg.subspace_dim = static_cast<int>(x);
    };

    dbl("signal.worst_bmse_db", cfg.worst_bmse_db, any, "");
    dbl("signal.noise_var", cfg.noise_var, nonneg, "must be >= 0");
    dbl("signal.amplitude", cfg.amplitude, positive, "must be positive");

    dbl("radio.noise_psd", cfg.radio.noise_psd, positive, "must be positive");
    dbl("radio.noise_figure", cfg.radio.noise_figure, positive, "must be positive");
    dbl("radio.system_const", cfg.radio.system_const, positive, "must be positive");
    dbl("radio.slot_s", cfg.radio.slot_s, positive, "must be positive");
    keys["radio.ber"] = [&](const std::string& v, int line) {
        const double x = parse_double(v, line, "ber");
        if (x <= 0.0 || x >= 1.0) fail(line, "ber", "must be in (0, 1)");
        cfg.radio.ber = x;
    };
    dbl("radio.carrier_hz", cfg.radio.carrier_hz, positive, "must be positive");
    keys["radio.max_bits"] = [&](const std::string& v, int line) {
        const long x = parse_long(v, line, "max_bits");
        if (x < 1 || x > 52) fail(line, "max_bits", "must be in [1, 52]");
        cfg.radio.max_bits = static_cast<int>(x);
    };
    keys["radio.rayleigh_fading"] = [&](const std::string& v, int line) {
        cfg.radio.rayleigh_fading = parse_bool(v, line, "rayleigh_fading");
    };
    keys["radio.emax_percentile"] = [&](const std::string& v, int line) {
        const double x = parse_double(v, line, "emax_percentile");
        if (x <= 0.0 || x >= 1.0) fail(line, "emax_percentile", "must be in (0, 1)");
        cfg.emax_percentile = x;
    };
    keys["radio.emax_mc_draws"] = [&](const std::string& v, int line) {
        const long x = parse_long(v, line, "emax_mc_draws");
        if (x != 0 && x < 1000) fail(line, "emax_mc_draws", "must be 0 (analytic) or >= 1000");
        cfg.emax_mc_draws = static_cast<int>(x);
    };
    dbl("radio.overhead_frac", cfg.overhead_frac, nonneg, "must be >= 0");

    keys["arrivals.kind"] = [&](const std::string& v, int line) {
        if (v == "uniform") cfg.arrival_kind = ArrivalProcess::Kind::uniform;
        else if (v == "on_off") cfg.arrival_kind = ArrivalProcess::Kind::on_off;
        else fail(line, "kind", "expected uniform or on_off");
    };
    dbl("arrivals.rmax_scale", cfg.rmax_scale, nonneg, "must be >= 0");
    dbl("arrivals.rmax_j", cfg.rmax_j, nonneg, "must be >= 0");
    dbl("arrivals.window_s", cfg.window_s, positive, "must be positive");

    keys["controller.algorithm"] = [&](const std::string& v, int line) {
        if (v == "alg1") cfg.controller = ControllerKind::alg1;
        else if (v == "alg2") cfg.controller = ControllerKind::alg2;
        else if (v == "alg3") cfg.controller = ControllerKind::alg3;
        else fail(line, "algorithm", "expected alg1, alg2 or alg3");
    };
    dbl("controller.v_norm", cfg.v_norm, positive, "must be positive");
    dbl("controller.v23_scale", cfg.v23_scale, positive, "must be positive");
    dbl("controller.v_abs", cfg.v_abs, nonneg, "must be >= 0");
    keys["controller.theta_mode"] = [&](const std::string& v, int line) {
        if (v == "bound") cfg.theta_from_bound = true;
        else if (v == "fixed") cfg.theta_from_bound = false;
        else fail(line, "theta_mode", "expected bound or fixed");
    };
    dbl("controller.theta_j", cfg.theta_j, nonneg, "must be >= 0");
    dbl("controller.vartheta_scale", cfg.vartheta_scale, positive, "must be positive");
    dbl("controller.vartheta_j", cfg.vartheta_j, nonneg, "must be >= 0");
    dbl("controller.gamma_db", cfg.gamma_db, any, "");
    dbl("controller.mu_norm", cfg.mu_norm, positive, "must be positive");
    dbl("controller.mu_abs", cfg.mu_abs, nonneg, "must be >= 0");
    keys["controller.solver_max_iters"] = [&](const std::string& v, int line) {
        const long x = parse_long(v, line, "solver_max_iters");
        if (x < 1) fail(line, "solver_max_iters", "must be >= 1");
        cfg.solver_max_iters = static_cast<int>(x);
    };
    dbl("controller.solver_step", cfg.solver_step, positive, "must be positive");
    keys["controller.solver_backtrack"] = [&](const std::string& v, int line) {
        const double x = parse_double(v, line, "solver_backtrack");
        if (x <= 0.0 || x >= 1.0) fail(line, "solver_backtrack", "must be in (0, 1)");
        cfg.solver_backtrack = x;
    };
    dbl("controller.solver_tolerance", cfg.solver_tolerance, positive, "must be positive");

    keys["sim.horizon"] = [&](const std::string& v, int line) {
        const long x = parse_long(v, line, "horizon");
        if (x < 0) fail(line, "horizon", "must be >= 0");
        cfg.horizon = x;
    };
    keys["sim.burn_in"] = [&](const std::string& v, int line) {
        const long x = parse_long(v, line, "burn_in");
        if (x < -1) fail(line, "burn_in", "must be >= 0, or -1 for the 90% default");
        cfg.burn_in = x;
    };
    keys["sim.trials"] = [&](const std::string& v, int line) {
        const long x = parse_long(v, line, "trials");
        if (x < 1) fail(line, "trials", "must be >= 1");
        cfg.trials = static_cast<int>(x);
    };
    keys["sim.seed"] = [&](const std::string& v, int line) {
        cfg.seed = parse_u64(v, line, "seed");
    };
    keys["sim.battery_init"] = [&](const std::string& v, int line) {
        if (v == "theta") cfg.battery_init = ExperimentConfig::BatteryInit::theta;
        else if (v == "min") cfg.battery_init = ExperimentConfig::BatteryInit::min;
        else if (v == "vartheta_half") cfg.battery_init = ExperimentConfig::BatteryInit::vartheta_half;
        else if (v == "fixed") cfg.battery_init = ExperimentConfig::BatteryInit::fixed;
        else fail(line, "battery_init", "expected theta, min, vartheta_half or fixed");
    };
    dbl("sim.battery_init_j", cfg.battery_init_j, nonneg, "must be >= 0");
    keys["sim.record_node_detail"] = [&](const std::string& v, int line) {
        cfg.record_node_detail = parse_bool(v, line, "record_node_detail");
    };

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find_first_of("#;");
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, line, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, line, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, line, "empty key");
        if (value.empty()) fail(line_no, key, "empty value");
        const std::string full = section.empty() ? key : section + "." + key;
        const auto it = keys.find(full);
        if (it == keys.end()) fail(line_no, full, "unknown key");
        it->second(value, line_no);
    }

    if (cfg.subspace_dim > cfg.nodes) {
        throw config_error("config: subspace_dim must not exceed nodes");
    }
    if (cfg.burn_in > cfg.horizon) {
        throw config_error("config: burn_in must not exceed horizon");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "[network]\n";
    os << "nodes = " << cfg.nodes << "\n";
    os << "radius_m = " << fmt(cfg.radius_m) << "\n";
    os << "kernel_variance = " << fmt(cfg.kernel_variance) << "\n";
    os << "subspace_dim = " << cfg.subspace_dim << "\n";
    os << "\n[signal]\n";
    os << "worst_bmse_db = " << fmt(cfg.worst_bmse_db) << "\n";
    os << "noise_var = " << fmt(cfg.noise_var) << "\n";
    os << "amplitude = " << fmt(cfg.amplitude) << "\n";
    os << "\n[radio]\n";
    os << "noise_psd = " << fmt(cfg.radio.noise_psd) << "\n";
    os << "noise_figure = " << fmt(cfg.radio.noise_figure) << "\n";
    os << "system_const = " << fmt(cfg.radio.system_const) << "\n";
    os << "slot_s = " << fmt(cfg.radio.slot_s) << "\n";
    os << "ber = " << fmt(cfg.radio.ber) << "\n";
    os << "carrier_hz = " << fmt(cfg.radio.carrier_hz) << "\n";
    os << "max_bits = " << cfg.radio.max_bits << "\n";
    os << "rayleigh_fading = " << (cfg.radio.rayleigh_fading ? "true" : "false") << "\n";
    os << "emax_percentile = " << fmt(cfg.emax_percentile) << "\n";
    os << "emax_mc_draws = " << cfg.emax_mc_draws << "\n";
    os << "overhead_frac = " << fmt(cfg.overhead_frac) << "\n";
    os << "\n[arrivals]\n";
    os << "kind = " << (cfg.arrival_kind == ArrivalProcess::Kind::uniform ? "uniform" : "on_off")
       << "\n";
    os << "rmax_scale = " << fmt(cfg.rmax_scale) << "\n";
    os << "rmax_j = " << fmt(cfg.rmax_j) << "\n";
    os << "window_s = " << fmt(cfg.window_s) << "\n";
    os << "\n[controller]\n";
    os << "algorithm = "
       << (cfg.controller == ControllerKind::alg1   ? "alg1"
           : cfg.controller == ControllerKind::alg2 ? "alg2"
                                                    : "alg3")
       << "\n";
    os << "v_norm = " << fmt(cfg.v_norm) << "\n";
    os << "v23_scale = " << fmt(cfg.v23_scale) << "\n";
    os << "v_abs = " << fmt(cfg.v_abs) << "\n";
    os << "theta_mode = " << (cfg.theta_from_bound ? "bound" : "fixed") << "\n";
    os << "theta_j = " << fmt(cfg.theta_j) << "\n";
    os << "vartheta_scale = " << fmt(cfg.vartheta_scale) << "\n";
    os << "vartheta_j = " << fmt(cfg.vartheta_j) << "\n";
    os << "gamma_db = " << fmt(cfg.gamma_db) << "\n";
    os << "mu_norm = " << fmt(cfg.mu_norm) << "\n";
    os << "mu_abs = " << fmt(cfg.mu_abs) << "\n";
    os << "solver_max_iters = " << cfg.solver_max_iters << "\n";
    os << "solver_step = " << fmt(cfg.solver_step) << "\n";
    os << "solver_backtrack = " << fmt(cfg.solver_backtrack) << "\n";
    os << "solver_tolerance = " << fmt(cfg.solver_tolerance) << "\n";
    os << "\n[sim]\n";
    os << "horizon = " << cfg.horizon << "\n";
    os << "burn_in = " << cfg.burn_in << "\n";
    os << "trials = " << cfg.trials << "\n";
    os << "seed = " << cfg.seed << "\n";
    switch (cfg.battery_init) {
        case ExperimentConfig::BatteryInit::theta: os << "battery_init = theta\n"; break;
        case ExperimentConfig::BatteryInit::min: os << "battery_init = min\n"; break;
        case ExperimentConfig::BatteryInit::vartheta_half:
            os << "battery_init = vartheta_half\n";
            break;
        case ExperimentConfig::BatteryInit::fixed: os << "battery_init = fixed\n"; break;
    }
    os << "battery_init_j = " << fmt(cfg.battery_init_j) << "\n";
    os << "record_node_detail = " << (cfg.record_node_detail ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace ehsim
