#ifndef EHSIM_SIM_ENGINE_HPP
#define EHSIM_SIM_ENGINE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ehsim/controller_bmse.hpp"
#include "ehsim/controller_energy.hpp"
#include "ehsim/fusion.hpp"
#include "ehsim/radio_energy.hpp"
#include "ehsim/signal_model.hpp"

namespace ehsim {

enum class ControllerKind { alg1, alg2, alg3 };

// Full experiment description. Scale-dependent quantities (transmit caps,
// arrival bound, penalty weights, queue steps) are given as dimensionless
// multiples of calibrated references so the same file works at any absolute
// radio scale; absolute overrides exist for each.
struct ExperimentConfig {
    // network
    int nodes = 50;
    double radius_m = 100.0;
    double kernel_variance = 0.25;
    int subspace_dim = 6;

    // signal
    double worst_bmse_db = -2.0;
    double noise_var = 1e-4;
    double amplitude = 1.0;

    // radio
    RadioParams radio;
    double emax_percentile = 0.05;
    int emax_mc_draws = 0;        // 0 = closed-form quantile
    double overhead_frac = 0.05;  // e_{o,i} = frac * e_i^max

    // arrivals
    ArrivalProcess::Kind arrival_kind = ArrivalProcess::Kind::uniform;
    double rmax_scale = 4.0;  // r_max = scale * max_i(e_i^max + e_{o,i})
    double rmax_j = 0.0;      // absolute override when > 0
    double window_s = 1.0;

    // controller
    ControllerKind controller = ControllerKind::alg1;
    double v_norm = 1.0;          // alg1: V = v_norm * median(e_max)/median(g_bound)
    double v23_scale = 0.75;      // alg2/3: V = v23_scale * r_max; the closed-form
                                  // rule can only re-activate idle nodes while
                                  // V < r_max - overhead, so keep this below 1
    double v_abs = 0.0;           // absolute override for either, when > 0
    bool theta_from_bound = true; // alg1 offset rule; false = fixed theta_j
    double theta_j = 0.0;
    double vartheta_scale = 25.0; // alg2/3: offset = scale * (e_i^max + e_{o,i})
    double vartheta_j = 0.0;      // absolute override when > 0
    double gamma_db = -16.0;      // alg2/3 error target
    double mu_norm = 1.0;         // queue step multiplier; see resolve()
    double mu_abs = 0.0;          // absolute override when > 0
    int solver_max_iters = 50;
    double solver_step = 0.1;
    double solver_backtrack = 0.5;
    double solver_tolerance = 1e-8;

    // simulation
    long horizon = 10000;
    long burn_in = -1;  // -1 = 90% of horizon
    int trials = 50;
    std::uint64_t seed = 1;
    enum class BatteryInit { theta, min, vartheta_half, fixed };
    BatteryInit battery_init = BatteryInit::theta;
    double battery_init_j = 0.0;
    bool record_node_detail = false;  // keep per-node trajectories (tests)

    long effective_burn_in() const {
        return burn_in >= 0 ? burn_in : static_cast<long>(0.9 * static_cast<double>(horizon));
    }
};

// Config resolved into concrete per-node quantities, shared by all trials.
struct Experiment {
    ExperimentConfig cfg;
    NetworkTopology topology;
    SignalPrior prior;
    Eigen::Vector2d fc_position{0.0, 0.0};
    Eigen::VectorXd e_max;           // per node
    Eigen::VectorXd overhead;        // per node
    Eigen::VectorXd gradient_bound;  // per node
    Eigen::VectorXd offsets;         // theta or vartheta per node
    Eigen::VectorXd battery_init;    // B_i(0)
    double r_max = 0.0;
    double tradeoff_v = 0.0;  // absolute V
    double gamma = 0.0;       // linear error target (alg2/3)
    double mu = 0.0;          // absolute queue step (alg2/3)
    double z_ref = 0.0;       // scale of the error queue at equilibrium
    double bmse_all_active_value = 0.0;  // benchmark, all nodes at max_bits
};

// Per-slot records of one trial plus aggregates over the post-burn-in window.
struct MetricsTrace {
    Eigen::VectorXd bmse_model;     // model error at realized energies
    Eigen::VectorXd err_empirical;  // || shat - s ||^2
    Eigen::VectorXd active_count;
    Eigen::VectorXd energy_sum;     // sum of realized transmit energies [J]
    Eigen::VectorXd battery_mean;   // mean over nodes, start-of-slot [J]
    Eigen::VectorXd z_queue;        // start-of-slot (alg2/3, else 0)
    Eigen::VectorXd lyapunov;       // controller Lyapunov value

    // battery envelope per node, including initial and final states
    Eigen::VectorXd battery_min;
    Eigen::VectorXd battery_max;

    // diagnostics; all zero in healthy theorem-mode runs
    long causality_clamps = 0;   // decisions cut to battery - overhead
    long overhead_underruns = 0; // idle node could not pay full overhead

    // time means over slots >= burn_in
    double mean_bmse = 0.0;
    double mean_err = 0.0;
    double mean_active = 0.0;
    double mean_energy = 0.0;
    double mean_battery = 0.0;

    // optional per-node trajectories (record_node_detail)
    Eigen::MatrixXd node_battery;   // (horizon+1) x N
    Eigen::MatrixXd node_energy;    // horizon x N, realized
    Eigen::MatrixXd node_decided;   // horizon x N, controller decisions
    Eigen::MatrixXd node_harvest;   // horizon x N
};

struct MonteCarloResult {
    std::vector<MetricsTrace> trials;

    // across-trial statistics of the per-trial time means
    double bmse_mean = 0.0, bmse_std = 0.0;
    double err_mean = 0.0;
    double active_mean = 0.0, active_std = 0.0;
    double energy_mean = 0.0, energy_std = 0.0;
    double battery_mean = 0.0, battery_std = 0.0;
};

// Builds topology, prior, calibration and controller constants from a config.
Experiment resolve(const ExperimentConfig& cfg);

// Runs one trial; fully deterministic given the experiment and trial seed.
MetricsTrace run_trial(const Experiment& ex, std::uint64_t trial_seed);

// Runs cfg.trials trials (seeds derived from the master seed) on a small
// thread pool and aggregates. Trial k's trace does not depend on the total
// number of trials.
MonteCarloResult run_monte_carlo(const Experiment& ex);

// Estimation error with every node transmitting at max_bits; the benchmark
// floor the V-sweeps approach.
double bmse_all_active(const SignalPrior& prior, int max_bits);

}  // namespace ehsim

#endif
