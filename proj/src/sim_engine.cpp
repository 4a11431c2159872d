#include "ehsim/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ehsim/errors.hpp"
#include "ehsim/quantizer.hpp"

namespace ehsim {

namespace {

double median(Eigen::VectorXd v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v(n / 2) : 0.5 * (v(n / 2 - 1) + v(n / 2));
}

// Typical gradient magnitude at partial activity (every other node at its
// cap) on the median-fading channel. Sets the scale of the error-queue
// coefficients: at the operating point the queue is traded against battery
// pressure through z * gradient, and the gradients that matter are the ones
// of a half-busy network, which are far larger than the all-active ones.
double typical_gradient_scale(const Experiment& ex) {
    const double median_fading = ex.cfg.radio.rayleigh_fading ? -std::log(0.5) : 1.0;
    Rng dummy(1);
    RadioParams no_fading = ex.cfg.radio;
    no_fading.rayleigh_fading = false;
    ChannelDraw draw = sample_channel(ex.topology, no_fading, ex.fc_position, dummy);
    Eigen::VectorXd half = ex.e_max;
    for (int i = 1; i < half.size(); i += 2) half(i) = 0.0;
    BmseContext ctx{&ex.prior, draw.cost / median_fading, half};
    const Eigen::VectorXd g = bmse_gradient(ctx);
    std::vector<double> active;
    for (int i = 0; i < g.size(); i += 2) active.push_back(std::abs(g(i)));
    Eigen::VectorXd av = Eigen::Map<Eigen::VectorXd>(active.data(),
                                                     static_cast<long>(active.size()));
    return std::max(median(av), 1e-300);
}

}  // namespace

double bmse_all_active(const SignalPrior& prior, int max_bits) {
    const int n = static_cast<int>(prior.basis.rows());
    const int r = prior.subspace_dim;
    if (n == 0) return prior.covariance.trace();
    Eigen::MatrixXd l = prior.cov_inverse;
    for (int i = 0; i < n; ++i) {
        const double var = prior.obs_noise_var(i) + quant_noise_variance(prior.amplitude, max_bits);
        l.noalias() += prior.basis.row(i).transpose() * prior.basis.row(i) / var;
    }
    return spd_solve(l, Eigen::MatrixXd::Identity(r, r)).trace();
}

Experiment resolve(const ExperimentConfig& cfg) {
    if (cfg.horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (cfg.burn_in >= 0 && cfg.burn_in > cfg.horizon) {
        throw std::invalid_argument("burn_in must not exceed horizon");
    }
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");

    Experiment ex;
    ex.cfg = cfg;
    ex.topology = build_topology(cfg.nodes, cfg.radius_m, cfg.kernel_variance,
                                 derive_seed(cfg.seed, seed_stream::topology));
    const Eigen::MatrixXd basis = build_subspace(ex.topology, cfg.subspace_dim);
    ex.prior = make_signal_prior(basis, cfg.worst_bmse_db, cfg.noise_var, cfg.amplitude,
                                 derive_seed(cfg.seed, seed_stream::prior));
    ex.e_max = calibrate_e_max(cfg.radio, ex.topology, ex.fc_position, cfg.emax_percentile,
                               cfg.emax_mc_draws,
                               derive_seed(cfg.seed, seed_stream::calibration));
    ex.overhead = cfg.overhead_frac * ex.e_max;

    const int n = cfg.nodes;
    ex.gradient_bound.resize(n);
    for (int i = 0; i < n; ++i) {
        ex.gradient_bound(i) = bmse_gradient_bound(ex.prior, i, ex.e_max(i));
    }

    ex.r_max = cfg.rmax_j > 0.0 ? cfg.rmax_j
                                : cfg.rmax_scale * (ex.e_max + ex.overhead).maxCoeff();

    if (cfg.controller == ControllerKind::alg1) {
        ex.tradeoff_v = cfg.v_abs > 0.0
                            ? cfg.v_abs
                            : cfg.v_norm * median(ex.e_max) / median(ex.gradient_bound);
        ex.offsets.resize(n);
        for (int i = 0; i < n; ++i) {
            ex.offsets(i) = cfg.theta_from_bound
                                ? theta_for_stability(ex.tradeoff_v, ex.gradient_bound(i),
                                                      ex.e_max(i), ex.overhead(i))
                                : cfg.theta_j;
        }
    } else {
        ex.tradeoff_v = cfg.v_abs > 0.0 ? cfg.v_abs : cfg.v23_scale * ex.r_max;
        ex.offsets = cfg.vartheta_j > 0.0
                         ? Eigen::VectorXd::Constant(n, cfg.vartheta_j)
                         : (cfg.vartheta_scale * (ex.e_max + ex.overhead)).eval();
        ex.gamma = std::pow(10.0, cfg.gamma_db / 10.0);
        const double grad_scale = typical_gradient_scale(ex);
        ex.z_ref = ex.tradeoff_v / grad_scale;
        ex.mu = cfg.mu_abs > 0.0 ? cfg.mu_abs
                                 : cfg.mu_norm * ex.z_ref / (500.0 * ex.gamma);
    }

    ex.battery_init.resize(n);
    for (int i = 0; i < n; ++i) {
        switch (cfg.battery_init) {
            case ExperimentConfig::BatteryInit::theta:
                ex.battery_init(i) = ex.offsets(i);
                break;
            case ExperimentConfig::BatteryInit::min:
                ex.battery_init(i) = ex.e_max(i) + 2.0 * ex.overhead(i);
                break;
            case ExperimentConfig::BatteryInit::vartheta_half:
                ex.battery_init(i) = 0.5 * ex.offsets(i);
                break;
            case ExperimentConfig::BatteryInit::fixed:
                ex.battery_init(i) = cfg.battery_init_j;
                break;
        }
    }

    ex.bmse_all_active_value = bmse_all_active(ex.prior, cfg.radio.max_bits);
    return ex;
}

MetricsTrace run_trial(const Experiment& ex, std::uint64_t trial_seed) {
    const ExperimentConfig& cfg = ex.cfg;
    const int n = cfg.nodes;
    const long horizon = cfg.horizon;
    Rng rng(trial_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<NodeEnergyState> states(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        states[static_cast<size_t>(i)] =
            NodeEnergyState{ex.battery_init(i), ex.offsets(i), ex.overhead(i), ex.e_max(i)};
    }

    Eigen::VectorXd e_prev(n);
    for (int i = 0; i < n; ++i) e_prev(i) = unit(rng) * ex.e_max(i);

    const bool queue_controller = cfg.controller != ControllerKind::alg1;
    double z = 0.0;
    if (queue_controller) z = (1.0 - unit(rng)) * ex.z_ref;  // positive, at random

    EnergyControlConfig energy_cfg;
    energy_cfg.tradeoff_v = ex.tradeoff_v;
    energy_cfg.bmse_target = ex.gamma;
    energy_cfg.queue_step = ex.mu;
    energy_cfg.solver = cfg.controller == ControllerKind::alg2 ? EnergySolver::descent
                                                               : EnergySolver::closed_form;
    energy_cfg.max_iters = cfg.solver_max_iters;
    energy_cfg.initial_step = cfg.solver_step;
    energy_cfg.backtrack = cfg.solver_backtrack;
    energy_cfg.tolerance = cfg.solver_tolerance;

    const ArrivalProcess arrivals_proc{cfg.arrival_kind, ex.r_max, cfg.window_s};

    MetricsTrace trace;
    trace.bmse_model.resize(horizon);
    trace.err_empirical.resize(horizon);
    trace.active_count.resize(horizon);
    trace.energy_sum.resize(horizon);
    trace.battery_mean.resize(horizon);
    trace.z_queue.resize(horizon);
    trace.lyapunov.resize(horizon);
    trace.battery_min.resize(n);
    trace.battery_max.resize(n);
    for (int i = 0; i < n; ++i) {
        trace.battery_min(i) = states[static_cast<size_t>(i)].battery;
        trace.battery_max(i) = states[static_cast<size_t>(i)].battery;
    }
    if (cfg.record_node_detail) {
        trace.node_battery.resize(horizon + 1, n);
        trace.node_energy.resize(horizon, n);
        trace.node_decided.resize(horizon, n);
        trace.node_harvest.resize(horizon, n);
        for (int i = 0; i < n; ++i) {
            trace.node_battery(0, i) = states[static_cast<size_t>(i)].battery;
        }
    }

    std::vector<int> bits(static_cast<size_t>(n), 0);
    Eigen::VectorXd e_real(n), queues(n);

    for (long t = 0; t < horizon; ++t) {
        // observe the slot's randomness
        const ChannelDraw channel = sample_channel(ex.topology, cfg.radio, ex.fc_position, rng);
        const Eigen::VectorXd arrivals =
            sample_arrivals(arrivals_proc, t, cfg.radio.slot_s, n, rng);

        // control: linearization gradient at the previous energies, current costs
        BmseContext grad_ctx{&ex.prior, channel.cost, e_prev};
        const Eigen::VectorXd gradient = bmse_gradient(grad_ctx);

        SlotDecisions decisions;
        if (cfg.controller == ControllerKind::alg1) {
            decisions = bmse_control_slot(states, gradient, arrivals, ex.tradeoff_v);
        } else {
            decisions = energy_control_slot(states, z, grad_ctx, gradient, arrivals, energy_cfg);
        }

        // a decision the battery cannot cover is cut down and counted; with
        // stability offsets in force this never triggers
        for (int i = 0; i < n; ++i) {
            const auto& st = states[static_cast<size_t>(i)];
            const double affordable = std::max(0.0, st.battery - st.overhead);
            if (decisions.energies(i) > affordable) {
                decisions.energies(i) = affordable;
                ++trace.causality_clamps;
            }
        }

        // map the continuous decision onto the discrete radio
        int active = 0;
        for (int i = 0; i < n; ++i) {
            bits[static_cast<size_t>(i)] =
                bits_for_energy(decisions.energies(i), channel.cost(i), cfg.radio.max_bits);
            e_real(i) = std::min(energy_for_bits(bits[static_cast<size_t>(i)], channel.cost(i)),
                                 decisions.energies(i));
            if (bits[static_cast<size_t>(i)] >= 1) ++active;
            else e_real(i) = 0.0;
        }

        // sense, quantize, fuse
        const SlotSignal signal = sample_slot(ex.prior, rng);
        FusionInput fin;
        fin.bits = bits;
        fin.messages = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (bits[static_cast<size_t>(i)] >= 1) {
                fin.messages(i) = quantize(signal.observed(i), bits[static_cast<size_t>(i)],
                                           ex.prior.amplitude, rng, i).value;
            }
        }
        const Eigen::VectorXd shat = lmmse_estimate(ex.prior, fin);

        BmseContext realized_ctx{&ex.prior, channel.cost, e_real};
        const double bmse_t = bmse(realized_ctx);

        for (int i = 0; i < n; ++i) queues(i) = states[static_cast<size_t>(i)].queue();

        trace.bmse_model(t) = bmse_t;
        trace.err_empirical(t) = (shat - signal.latent).squaredNorm();
        trace.active_count(t) = active;
        trace.energy_sum(t) = e_real.sum();
        double bsum = 0.0;
        for (const auto& st : states) bsum += st.battery;
        trace.battery_mean(t) = bsum / n;
        trace.z_queue(t) = queue_controller ? z : 0.0;
        trace.lyapunov(t) =
            lyapunov_value(queues) + (queue_controller ? 0.5 * z * z : 0.0);

        // battery and queue updates
        for (int i = 0; i < n; ++i) {
            auto& st = states[static_cast<size_t>(i)];
            if (e_real(i) == 0.0 && st.battery < st.overhead) ++trace.overhead_underruns;
            st = battery_step(st, e_real(i), decisions.harvested(i));
            if (st.battery < 0.0) throw contract_violation("negative battery");
            trace.battery_min(i) = std::min(trace.battery_min(i), st.battery);
            trace.battery_max(i) = std::max(trace.battery_max(i), st.battery);
        }
        if (queue_controller) z = bmse_queue_update(z, ex.mu, bmse_t, ex.gamma);

        if (cfg.record_node_detail) {
            for (int i = 0; i < n; ++i) {
                trace.node_battery(t + 1, i) = states[static_cast<size_t>(i)].battery;
                trace.node_energy(t, i) = e_real(i);
                trace.node_decided(t, i) = decisions.energies(i);
                trace.node_harvest(t, i) = decisions.harvested(i);
            }
        }

        e_prev = decisions.energies;
    }

    const long burn = std::min(cfg.effective_burn_in(), horizon);
    const long m = horizon - burn;
    if (m > 0) {
        trace.mean_bmse = trace.bmse_model.tail(m).mean();
        trace.mean_err = trace.err_empirical.tail(m).mean();
        trace.mean_active = trace.active_count.tail(m).mean();
        trace.mean_energy = trace.energy_sum.tail(m).mean();
        trace.mean_battery = trace.battery_mean.tail(m).mean();
    }
    return trace;
}

MonteCarloResult run_monte_carlo(const Experiment& ex) {
    const int trials = ex.cfg.trials;
    MonteCarloResult result;
    result.trials.resize(static_cast<size_t>(trials));

    std::atomic<int> next{0};
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(trials));
    std::exception_ptr failure = nullptr;
    std::mutex failure_mutex;
    auto body = [&]() {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= trials) return;
            try {
                result.trials[static_cast<size_t>(k)] = run_trial(
                    ex, derive_seed(ex.cfg.seed, seed_stream::trial_base + static_cast<std::uint64_t>(k)));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    auto stats = [&](auto getter, double& mean, double* stdev) {
        double s = 0.0;
        for (const auto& tr : result.trials) s += getter(tr);
        mean = s / trials;
        if (stdev) {
            double q = 0.0;
            for (const auto& tr : result.trials) {
                const double d = getter(tr) - mean;
                q += d * d;
            }
            *stdev = trials > 1 ? std::sqrt(q / (trials - 1)) : 0.0;
        }
    };
    stats([](const MetricsTrace& t) { return t.mean_bmse; }, result.bmse_mean, &result.bmse_std);
    stats([](const MetricsTrace& t) { return t.mean_err; }, result.err_mean, nullptr);
    stats([](const MetricsTrace& t) { return t.mean_active; }, result.active_mean,
          &result.active_std);
    stats([](const MetricsTrace& t) { return t.mean_energy; }, result.energy_mean,
          &result.energy_std);
    stats([](const MetricsTrace& t) { return t.mean_battery; }, result.battery_mean,
          &result.battery_std);
    return result;
}

}  // namespace ehsim
