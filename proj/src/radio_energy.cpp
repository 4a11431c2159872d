#include "ehsim/radio_energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ehsim/errors.hpp"

namespace ehsim {

namespace {

constexpr double kLightSpeed = 299792458.0;
constexpr double kMinDistance = 1.0;  // m

void check_params(const RadioParams& p) {
    if (p.noise_psd <= 0.0 || p.noise_figure <= 0.0 || p.system_const <= 0.0 ||
        p.slot_s <= 0.0 || p.carrier_hz <= 0.0) {
        throw std::invalid_argument("radio params must be positive");
    }
    if (p.ber <= 0.0 || p.ber >= 1.0) throw std::invalid_argument("ber must be in (0, 1)");
    if (p.max_bits < 1) throw std::invalid_argument("max_bits must be >= 1");
}

double cost_constant(const RadioParams& p) {
    return 2.0 * p.noise_figure * p.noise_psd * p.system_const * p.slot_s *
           std::log(2.0 / p.ber);
}

Eigen::VectorXd path_gain(const NetworkTopology& topology, const RadioParams& params,
                          const Eigen::Vector2d& fc_position) {
    const double wavelength = kLightSpeed / params.carrier_hz;
    const int n = topology.node_count;
    Eigen::VectorXd gain(n);
    for (int i = 0; i < n; ++i) {
        const double d = std::max(
            kMinDistance, (topology.positions.row(i).transpose() - fc_position).norm());
        const double a = wavelength / (4.0 * M_PI * d);
        gain(i) = a * a;
    }
    return gain;
}

}  // namespace

ChannelDraw sample_channel(const NetworkTopology& topology, const RadioParams& params,
                           const Eigen::Vector2d& fc_position, Rng& rng) {
    check_params(params);
    const Eigen::VectorXd pg = path_gain(topology, params, fc_position);
    const double k = cost_constant(params);
    std::exponential_distribution<double> fading(1.0);

    ChannelDraw draw;
    draw.gain2.resize(topology.node_count);
    draw.cost.resize(topology.node_count);
    for (int i = 0; i < topology.node_count; ++i) {
        const double f = params.rayleigh_fading ? fading(rng) : 1.0;
        draw.gain2(i) = pg(i) * f;
        draw.cost(i) = k / draw.gain2(i);
    }
    return draw;
}

double energy_for_bits(int bits, double cost) {
    if (bits <= 0) return 0.0;
    return cost * (std::ldexp(1.0, bits) - 1.0);
}

int bits_for_energy(double energy, double cost, int max_bits) {
    if (energy <= 0.0 || cost <= 0.0) return 0;
    const int b = static_cast<int>(std::floor(std::log2(1.0 + energy / cost)));
    return std::min(b, max_bits);
}

Eigen::VectorXd calibrate_e_max(const RadioParams& params, const NetworkTopology& topology,
                                const Eigen::Vector2d& fc_position, double percentile,
                                int mc_draws, std::uint64_t seed) {
    check_params(params);
    if (percentile <= 0.0 || percentile >= 1.0) {
        throw std::invalid_argument("calibrate_e_max: percentile must be in (0, 1)");
    }
    if (mc_draws != 0 && mc_draws < 1000) {
        throw std::invalid_argument("calibrate_e_max: need at least 1e3 draws");
    }

    double fading_quantile = 1.0;
    if (params.rayleigh_fading) {
        if (mc_draws == 0) {
            fading_quantile = -std::log1p(-percentile);
        } else {
            Rng rng(seed);
            std::exponential_distribution<double> fading(1.0);
            std::vector<double> samples(static_cast<size_t>(mc_draws));
            for (auto& s : samples) s = fading(rng);
            const auto idx = static_cast<std::ptrdiff_t>(percentile * mc_draws);
            std::nth_element(samples.begin(), samples.begin() + idx, samples.end());
            fading_quantile = samples[static_cast<size_t>(idx)];
        }
    }

    const Eigen::VectorXd pg = path_gain(topology, params, fc_position);
    const double k = cost_constant(params);
    const double bits_factor = std::ldexp(1.0, params.max_bits) - 1.0;
    Eigen::VectorXd e_max(topology.node_count);
    for (int i = 0; i < topology.node_count; ++i) {
        const double h2 = pg(i) * fading_quantile;
        e_max(i) = (k / h2) * bits_factor;
    }
    return e_max;
}

Eigen::VectorXd sample_arrivals(const ArrivalProcess& process, long slot, double slot_s,
                                int n, Rng& rng) {
    if (process.r_max < 0.0) throw std::invalid_argument("arrivals: r_max must be >= 0");
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    if (process.r_max == 0.0) return r;

    bool on = true;
    if (process.kind == ArrivalProcess::Kind::on_off) {
        const long period = std::max(2L, std::lround(process.window_s / slot_s));
        const long half = period / 2;
        on = (slot / half) % 2 == 0;
    }
    if (on) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int i = 0; i < n; ++i) r(i) = process.r_max * unit(rng);
    }
    return r;
}

NodeEnergyState battery_step(const NodeEnergyState& state, double energy, double harvested) {
    if (energy < 0.0 || harvested < 0.0) {
        throw std::invalid_argument("battery_step: energies must be nonnegative");
    }
    NodeEnergyState next = state;
    if (energy > 0.0) {
        if (energy > state.battery - state.overhead) {
            throw contract_violation("battery_step: transmit energy exceeds battery minus overhead");
        }
        next.battery = state.battery - energy - state.overhead + harvested;
    } else {
        // an idle node draws overhead only while the battery lasts
        next.battery = state.battery - std::min(state.overhead, state.battery) + harvested;
    }
    return next;
}

}  // namespace ehsim
