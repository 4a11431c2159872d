#ifndef EHSIM_RADIO_ENERGY_HPP
#define EHSIM_RADIO_ENERGY_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "ehsim/rng.hpp"
#include "ehsim/signal_model.hpp"

namespace ehsim {

// QAM link budget constants. The per-bit-count transmission energy is
//   e = c * (2^b - 1),  c = 2 Nf N0 Gd T ln(2/BER) / h^2.
struct RadioParams {
    double noise_psd = 4e-21;     // N0 [W/Hz]
    double noise_figure = 10.0;   // Nf
    double system_const = 1e-3;   // Gd
    double slot_s = 1e-3;         // T [s]
    double ber = 1e-4;            // target bit error rate, per node
    double carrier_hz = 1e7;
    int max_bits = 4;
    bool rayleigh_fading = true;  // multiplicative unit-mean exponential power fading
};

// One slot of channel randomness: power gains and resulting cost coefficients.
struct ChannelDraw {
    Eigen::VectorXd gain2;  // h_i^2, free-space path loss times fading
    Eigen::VectorXd cost;   // c_i [J]
};

// Per-node energy bookkeeping. queue() is the virtual queue driving the
// controllers: battery level relative to the operating offset.
struct NodeEnergyState {
    double battery = 0.0;   // B_i [J], never negative
    double offset = 0.0;    // theta_i (stability offset) [J]
    double overhead = 0.0;  // e_{o,i}, per-slot non-transmission drain [J]
    double e_max = 0.0;     // radio interface cap [J]

    double queue() const { return battery - offset; }
};

// Energy arrival process, bounded by r_max each slot.
struct ArrivalProcess {
    enum class Kind { uniform, on_off };
    Kind kind = Kind::uniform;
    double r_max = 0.0;    // [J]
    double window_s = 1.0; // on_off: full period; first half ON, second half OFF
};

// Free-space gains to the fusion center (node-FC distance floored at 1 m)
// with optional i.i.d. unit-mean exponential power fading per slot.
ChannelDraw sample_channel(const NetworkTopology& topology, const RadioParams& params,
                           const Eigen::Vector2d& fc_position, Rng& rng);

// e = c * (2^b - 1).
double energy_for_bits(int bits, double cost);

// Largest affordable bit count: min(b_max, floor(log2(1 + e/c))).
// 0 means the node stays silent.
int bits_for_energy(double energy, double cost, int max_bits);

// Per-node transmit-energy caps: the energy needed for max_bits bits on the
// percentile-quantile channel. mc_draws == 0 uses the closed-form exponential
// quantile; otherwise the quantile is estimated from mc_draws fading samples.
Eigen::VectorXd calibrate_e_max(const RadioParams& params, const NetworkTopology& topology,
                                const Eigen::Vector2d& fc_position, double percentile,
                                int mc_draws, std::uint64_t seed);

// Arrivals for slot t. uniform: i.i.d. U(0, r_max). on_off: U(0, r_max)
// during the first half of each window, zero during the second half.
Eigen::VectorXd sample_arrivals(const ArrivalProcess& process, long slot, double slot_s,
                                int n, Rng& rng);

// One battery update B' = B - e - overhead + r. Transmitting requires
// e <= B - overhead (energy causality; throws contract_violation otherwise).
// An idle node pays min(overhead, B), so a starved battery sits at zero
// instead of going negative.
NodeEnergyState battery_step(const NodeEnergyState& state, double energy, double harvested);

}  // namespace ehsim

#endif
