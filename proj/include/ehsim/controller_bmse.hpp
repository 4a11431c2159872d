#ifndef EHSIM_CONTROLLER_BMSE_HPP
#define EHSIM_CONTROLLER_BMSE_HPP

#include <Eigen/Dense>
#include <vector>

#include "ehsim/radio_energy.hpp"

namespace ehsim {

// Drift-plus-penalty controller that minimizes the time-average estimation
// error subject to battery stability. Each slot it applies two closed-form
// threshold rules per node: harvest everything while the battery is at or
// below its offset, and transmit at full cap while the battery queue clears
// the weighted-gradient threshold.

struct BmseControlConfig {
    double tradeoff_v = 1.0;             // penalty weight V
    bool offset_from_bound = true;       // size offsets from the gradient bound
    double fixed_offset = 0.0;           // used when offset_from_bound is false
};

// Stability offset theta = V * g_bound + 2 e_max + 2 overhead. With this
// choice the battery is meant to stay inside
// [e_max + overhead, theta + r_max - overhead].
double theta_for_stability(double tradeoff_v, double gradient_bound, double e_max,
                           double overhead);

// r = arrival if battery <= offset (ties harvest), else 0.
double harvest_decision(double battery, double offset, double arrival);

// e = e_max if queue >= v * gradient (ties transmit), else 0. gradient is the
// estimation-error derivative at the previous slot's energies, always <= 0.
double transmit_decision(double queue, double tradeoff_v, double gradient, double e_max);

// Per-node decisions of one slot (before bit quantization / battery update).
struct SlotDecisions {
    Eigen::VectorXd energies;   // decided transmit energies
    Eigen::VectorXd harvested;  // decided harvested energies
};

// Applies harvest_decision and transmit_decision to every node.
SlotDecisions bmse_control_slot(const std::vector<NodeEnergyState>& states,
                                const Eigen::VectorXd& gradient,
                                const Eigen::VectorXd& arrivals, double tradeoff_v);

// Diagnostic 0.5 * sum_i queue_i^2, logged per slot.
double lyapunov_value(const Eigen::VectorXd& queues);

}  // namespace ehsim

#endif
