#include "ehsim/controller_bmse.hpp"

#include <stdexcept>

namespace ehsim {

double theta_for_stability(double tradeoff_v, double gradient_bound, double e_max,
                           double overhead) {
    if (tradeoff_v < 0.0 || gradient_bound < 0.0 || e_max <= 0.0 || overhead < 0.0) {
        throw std::invalid_argument("theta_for_stability: bad arguments");
    }
    return tradeoff_v * gradient_bound + 2.0 * e_max + 2.0 * overhead;
}

double harvest_decision(double battery, double offset, double arrival) {
    if (arrival < 0.0) throw std::invalid_argument("harvest_decision: negative arrival");
    return battery <= offset ? arrival : 0.0;
}

double transmit_decision(double queue, double tradeoff_v, double gradient, double e_max) {
    return queue >= tradeoff_v * gradient ? e_max : 0.0;
}

SlotDecisions bmse_control_slot(const std::vector<NodeEnergyState>& states,
                                const Eigen::VectorXd& gradient,
                                const Eigen::VectorXd& arrivals, double tradeoff_v) {
    const auto n = static_cast<int>(states.size());
    SlotDecisions out;
    out.energies.resize(n);
    out.harvested.resize(n);
    for (int i = 0; i < n; ++i) {
        out.harvested(i) = harvest_decision(states[i].battery, states[i].offset, arrivals(i));
        out.energies(i) =
            transmit_decision(states[i].queue(), tradeoff_v, gradient(i), states[i].e_max);
    }
    return out;
}

double lyapunov_value(const Eigen::VectorXd& queues) {
    return 0.5 * queues.squaredNorm();
}

}  // namespace ehsim
