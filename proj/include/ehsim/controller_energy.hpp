#ifndef EHSIM_CONTROLLER_ENERGY_HPP
#define EHSIM_CONTROLLER_ENERGY_HPP

#include <Eigen/Dense>
#include <vector>

#include "ehsim/controller_bmse.hpp"
#include "ehsim/fusion.hpp"
#include "ehsim/radio_energy.hpp"

namespace ehsim {

// Controller that minimizes the time-average transmit energy subject to an
// average estimation-error target gamma and battery stability. A scalar
// virtual queue z accumulates the constraint violation; per slot the
// controller either solves the weighted energy/error trade-off numerically
// (descent variant) or applies the linearized closed-form rule.

enum class EnergySolver { descent, closed_form };

struct EnergyControlConfig {
    double tradeoff_v = 1.0;   // energy penalty weight V [J]
    double bmse_target = 0.1;  // gamma, linear units
    double queue_step = 1.0;   // mu
    EnergySolver solver = EnergySolver::closed_form;

    // Projected-gradient parameters (descent variant). The step and tolerance
    // are expressed in box-normalized coordinates e_i / u_i.
    int max_iters = 50;
    double initial_step = 0.1;
    double backtrack = 0.5;
    double tolerance = 1e-8;
    bool multi_start = true;   // also try box corners and the closed-form point
};

// z' = max(z + mu * (bmse - gamma), 0).
double bmse_queue_update(double z, double mu, double bmse_value, double gamma);

// Linearized closed-form rule: transmit min(e_max, battery - overhead),
// clamped at zero if the node cannot afford its overhead, iff
// queue >= v + z * gradient (ties transmit).
double energy_rule_closed_form(double queue, double tradeoff_v, double z, double gradient,
                               double battery, double e_max, double overhead);

// Approximately minimizes  sum_i (v - queue_i) e_i + z * bmse(e)  over the box
// 0 <= e_i <= min(e_max_i, battery_i - overhead_i) by projected gradient
// descent with backtracking, warm-started at the previous solution. The
// returned point never has a larger objective than the projected warm start.
Eigen::VectorXd energy_solve_descent(const std::vector<NodeEnergyState>& states, double z,
                                     double tradeoff_v, const BmseContext& ctx,
                                     const Eigen::VectorXd& warm_start,
                                     const EnergyControlConfig& cfg);

// Objective of the per-slot problem, exposed for tests.
double energy_slot_objective(const std::vector<NodeEnergyState>& states, double z,
                             double tradeoff_v, const BmseContext& ctx,
                             const Eigen::VectorXd& energies);

// Harvest plus energy decisions for one slot; gradient is evaluated at the
// previous slot's energies.
SlotDecisions energy_control_slot(const std::vector<NodeEnergyState>& states, double z,
                                  const BmseContext& ctx_prev_energies,
                                  const Eigen::VectorXd& gradient,
                                  const Eigen::VectorXd& arrivals,
                                  const EnergyControlConfig& cfg);

}  // namespace ehsim

#endif
