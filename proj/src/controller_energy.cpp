#include "ehsim/controller_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ehsim {

double bmse_queue_update(double z, double mu, double bmse_value, double gamma) {
    if (z < 0.0 || mu <= 0.0 || gamma <= 0.0) {
        throw std::invalid_argument("bmse_queue_update: bad arguments");
    }
    return std::max(z + mu * (bmse_value - gamma), 0.0);
}

double energy_rule_closed_form(double queue, double tradeoff_v, double z, double gradient,
                               double battery, double e_max, double overhead) {
    const double cap = std::min(e_max, battery - overhead);
    if (cap <= 0.0) return 0.0;  // cannot afford overhead plus any transmission
    return queue >= tradeoff_v + z * gradient ? cap : 0.0;
}

double energy_slot_objective(const std::vector<NodeEnergyState>& states, double z,
                             double tradeoff_v, const BmseContext& ctx,
                             const Eigen::VectorXd& energies) {
    double linear = 0.0;
    for (size_t i = 0; i < states.size(); ++i) {
        linear += (tradeoff_v - states[i].queue()) * energies(static_cast<int>(i));
    }
    BmseContext at = ctx;
    at.energies = energies;
    return linear + z * bmse(at);
}

namespace {

struct BoxProblem {
    const std::vector<NodeEnergyState>* states;
    double z;
    double v;
    const BmseContext* ctx;
    Eigen::VectorXd upper;  // per-node cap min(e_max, battery - overhead), >= 0

    double value(const Eigen::VectorXd& e) const {
        return energy_slot_objective(*states, z, v, *ctx, e);
    }

    Eigen::VectorXd grad(const Eigen::VectorXd& e) const {
        BmseContext at = *ctx;
        at.energies = e;
        Eigen::VectorXd g = z * bmse_gradient(at);
        for (size_t i = 0; i < states->size(); ++i) {
            g(static_cast<int>(i)) += v - (*states)[i].queue();
        }
        return g;
    }

    Eigen::VectorXd project(const Eigen::VectorXd& e) const {
        return e.cwiseMax(0.0).cwiseMin(upper);
    }
};

// Projected gradient descent with backtracking. Works in box-normalized
// coordinates so the step size is meaningful at any energy scale; the first
// step is sized to move 10% of the box along the steepest coordinate.
Eigen::VectorXd descend(const BoxProblem& prob, const Eigen::VectorXd& start,
                        const EnergyControlConfig& cfg) {
    const Eigen::VectorXd scale = prob.upper.cwiseMax(1e-300);
    Eigen::VectorXd x = prob.project(start);
    double fx = prob.value(x);
    double step = -1.0;  // sized on first use

    for (int it = 0; it < cfg.max_iters; ++it) {
        Eigen::VectorXd g = prob.grad(x);
        Eigen::VectorXd g_scaled = g.cwiseProduct(scale);  // gradient in box units
        const double gmax = g_scaled.cwiseAbs().maxCoeff();
        if (gmax <= 0.0) break;
        if (step < 0.0) step = cfg.initial_step / gmax;

        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            const Eigen::VectorXd cand =
                prob.project(x - step * g.cwiseProduct(scale).cwiseProduct(scale));
            const Eigen::VectorXd d = cand - x;
            const double dnorm = d.cwiseQuotient(scale).cwiseAbs().maxCoeff();
            if (dnorm < cfg.tolerance) return x;
            const double fc = prob.value(cand);
            if (fc <= fx + 1e-4 * g.dot(d)) {
                x = cand;
                fx = fc;
                step *= 2.0;  // let the next iteration start more ambitiously
                moved = true;
                break;
            }
            step *= cfg.backtrack;
        }
        if (!moved) break;
    }
    return x;
}

}  // namespace

Eigen::VectorXd energy_solve_descent(const std::vector<NodeEnergyState>& states, double z,
                                     double tradeoff_v, const BmseContext& ctx,
                                     const Eigen::VectorXd& warm_start,
                                     const EnergyControlConfig& cfg) {
    const auto n = static_cast<int>(states.size());
    BoxProblem prob{&states, z, tradeoff_v, &ctx, Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        prob.upper(i) = std::max(0.0, std::min(states[static_cast<size_t>(i)].e_max,
                                               states[static_cast<size_t>(i)].battery -
                                                   states[static_cast<size_t>(i)].overhead));
    }

    std::vector<Eigen::VectorXd> starts;
    starts.push_back(prob.project(warm_start));
    if (cfg.multi_start) {
        starts.push_back(Eigen::VectorXd::Zero(n));
        starts.push_back(prob.upper);
        // the closed-form point of the linearized problem
        BmseContext warm_ctx = ctx;
        warm_ctx.energies = starts.front();
        const Eigen::VectorXd g = bmse_gradient(warm_ctx);
        Eigen::VectorXd corner(n);
        for (int i = 0; i < n; ++i) {
            corner(i) = energy_rule_closed_form(
                states[static_cast<size_t>(i)].queue(), tradeoff_v, z, g(i),
                states[static_cast<size_t>(i)].battery, states[static_cast<size_t>(i)].e_max,
                states[static_cast<size_t>(i)].overhead);
        }
        starts.push_back(prob.project(corner));
        if (n == 2) {  // cover all corner basins of the 2-node box
            Eigen::VectorXd c1(n), c2(n);
            c1 << prob.upper(0), 0.0;
            c2 << 0.0, prob.upper(1);
            starts.push_back(c1);
            starts.push_back(c2);
        }
    }

    Eigen::VectorXd best;
    double best_value = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        const Eigen::VectorXd x = descend(prob, s, cfg);
        const double fx = prob.value(x);
        if (fx < best_value) {
            best_value = fx;
            best = x;
        }
    }
    return best;
}

SlotDecisions energy_control_slot(const std::vector<NodeEnergyState>& states, double z,
                                  const BmseContext& ctx_prev_energies,
                                  const Eigen::VectorXd& gradient,
                                  const Eigen::VectorXd& arrivals,
                                  const EnergyControlConfig& cfg) {
    const auto n = static_cast<int>(states.size());
    SlotDecisions out;
    out.harvested.resize(n);
    for (int i = 0; i < n; ++i) {
        out.harvested(i) =
            harvest_decision(states[static_cast<size_t>(i)].battery,
                             states[static_cast<size_t>(i)].offset, arrivals(i));
    }

    if (cfg.solver == EnergySolver::closed_form) {
        out.energies.resize(n);
        for (int i = 0; i < n; ++i) {
            const auto& st = states[static_cast<size_t>(i)];
            out.energies(i) = energy_rule_closed_form(st.queue(), cfg.tradeoff_v, z,
                                                      gradient(i), st.battery, st.e_max,
                                                      st.overhead);
        }
    } else {
        out.energies = energy_solve_descent(states, z, cfg.tradeoff_v, ctx_prev_energies,
                                            ctx_prev_energies.energies, cfg);
    }
    return out;
}

}  // namespace ehsim
