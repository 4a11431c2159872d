#ifndef EHSIM_FUSION_HPP
#define EHSIM_FUSION_HPP

#include <Eigen/Dense>
#include <vector>

#include "ehsim/signal_model.hpp"

namespace ehsim {

// Messages of one slot. Node i participates iff bits[i] >= 1; messages[i] is
// ignored otherwise.
struct FusionInput {
    std::vector<int> bits;      // length N, 0 = idle
    Eigen::VectorXd messages;   // length N
};

// Everything needed to evaluate the estimation error as a function of the
// transmit energies: prior, per-slot cost coefficients c_i (joules per unit
// of 2^b - 1), and the energy vector itself.
struct BmseContext {
    const SignalPrior* prior = nullptr;
    Eigen::VectorXd cost_coeffs;  // c_i > 0
    Eigen::VectorXd energies;     // e_i >= 0
};

// Total per-node disturbance variance sigma_i^2 + A^2/(2^{b_i}-1)^2, with
// +infinity marking idle nodes (b_i = 0).
Eigen::VectorXd noise_covariance_diag(const SignalPrior& prior,
                                      const std::vector<int>& bits);

// Bayesian linear MMSE estimate of the latent signal from the received
// messages. Idle nodes are dropped from the system. With no messages at all
// the estimate falls back to the prior-only expression, which is the zero
// vector for a zero-mean prior.
Eigen::VectorXd lmmse_estimate(const SignalPrior& prior, const FusionInput& input);

// Model mean-square estimation error Tr{ L(e)^{-1} } where
//   L(e) = C_s^{-1} + sum_i  e_i^2 / (e_i^2 sigma_i^2 + A^2 c_i^2) u_i u_i^T,
// with the i-th term equal to zero when e_i = 0 (continuous limit).
double bmse(const BmseContext& ctx);

// Analytic gradient of bmse() w.r.t. each energy. Component i is
//   -h_i * || L(e)^{-1} u_i ||^2,  h_i = 2 e_i A^2 c_i^2 / (e_i^2 sigma_i^2 + A^2 c_i^2)^2,
// exactly zero at e_i = 0. All components are <= 0.
Eigen::VectorXd bmse_gradient(const BmseContext& ctx);

// Closed-form bound used to size the battery stability offsets:
//   (1 / (2 e_max sigma_i^2)) * || (C_s^{-1} + sigma_i^{-2} u_i u_i^T)^{-1} u_i ||^2.
double bmse_gradient_bound(const SignalPrior& prior, int node, double e_max);

// Solves M x = b for symmetric positive-definite M, falling back to an
// eigenvalue-floored pseudo-solve (floor 1e-12) if the factorization fails.
Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& m, const Eigen::MatrixXd& rhs);

}  // namespace ehsim

#endif
