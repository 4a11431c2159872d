#ifndef EHSIM_SIGNAL_MODEL_HPP
#define EHSIM_SIGNAL_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "ehsim/rng.hpp"

namespace ehsim {

// Sensor network geometry on a disk with a Gaussian-kernel graph.
struct NetworkTopology {
    int node_count = 0;
    double radius_m = 0.0;
    Eigen::MatrixX2d positions;  // meters, one row per node
    Eigen::MatrixXd adjacency;   // symmetric, zero diagonal
    Eigen::MatrixXd laplacian;   // degree - adjacency
};

// Random prior of the latent subspace signal plus the observation model.
struct SignalPrior {
    Eigen::MatrixXd basis;         // U, N x r
    int subspace_dim = 0;          // r
    Eigen::VectorXd mean;          // length r (zero in all generated priors)
    Eigen::MatrixXd covariance;    // C_s, r x r SPD
    Eigen::MatrixXd cov_cholesky;  // lower factor of C_s
    Eigen::MatrixXd cov_inverse;   // C_s^{-1}
    Eigen::VectorXd obs_noise_var; // per-node observation noise variance
    double amplitude = 1.0;        // observable range is [-amplitude, amplitude]
};

// One slot of synthetic ground truth: latent s, field x = U s, noisy y.
struct SlotSignal {
    Eigen::VectorXd latent;    // s
    Eigen::VectorXd field;     // x
    Eigen::VectorXd observed;  // y, clamped to [-A, A]
};

// Samples n nodes uniformly on a disk and builds the Gaussian-weight graph.
// Pairwise distances are normalized by the disk diameter before the kernel,
// so kernel_variance is a dimensionless scale parameter.
NetworkTopology build_topology(int n, double radius_m, double kernel_variance,
                               std::uint64_t seed);

// Orthonormal Laplacian eigenvectors with the r smallest eigenvalues, sorted
// ascending. Sign convention: first component of each column with magnitude
// above 1e-12 is positive.
Eigen::MatrixXd build_subspace(const NetworkTopology& topology, int r);

// Zero-mean prior with a random SPD covariance rescaled so that its trace
// equals 10^(worst_bmse_db / 10), i.e. the estimation error with no data.
SignalPrior make_signal_prior(const Eigen::MatrixXd& basis, double worst_bmse_db,
                              double noise_var, double amplitude, std::uint64_t seed);

// Draws s ~ N(0, C_s), x = U s, y = x + noise, each y_i clamped to [-A, A].
SlotSignal sample_slot(const SignalPrior& prior, Rng& rng);

}  // namespace ehsim

#endif
