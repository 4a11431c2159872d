#include "ehsim/signal_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ehsim {

NetworkTopology build_topology(int n, double radius_m, double kernel_variance,
                               std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("build_topology: need at least 2 nodes");
    if (radius_m <= 0.0) throw std::invalid_argument("build_topology: radius must be positive");
    if (kernel_variance <= 0.0) {
        throw std::invalid_argument("build_topology: kernel variance must be positive");
    }

    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    NetworkTopology topo;
    topo.node_count = n;
    topo.radius_m = radius_m;
    topo.positions.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        // uniform on the disk: radius ~ R*sqrt(u), angle uniform
        const double rho = radius_m * std::sqrt(unit(rng));
        const double phi = 2.0 * M_PI * unit(rng);
        topo.positions(i, 0) = rho * std::cos(phi);
        topo.positions(i, 1) = rho * std::sin(phi);
    }

    const double diameter = 2.0 * radius_m;
    topo.adjacency = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = (topo.positions.row(i) - topo.positions.row(j)).norm() / diameter;
            const double w = std::exp(-d * d / (2.0 * kernel_variance));
            topo.adjacency(i, j) = w;
            topo.adjacency(j, i) = w;
        }
    }
    topo.laplacian = Eigen::MatrixXd(topo.adjacency.rowwise().sum().asDiagonal());
    topo.laplacian -= topo.adjacency;
    return topo;
}

Eigen::MatrixXd build_subspace(const NetworkTopology& topology, int r) {
    const int n = topology.node_count;
    if (r < 1 || r > n) throw std::invalid_argument("build_subspace: need 1 <= r <= N");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(topology.laplacian);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("build_subspace: eigendecomposition failed");
    }
    // eigenvalues come out ascending
    Eigen::MatrixXd basis = solver.eigenvectors().leftCols(r);
    for (int k = 0; k < r; ++k) {
        for (int i = 0; i < n; ++i) {
            if (std::abs(basis(i, k)) > 1e-12) {
                if (basis(i, k) < 0.0) basis.col(k) = -basis.col(k);
                break;
            }
        }
    }
    return basis;
}

SignalPrior make_signal_prior(const Eigen::MatrixXd& basis, double worst_bmse_db,
                              double noise_var, double amplitude, std::uint64_t seed) {
    if (basis.cols() < 1) throw std::invalid_argument("make_signal_prior: empty basis");
    if (noise_var < 0.0) throw std::invalid_argument("make_signal_prior: negative noise variance");
    if (amplitude <= 0.0) throw std::invalid_argument("make_signal_prior: amplitude must be positive");

    const int r = static_cast<int>(basis.cols());
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // random orthogonal factor from a QR of a Gaussian matrix, with the sign
    // of the R diagonal fixed so the draw is unambiguous
    Eigen::MatrixXd g(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < r; ++k) {
        if (rmat(k, k) < 0.0) q.col(k) = -q.col(k);
    }

    // positive weights rescaled so the covariance trace hits the target
    const double target_trace = std::pow(10.0, worst_bmse_db / 10.0);
    Eigen::VectorXd lambda(r);
    for (int k = 0; k < r; ++k) lambda(k) = 1.0 - unit(rng);  // (0, 1]
    lambda *= target_trace / lambda.sum();

    SignalPrior prior;
    prior.basis = basis;
    prior.subspace_dim = r;
    prior.mean = Eigen::VectorXd::Zero(r);
    prior.covariance = q * lambda.asDiagonal() * q.transpose();
    prior.covariance = 0.5 * (prior.covariance + prior.covariance.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(prior.covariance);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("make_signal_prior: covariance not positive definite");
    }
    prior.cov_cholesky = llt.matrixL();
    prior.cov_inverse = llt.solve(Eigen::MatrixXd::Identity(r, r));
    prior.obs_noise_var = Eigen::VectorXd::Constant(basis.rows(), noise_var);
    prior.amplitude = amplitude;
    return prior;
}

SlotSignal sample_slot(const SignalPrior& prior, Rng& rng) {
    const int r = prior.subspace_dim;
    const int n = static_cast<int>(prior.basis.rows());
    std::normal_distribution<double> gauss(0.0, 1.0);

    SlotSignal slot;
    Eigen::VectorXd z(r);
    for (int k = 0; k < r; ++k) z(k) = gauss(rng);
    slot.latent = prior.mean + prior.cov_cholesky * z;
    slot.field = prior.basis * slot.latent;
    slot.observed.resize(n);
    for (int i = 0; i < n; ++i) {
        const double sd = std::sqrt(prior.obs_noise_var(i));
        const double y = slot.field(i) + (sd > 0.0 ? sd * gauss(rng) : 0.0);
        slot.observed(i) = std::clamp(y, -prior.amplitude, prior.amplitude);
    }
    return slot;
}

}  // namespace ehsim
