#include "ehsim/fusion.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ehsim/quantizer.hpp"

namespace ehsim {

namespace {

// Coefficient of u_i u_i^T in the information matrix, as a function of the
// transmit energy: e^2 / (e^2 sigma^2 + A^2 c^2), zero at e = 0.
double info_coefficient(double e, double sigma2, double a2c2) {
    if (e <= 0.0) return 0.0;
    return e * e / (e * e * sigma2 + a2c2);
}

Eigen::MatrixXd information_matrix(const BmseContext& ctx) {
    const SignalPrior& prior = *ctx.prior;
    const int n = static_cast<int>(prior.basis.rows());
    const double a2 = prior.amplitude * prior.amplitude;
    Eigen::MatrixXd l = prior.cov_inverse;
    for (int i = 0; i < n; ++i) {
        const double e = ctx.energies(i);
        if (e <= 0.0) continue;
        const double c = ctx.cost_coeffs(i);
        const double w = info_coefficient(e, prior.obs_noise_var(i), a2 * c * c);
        l.noalias() += w * prior.basis.row(i).transpose() * prior.basis.row(i);
    }
    return l;
}

}  // namespace

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& m, const Eigen::MatrixXd& rhs) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
    // factorization lost positive definiteness to rounding; floor the spectrum
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-12);
    return es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose() * rhs;
}

Eigen::VectorXd noise_covariance_diag(const SignalPrior& prior,
                                      const std::vector<int>& bits) {
    const int n = static_cast<int>(prior.basis.rows());
    if (static_cast<int>(bits.size()) != n) {
        throw std::invalid_argument("noise_covariance_diag: bits size mismatch");
    }
    Eigen::VectorXd diag(n);
    for (int i = 0; i < n; ++i) {
        diag(i) = bits[i] >= 1
                      ? prior.obs_noise_var(i) + quant_noise_variance(prior.amplitude, bits[i])
                      : std::numeric_limits<double>::infinity();
    }
    return diag;
}

Eigen::VectorXd lmmse_estimate(const SignalPrior& prior, const FusionInput& input) {
    const int n = static_cast<int>(prior.basis.rows());
    const int r = prior.subspace_dim;
    if (static_cast<int>(input.bits.size()) != n || input.messages.size() != n) {
        throw std::invalid_argument("lmmse_estimate: input size mismatch");
    }

    std::vector<int> active;
    active.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (input.bits[i] >= 1) active.push_back(i);
    }

    if (active.empty()) {
        if (prior.mean.isZero(0.0)) return Eigen::VectorXd::Zero(r);
        // prior-only fallback: the estimator applied to all-zero messages
        // with observation noise alone
        Eigen::MatrixXd ut_sinv_u = Eigen::MatrixXd::Zero(r, r);
        for (int i = 0; i < n; ++i) {
            const double s2 = prior.obs_noise_var(i);
            if (s2 <= 0.0) throw std::invalid_argument("lmmse_estimate: zero noise variance");
            ut_sinv_u.noalias() +=
                prior.basis.row(i).transpose() * prior.basis.row(i) / s2;
        }
        const Eigen::MatrixXd gain =
            spd_solve(prior.cov_inverse + ut_sinv_u, ut_sinv_u);
        return prior.mean - gain * prior.mean;
    }

    const auto k = static_cast<int>(active.size());
    Eigen::MatrixXd u_s(k, r);
    Eigen::VectorXd w(k);       // inverse noise variances
    Eigen::VectorXd resid(k);   // m - U mu on the active rows
    const Eigen::VectorXd field_mean = prior.basis * prior.mean;
    for (int j = 0; j < k; ++j) {
        const int i = active[j];
        u_s.row(j) = prior.basis.row(i);
        const double var =
            prior.obs_noise_var(i) + quant_noise_variance(prior.amplitude, input.bits[i]);
        w(j) = 1.0 / var;
        resid(j) = input.messages(i) - field_mean(i);
    }

    const Eigen::MatrixXd normal = prior.cov_inverse + u_s.transpose() * w.asDiagonal() * u_s;
    const Eigen::VectorXd rhs = u_s.transpose() * (w.asDiagonal() * resid);
    return prior.mean + spd_solve(normal, rhs);
}

double bmse(const BmseContext& ctx) {
    const int r = ctx.prior->subspace_dim;
    const Eigen::MatrixXd l = information_matrix(ctx);
    return spd_solve(l, Eigen::MatrixXd::Identity(r, r)).trace();
}

Eigen::VectorXd bmse_gradient(const BmseContext& ctx) {
    const SignalPrior& prior = *ctx.prior;
    const int n = static_cast<int>(prior.basis.rows());
    const double a2 = prior.amplitude * prior.amplitude;

    const Eigen::MatrixXd l = information_matrix(ctx);
    // solve once for L^{-1} U^T; component i is -h_i ||L^{-1} u_i||^2
    const Eigen::MatrixXd linv_ut = spd_solve(l, prior.basis.transpose());

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        const double e = ctx.energies(i);
        if (e <= 0.0) continue;
        const double c = ctx.cost_coeffs(i);
        const double a2c2 = a2 * c * c;
        const double denom = e * e * prior.obs_noise_var(i) + a2c2;
        const double h = 2.0 * e * a2c2 / (denom * denom);
        grad(i) = -h * linv_ut.col(i).squaredNorm();
    }
    return grad;
}

double bmse_gradient_bound(const SignalPrior& prior, int node, double e_max) {
    if (e_max <= 0.0) throw std::invalid_argument("bmse_gradient_bound: e_max must be positive");
    const double sigma2 = prior.obs_noise_var(node);
    if (sigma2 <= 0.0) {
        throw std::invalid_argument("bmse_gradient_bound: undefined for zero noise variance");
    }
    const Eigen::VectorXd u = prior.basis.row(node).transpose();
    const Eigen::MatrixXd m = prior.cov_inverse + (u * u.transpose()) / sigma2;
    const Eigen::VectorXd minv_u = spd_solve(m, u);
    return minv_u.squaredNorm() / (2.0 * e_max * sigma2);
}

}  // namespace ehsim
