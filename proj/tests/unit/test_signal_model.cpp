#include <doctest.h>

#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ehsim/signal_model.hpp"

using namespace ehsim;

TEST_CASE("two-node topology structure") {
    const NetworkTopology topo = build_topology(2, 50.0, 0.25, 5);
    CHECK(topo.adjacency(0, 0) == 0.0);
    CHECK(topo.adjacency(1, 1) == 0.0);
    CHECK(topo.adjacency(0, 1) > 0.0);
    CHECK(topo.adjacency(0, 1) == topo.adjacency(1, 0));
    CHECK(topo.laplacian.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("paper-sized topology invariants") {
    const NetworkTopology topo = build_topology(50, 100.0, 0.25, 123);
    CHECK(topo.positions.rowwise().norm().maxCoeff() <= 100.0);
    CHECK((topo.adjacency - topo.adjacency.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(topo.laplacian.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(topo.laplacian);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("topology is deterministic in the seed") {
    const NetworkTopology a = build_topology(12, 100.0, 0.25, 77);
    const NetworkTopology b = build_topology(12, 100.0, 0.25, 77);
    CHECK((a.positions - b.positions).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.adjacency - b.adjacency).cwiseAbs().maxCoeff() == 0.0);
    const NetworkTopology c = build_topology(12, 100.0, 0.25, 78);
    CHECK((a.positions - c.positions).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("topology argument validation") {
    CHECK_THROWS_AS(build_topology(1, 100.0, 0.25, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_topology(5, -1.0, 0.25, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_topology(5, 100.0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("subspace: constant vector spans the nullspace") {
    const NetworkTopology topo = build_topology(16, 100.0, 0.25, 9);
    const Eigen::MatrixXd u = build_subspace(topo, 1);
    const Eigen::VectorXd expected = Eigen::VectorXd::Constant(16, 1.0 / 4.0);
    CHECK((u.col(0) - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("subspace orthonormality at several sizes") {
    const NetworkTopology topo = build_topology(50, 100.0, 0.25, 21);
    for (int r : {1, 6, 50}) {
        const Eigen::MatrixXd u = build_subspace(topo, r);
        const Eigen::MatrixXd gram = u.transpose() * u;
        CHECK((gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK_THROWS_AS(build_subspace(topo, 51), std::invalid_argument);
}

TEST_CASE("subspace columns are sorted by eigenvalue") {
    const NetworkTopology topo = build_topology(20, 100.0, 0.25, 33);
    const Eigen::MatrixXd u = build_subspace(topo, 5);
    Eigen::VectorXd rayleigh(5);
    for (int k = 0; k < 5; ++k) {
        rayleigh(k) = u.col(k).dot(topo.laplacian * u.col(k));
    }
    for (int k = 1; k < 5; ++k) CHECK(rayleigh(k) >= rayleigh(k - 1) - 1e-10);
}

TEST_CASE("prior trace matches the configured worst-case error") {
    const NetworkTopology topo = build_topology(10, 100.0, 0.25, 4);
    const Eigen::MatrixXd u = build_subspace(topo, 3);
    const SignalPrior loose = make_signal_prior(u, -2.0, 1e-4, 1.0, 11);
    CHECK(loose.covariance.trace() == doctest::Approx(std::pow(10.0, -0.2)).epsilon(1e-12));
    const SignalPrior unit = make_signal_prior(u, 0.0, 1e-4, 1.0, 11);
    CHECK(unit.covariance.trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("prior covariance is symmetric positive definite") {
    const NetworkTopology topo = build_topology(10, 100.0, 0.25, 4);
    const Eigen::MatrixXd u = build_subspace(topo, 3);
    for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
        const SignalPrior prior = make_signal_prior(u, -2.0, 1e-4, 1.0, seed);
        CHECK((prior.covariance - prior.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prior.covariance);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        // inverse and Cholesky factors are consistent
        const Eigen::MatrixXd recon = prior.cov_cholesky * prior.cov_cholesky.transpose();
        CHECK((recon - prior.covariance).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::MatrixXd eye = prior.cov_inverse * prior.covariance;
        CHECK((eye - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("zero observation noise reproduces the field") {
    const NetworkTopology topo = build_topology(8, 100.0, 0.25, 6);
    const Eigen::MatrixXd u = build_subspace(topo, 2);
    const SignalPrior prior = make_signal_prior(u, -2.0, 0.0, 4.0, 3);
    Rng rng(5);
    const SlotSignal slot = sample_slot(prior, rng);
    CHECK((slot.observed - slot.field).cwiseAbs().maxCoeff() == 0.0);
    CHECK((slot.field - prior.basis * slot.latent).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("latent samples reproduce the prior covariance") {
    const NetworkTopology topo = build_topology(10, 100.0, 0.25, 8);
    const Eigen::MatrixXd u = build_subspace(topo, 3);
    const SignalPrior prior = make_signal_prior(u, -2.0, 1e-4, 1.0, 17);
    Rng rng(99);
    const int draws = 100000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < draws; ++i) {
        const SlotSignal slot = sample_slot(prior, rng);
        acc.noalias() += slot.latent * slot.latent.transpose();
    }
    acc /= draws;
    const double rel = (acc - prior.covariance).norm() / prior.covariance.norm();
    CHECK(rel < 0.05);
}

TEST_CASE("field covariance follows U C U^T") {
    // identity latent covariance: the field covariance is the basis Gram
    const NetworkTopology topo = build_topology(6, 100.0, 0.25, 10);
    const Eigen::MatrixXd u = build_subspace(topo, 2);
    SignalPrior prior = make_signal_prior(u, 0.0, 0.0, 10.0, 2);
    prior.covariance = Eigen::MatrixXd::Identity(2, 2);
    prior.cov_cholesky = Eigen::MatrixXd::Identity(2, 2);
    prior.cov_inverse = Eigen::MatrixXd::Identity(2, 2);
    Rng rng(31);
    const int draws = 100000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < draws; ++i) {
        const SlotSignal slot = sample_slot(prior, rng);
        acc.noalias() += slot.field * slot.field.transpose();
    }
    acc /= draws;
    const Eigen::MatrixXd expected = u * u.transpose();
    CHECK((acc - expected).norm() / expected.norm() < 0.05);
}

TEST_CASE("observations are clamped to the observable range") {
    const NetworkTopology topo = build_topology(8, 100.0, 0.25, 6);
    const Eigen::MatrixXd u = build_subspace(topo, 2);
    const SignalPrior prior = make_signal_prior(u, 3.0, 1.0, 0.5, 3);  // wide signal, tight range
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const SlotSignal slot = sample_slot(prior, rng);
        CHECK(slot.observed.cwiseAbs().maxCoeff() <= 0.5);
    }
}
