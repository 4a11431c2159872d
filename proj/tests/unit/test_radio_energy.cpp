#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "ehsim/errors.hpp"
#include "ehsim/radio_energy.hpp"
#include "ehsim/signal_model.hpp"

using namespace ehsim;

namespace {

RadioParams paper_radio() { return RadioParams{}; }

NetworkTopology test_topology() { return build_topology(10, 100.0, 0.25, 42); }

}  // namespace

TEST_CASE("path gain follows the inverse square law") {
    const NetworkTopology topo = test_topology();
    RadioParams params = paper_radio();
    params.rayleigh_fading = false;
    Rng rng(1);
    const Eigen::Vector2d fc(0.0, 0.0);
    const ChannelDraw draw = sample_channel(topo, params, fc, rng);
    for (int i = 0; i < topo.node_count; ++i) {
        const double d = std::max(1.0, topo.positions.row(i).norm());
        for (int j = 0; j < topo.node_count; ++j) {
            const double dj = std::max(1.0, topo.positions.row(j).norm());
            // gain ratio is the inverse square of the distance ratio
            CHECK(draw.gain2(i) / draw.gain2(j) ==
                  doctest::Approx((dj * dj) / (d * d)).epsilon(1e-9));
        }
    }
    // cost coefficients match the stated constant
    const double k = 2.0 * params.noise_figure * params.noise_psd * params.system_const *
                     params.slot_s * std::log(2.0 / params.ber);
    for (int i = 0; i < topo.node_count; ++i) {
        CHECK(draw.cost(i) == doctest::Approx(k / draw.gain2(i)).epsilon(1e-12));
    }
}

TEST_CASE("fading is unit mean") {
    const NetworkTopology topo = test_topology();
    const RadioParams params = paper_radio();
    Rng rng(2);
    RadioParams no_fading = params;
    no_fading.rayleigh_fading = false;
    Rng rng0(7);
    const ChannelDraw base = sample_channel(topo, no_fading, {0.0, 0.0}, rng0);
    double acc = 0.0;
    const int draws = 10000;  // x10 nodes
    for (int rep = 0; rep < draws; ++rep) {
        const ChannelDraw d = sample_channel(topo, params, {0.0, 0.0}, rng);
        acc += (d.gain2.array() / base.gain2.array()).mean();
    }
    CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("channel draws are deterministic in the seed") {
    const NetworkTopology topo = test_topology();
    const RadioParams params = paper_radio();
    Rng a(5), b(5);
    const ChannelDraw da = sample_channel(topo, params, {0.0, 0.0}, a);
    const ChannelDraw db = sample_channel(topo, params, {0.0, 0.0}, b);
    CHECK((da.gain2 - db.gain2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((da.cost - db.cost).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("energy-bits conversions") {
    CHECK(energy_for_bits(0, 0.3) == 0.0);
    CHECK(energy_for_bits(1, 0.3) == doctest::Approx(0.3));
    CHECK(energy_for_bits(4, 0.3) == doctest::Approx(4.5));

    CHECK(bits_for_energy(15.0 * 0.3, 0.3, 4) == 4);
    CHECK(bits_for_energy(14.9 * 0.3, 0.3, 4) == 3);
    CHECK(bits_for_energy(0.29, 0.3, 4) == 0);
    CHECK(bits_for_energy(1e9, 0.3, 4) == 4);  // cap
    CHECK(bits_for_energy(0.0, 0.3, 4) == 0);
}

TEST_CASE("bits round-trip is a contraction") {
    Rng rng(3);
    std::uniform_real_distribution<double> ue(0.0, 20.0);
    std::uniform_real_distribution<double> uc(1e-3, 2.0);
    for (int rep = 0; rep < 20000; ++rep) {
        const double e = ue(rng);
        const double c = uc(rng);
        const int b = bits_for_energy(e, c, 8);
        CHECK(energy_for_bits(b, c) <= e * (1.0 + 1e-12));
    }
}

TEST_CASE("transmit caps from the closed-form channel quantile") {
    const NetworkTopology topo = test_topology();
    const RadioParams params = paper_radio();
    // closed-form fifth percentile of a unit-mean exponential
    CHECK(-std::log1p(-0.05) == doctest::Approx(0.051293).epsilon(1e-4));

    const Eigen::VectorXd analytic =
        calibrate_e_max(params, topo, {0.0, 0.0}, 0.05, 0, 1);
    const Eigen::VectorXd mc = calibrate_e_max(params, topo, {0.0, 0.0}, 0.05, 200000, 9);
    for (int i = 0; i < topo.node_count; ++i) {
        CHECK(mc(i) == doctest::Approx(analytic(i)).epsilon(0.05));
    }

    // without fading, the cap is the full-bit energy on the mean channel
    RadioParams no_fading = params;
    no_fading.rayleigh_fading = false;
    Rng rng(4);
    const ChannelDraw mean_channel = sample_channel(topo, no_fading, {0.0, 0.0}, rng);
    const Eigen::VectorXd cap = calibrate_e_max(no_fading, topo, {0.0, 0.0}, 0.05, 0, 1);
    for (int i = 0; i < topo.node_count; ++i) {
        CHECK(cap(i) == doctest::Approx(15.0 * mean_channel.cost(i)).epsilon(1e-12));
    }

    // nodes with stronger channels need smaller caps
    for (int i = 0; i < topo.node_count; ++i) {
        for (int j = 0; j < topo.node_count; ++j) {
            if (mean_channel.gain2(i) > mean_channel.gain2(j)) {
                CHECK(analytic(i) < analytic(j));
            }
        }
    }
    CHECK_THROWS_AS(calibrate_e_max(params, topo, {0.0, 0.0}, 0.05, 100, 1),
                    std::invalid_argument);
}

TEST_CASE("arrival processes") {
    Rng rng(8);
    const ArrivalProcess zero{ArrivalProcess::Kind::uniform, 0.0, 1.0};
    CHECK(sample_arrivals(zero, 0, 1e-3, 5, rng).cwiseAbs().maxCoeff() == 0.0);

    const ArrivalProcess uni{ArrivalProcess::Kind::uniform, 2.0, 1.0};
    double acc = 0.0;
    const int draws = 100000;
    for (int rep = 0; rep < draws; ++rep) {
        const Eigen::VectorXd r = sample_arrivals(uni, rep, 1e-3, 1, rng);
        CHECK(r(0) >= 0.0);
        CHECK(r(0) <= 2.0);
        acc += r(0);
    }
    CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.01));

    const ArrivalProcess onoff{ArrivalProcess::Kind::on_off, 1.0, 1.0};
    for (long t : {0L, 250L, 499L, 1000L, 1499L}) {
        CHECK(sample_arrivals(onoff, t, 1e-3, 3, rng).sum() > 0.0);
    }
    for (long t : {500L, 750L, 999L, 1500L, 1999L}) {
        CHECK(sample_arrivals(onoff, t, 1e-3, 3, rng).sum() == 0.0);
    }
}

TEST_CASE("battery update arithmetic") {
    const NodeEnergyState s{5.0, 3.0, 0.1, 1.0};
    CHECK(battery_step(s, 1.0, 0.5).battery == doctest::Approx(4.4));
    CHECK(battery_step(s, 0.0, 0.0).battery == doctest::Approx(4.9));  // idle decay
    // spending everything above the overhead empties the battery
    const NodeEnergyState full{5.0, 3.0, 0.1, 10.0};
    CHECK(battery_step(full, 4.9, 0.0).battery == doctest::Approx(0.0));
    CHECK_THROWS_AS(battery_step(s, 4.95, 0.0), contract_violation);
    CHECK_THROWS_AS(battery_step(s, -0.1, 0.0), std::invalid_argument);
}

TEST_CASE("starved idle node stops at an empty battery") {
    NodeEnergyState s{0.25, 1.0, 0.1, 1.0};
    for (int t = 0; t < 10; ++t) {
        s = battery_step(s, 0.0, 0.0);
        CHECK(s.battery >= 0.0);
    }
    CHECK(s.battery == 0.0);
}
