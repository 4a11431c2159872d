#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "ehsim/quantizer.hpp"

using namespace ehsim;

TEST_CASE("step size formula") {
    CHECK(step_size(1.0, 1) == doctest::Approx(2.0));
    CHECK(step_size(1.0, 2) == doctest::Approx(2.0 / 3.0));
    CHECK(step_size(1.0, 4) == doctest::Approx(2.0 / 15.0));
    CHECK(step_size(2.5, 3) == doctest::Approx(5.0 / 7.0));
    CHECK_THROWS_AS(step_size(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(step_size(-1.0, 2), std::invalid_argument);
}

TEST_CASE("grid points quantize to themselves") {
    Rng rng(42);
    const double a = 1.0;
    for (int b : {1, 2, 4}) {
        const double delta = step_size(a, b);
        const long top = (1L << b) - 1;
        for (long k = 0; k <= top; ++k) {
            const double y = -a + static_cast<double>(k) * delta;
            for (int rep = 0; rep < 50; ++rep) {
                const QuantizedMessage m = quantize(y, b, a, rng);
                CHECK(m.value == doctest::Approx(y).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("range endpoints are exact") {
    Rng rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        CHECK(quantize(1.0, 4, 1.0, rng).value == 1.0);
        CHECK(quantize(-1.0, 4, 1.0, rng).value == -1.0);
    }
}

TEST_CASE("unbiasedness at y = 0.3, two bits") {
    Rng rng(2024);
    const int draws = 1000000;
    const double y = 0.3, a = 1.0;
    const int b = 2;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += quantize(y, b, a, rng).value;
    const double mean = sum / draws;
    const double tol = 3.0 * (step_size(a, b) / 2.0) / 1e3;
    CHECK(std::abs(mean - y) < tol);
}

TEST_CASE("messages stay on the grid and within one step of the input") {
    Rng rng(7);
    std::uniform_real_distribution<double> uy(-1.0, 1.0);
    const double a = 1.0;
    for (int rep = 0; rep < 20000; ++rep) {
        const int b = 1 + static_cast<int>(rng() % 6);
        const double y = uy(rng);
        const QuantizedMessage m = quantize(y, b, a, rng);
        const double delta = step_size(a, b);
        CHECK(std::abs(m.value - y) <= delta * (1.0 + 1e-12));
        const double idx = (m.value + a) / delta;
        CHECK(std::abs(idx - std::round(idx)) < 1e-9);
        CHECK(m.value <= a);
        CHECK(m.value >= -a);
    }
}

TEST_CASE("out-of-range observations are rejected") {
    Rng rng(3);
    CHECK_THROWS_AS(quantize(1.5, 2, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(quantize(-1.0001, 2, 1.0, rng), std::invalid_argument);
}

TEST_CASE("noise variance model") {
    CHECK(quant_noise_variance(1.0, 2) == doctest::Approx(1.0 / 9.0));
    CHECK(quant_noise_variance(3.0, 1) == doctest::Approx(9.0));
    double prev = quant_noise_variance(1.0, 1);
    for (int b = 2; b <= 16; ++b) {
        const double v = quant_noise_variance(1.0, b);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(quant_noise_variance(1.0, 16) < 1e-8);
    CHECK_THROWS_AS(quant_noise_variance(1.0, 0), std::invalid_argument);
}

TEST_CASE("realized error variance stays below the model variance") {
    // the model is the worst case over cell positions; uniformly distributed
    // inputs realize about two thirds of it
    Rng rng(11);
    std::uniform_real_distribution<double> uy(-1.0, 1.0);
    const double a = 1.0;
    for (int b : {2, 4}) {
        double sq = 0.0;
        const int draws = 200000;
        for (int i = 0; i < draws; ++i) {
            const double y = uy(rng);
            const double err = quantize(y, b, a, rng).value - y;
            sq += err * err;
        }
        const double empirical = sq / draws;
        const double model = quant_noise_variance(a, b);
        CHECK(empirical <= model * (1.0 + 0.02));
    }
}
