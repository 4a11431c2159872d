#include "ehsim/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ehsim {

namespace {

void check_args(double amplitude, int bits) {
    if (amplitude <= 0.0) throw std::invalid_argument("quantizer: amplitude must be positive");
    if (bits < 1) throw std::invalid_argument("quantizer: need at least one bit");
    if (bits > 52) throw std::invalid_argument("quantizer: bit count too large");
}

}  // namespace

double step_size(double amplitude, int bits) {
    check_args(amplitude, bits);
    const double levels = std::ldexp(1.0, bits);  // 2^bits
    return 2.0 * amplitude / (levels - 1.0);
}

QuantizedMessage quantize(double y, int bits, double amplitude, Rng& rng, int node_index) {
    check_args(amplitude, bits);
    if (std::abs(y) > amplitude * (1.0 + 1e-12)) {
        throw std::invalid_argument("quantize: observation outside [-A, A]");
    }
    y = std::clamp(y, -amplitude, amplitude);

    const double delta = step_size(amplitude, bits);
    const long top = (1L << bits) - 1;  // index of the last grid point
    double pos = (y + amplitude) / delta;
    long cell = static_cast<long>(std::floor(pos));
    if (cell > top - 1) cell = top - 1;
    if (cell < 0) cell = 0;

    double p_up = pos - static_cast<double>(cell);
    p_up = std::clamp(p_up, 0.0, 1.0);
    const bool up = std::bernoulli_distribution(p_up)(rng);

    const long level = cell + (up ? 1 : 0);
    QuantizedMessage msg;
    // the outermost levels are exactly the range endpoints
    msg.value = level == top ? amplitude
              : level == 0  ? -amplitude
                            : -amplitude + static_cast<double>(level) * delta;
    msg.bits = bits;
    msg.node_index = node_index;
    return msg;
}

double quant_noise_variance(double amplitude, int bits) {
    check_args(amplitude, bits);
    const double levels = std::ldexp(1.0, bits);
    const double d = levels - 1.0;
    return amplitude * amplitude / (d * d);
}

}  // namespace ehsim
