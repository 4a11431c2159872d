#ifndef EHSIM_QUANTIZER_HPP
#define EHSIM_QUANTIZER_HPP

#include "ehsim/rng.hpp"

namespace ehsim {

// A probabilistically rounded observation. value lies on the 2^bits-point
// grid {-A + k*step : k = 0 .. 2^bits - 1} spanning [-A, A].
struct QuantizedMessage {
    double value = 0.0;
    int bits = 0;
    int node_index = -1;
};

// Grid spacing 2A / (2^bits - 1). bits must be >= 1.
double step_size(double amplitude, int bits);

// Rounds y to one of the two neighboring grid points, choosing the upper one
// with probability proportional to the offset, so the result is unbiased:
// E{value} = y. Requires y in [-amplitude, amplitude].
QuantizedMessage quantize(double y, int bits, double amplitude, Rng& rng,
                          int node_index = -1);

// Variance A^2 / (2^bits - 1)^2 of the quantization noise model; this is the
// worst case of the realized per-sample variance and is what the fusion
// center assumes when weighting messages.
double quant_noise_variance(double amplitude, int bits);

}  // namespace ehsim

#endif
