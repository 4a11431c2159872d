#ifndef EHSIM_RNG_HPP
#define EHSIM_RNG_HPP

#include <cstdint>
#include <random>

namespace ehsim {

// SplitMix64 finalizer; used to derive independent seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic sub-seed for a named stream (topology, prior, trial k, ...).
// Adding trials to a run never changes the seeds of earlier trials.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream));
}

// Stream tags for derive_seed.
namespace seed_stream {
constexpr std::uint64_t topology = 0x10;
constexpr std::uint64_t prior = 0x20;
constexpr std::uint64_t calibration = 0x30;
constexpr std::uint64_t trial_base = 0x1000;
}  // namespace seed_stream

using Rng = std::mt19937_64;

}  // namespace ehsim

#endif
