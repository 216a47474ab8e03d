#pragma once

// Seeded random source used by every randomized routine.
//
// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. The derived distributions are implemented here rather than with
// <random> distributions, whose algorithms are implementation-defined:
//   uniform()       : (u >> 11) * 2^-53, in [0, 1)
//   uniform_index(n): rejection sampling on the top of the 64-bit range
//   normal()        : Marsaglia polar method, second variate cached
// so a given seed produces the same stream on every platform.

#include <cstddef>
#include <cstdint>
#include <random>

namespace grabp {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform on {0, ..., n-1}; n > 0.
    std::size_t uniform_index(std::size_t n);

    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Independent seed for sub-stream `stream` of a base seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace grabp
