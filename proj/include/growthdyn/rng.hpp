#ifndef GROWTHDYN_RNG_HPP_
#define GROWTHDYN_RNG_HPP_

#include <cstdint>
#include <random>

namespace growthdyn {

// Deterministic random source. All variate transformations are implemented
// here rather than with std::*_distribution so that a given seed produces
// the same stream on every standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Index in [0, n). The modulo bias is below 1e-13 for any n that fits
    // a resampling loop.
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % n);
    }

    // Standard normal via Box-Muller.
    double normal();

    double exponential();

    // Laplace with mean zero and the given scale (mean absolute deviation).
    double laplace(double scale);

    // Gamma with the given shape and unit scale (Marsaglia-Tsang squeeze,
    // with the power boost for shape < 1).
    double gamma(double shape);

private:
    std::mt19937_64 engine_;
};

// Mixes a master seed with a stream index into an independent child seed
// (SplitMix64 finalizer). Used to make bootstrap replicates and windows
// schedule-independent.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace growthdyn

#endif  // GROWTHDYN_RNG_HPP_
