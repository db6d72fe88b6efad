#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace masr {

// Deterministic random stream. Uniform and normal variates are derived from
// raw 64-bit output with fixed arithmetic (not the standard-library
// distributions, whose output is implementation-defined), so a given seed
// reproduces the same sequence on every platform. Substreams are derived from
// the seed value, independent of how much of the parent stream was consumed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [a, b).
    double uniform(double a, double b);
    /// Standard normal via Box-Muller (two uniforms per draw).
    double normal();
    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> cnormal(double variance);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    std::uint64_t seed() const { return seed_; }

    /// Independent stream identified by (seed, index).
    Rng substream(std::uint64_t index) const;

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

/// SplitMix64 finalizer; used to decorrelate seed/index pairs.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

}  // namespace masr
