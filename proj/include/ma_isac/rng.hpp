// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include <complex>
#include <cstdint>

namespace ma_isac {

// Counter-splittable PRNG. Streams are derived from (master_seed, stream, substream)
// through splitmix64, so every (realization, purpose) pair gets an independent
// sequence regardless of scheduling order. Core generator is xoshiro256++.
// Uniform/normal transforms are implemented here so sequences do not depend on
// the standard library's distribution internals.
class Rng {
  public:
    Rng() : Rng(0x9e3779b97f4a7c15ULL) {}

    explicit Rng(std::uint64_t seed);

    static Rng from_stream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t substream = 0);

    std::uint64_t next_u64();

    // uniform in [0, 1)
    double uniform();

    double uniform(double lo, double hi);

    // standard normal via Box-Muller (cached pair)
    double normal();

    // circularly-symmetric complex Gaussian CN(0, variance)
    std::complex<double> cnormal(double variance);

  private:
    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

// splitmix64 mixing step, exposed for stream-key derivation
std::uint64_t splitmix64(std::uint64_t& state);

} // namespace ma_isac
