// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/rng.hpp"

#include <cmath>

namespace ma_isac {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_)
        s = splitmix64(sm);
}

Rng Rng::from_stream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t substream) {
    std::uint64_t sm = master_seed;
    std::uint64_t a = splitmix64(sm);
    sm ^= stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    std::uint64_t b = splitmix64(sm);
    sm ^= substream * 0xda942042e4dd58b5ULL + 0x9e3779b97f4a7c15ULL;
    std::uint64_t c = splitmix64(sm);
    return Rng(a ^ rotl(b, 17) ^ rotl(c, 43));
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
        u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(phi);
    has_cached_ = true;
    return r * std::cos(phi);
}

std::complex<double> Rng::cnormal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

} // namespace ma_isac
