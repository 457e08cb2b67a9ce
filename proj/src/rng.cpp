// SPDX-License-Identifier: Apache-2.0

#include "sbprec/rng.hpp"

#include <cmath>
#include <numbers>

namespace sbp {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    return splitmix64(h ^ index);
}

RngStream::RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index)
    : engine_(stream_seed(seed, purpose, index))
{
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RngStream::gaussian()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::complex<double> RngStream::complex_gaussian(double variance)
{
    const double s = std::sqrt(variance / 2.0);
    const double re = gaussian();
    const double im = gaussian();
    return {s * re, s * im};
}

} // namespace sbp
