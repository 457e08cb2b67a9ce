// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace sbp {

/// Independent sub-stream purposes. Each (seed, purpose, index) triple maps to
/// its own generator state, so trials can be drawn in any order or in parallel.
enum class StreamPurpose : std::uint64_t {
    Channel = 1,
    TbDecision = 2,
    TestData = 3,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index);

/// mt19937_64 seeded from stream_seed(). Uniform and Gaussian draws are built
/// from raw 64-bit outputs so the sequence does not depend on the standard
/// library's distribution implementations.
class RngStream {
public:
    RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double gaussian();
    /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_gaussian(double variance);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace sbp
