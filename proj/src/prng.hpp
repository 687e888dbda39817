// SPDX-License-Identifier: Apache-2.0
//
// beamrate - downlink multiuser beamforming evaluation for Massive MIMO-OFDM
// Copyright (C) 2026 beamrate developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BEAMRATE_PRNG_HPP
#define BEAMRATE_PRNG_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace beamrate
{

// Counter-based generator Philox4x32-10 (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11).
//
// Stream discipline: the 64-bit key is the scenario seed; the 128-bit
// counter is split into a 64-bit substream id (words 0..1) and a 64-bit
// sample index (words 2..3). Substreams never overlap, so fixtures drawn
// from distinct (substream, index) pairs are reproducible in any language
// with a Philox implementation and independent of evaluation order.
inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t substream,
                                               std::uint64_t index)
{
    constexpr std::uint32_t mul0 = 0xD2511F53u, mul1 = 0xCD9E8D57u;
    constexpr std::uint32_t weyl0 = 0x9E3779B9u, weyl1 = 0xBB67AE85u;

    std::uint32_t x0 = std::uint32_t(substream), x1 = std::uint32_t(substream >> 32);
    std::uint32_t x2 = std::uint32_t(index), x3 = std::uint32_t(index >> 32);
    std::uint32_t k0 = std::uint32_t(seed), k1 = std::uint32_t(seed >> 32);

    for (int r = 0; r < 10; ++r)
    {
        std::uint64_t p0 = std::uint64_t(mul0) * x0;
        std::uint64_t p1 = std::uint64_t(mul1) * x2;
        std::uint32_t y0 = std::uint32_t(p1 >> 32) ^ x1 ^ k0;
        std::uint32_t y1 = std::uint32_t(p1);
        std::uint32_t y2 = std::uint32_t(p0 >> 32) ^ x3 ^ k1;
        std::uint32_t y3 = std::uint32_t(p0);
        x0 = y0, x1 = y1, x2 = y2, x3 = y3;
        k0 += weyl0, k1 += weyl1;
    }
    return {x0, x1, x2, x3};
}

// One substream of a keyed Philox generator. Successive draws advance the
// sample index; each 128-bit block yields two 53-bit uniforms or one
// standard circular complex Gaussian via Box-Muller.
class substream
{
  public:
    substream(std::uint64_t seed, std::uint64_t id) : seed_(seed), id_(id) {}

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform()
    {
        auto w = philox4x32(seed_, id_, index_++);
        return to_unit(w[0], w[1]);
    }

    // CN(0,1): circularly symmetric complex Gaussian with E|z|^2 = 1.
    std::complex<double> gaussian()
    {
        auto w = philox4x32(seed_, id_, index_++);
        double u1 = 1.0 - to_unit(w[0], w[1]); // (0, 1], keeps the log finite
        double u2 = to_unit(w[2], w[3]);
        double r = std::sqrt(-std::log(u1)); // Box-Muller radius over sqrt(2)
        double phi = 2.0 * 3.14159265358979323846 * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

  private:
    static double to_unit(std::uint32_t hi, std::uint32_t lo)
    {
        std::uint64_t v = (std::uint64_t(hi) << 32) | lo;
        return double(v >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed_;
    std::uint64_t id_;
    std::uint64_t index_ = 0;
};

} // namespace beamrate

#endif
