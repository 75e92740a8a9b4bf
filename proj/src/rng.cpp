// SPDX-License-Identifier: Apache-2.0
//
// beamsim: digital multi-beam mm-wave array simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.
//
// Unless required by applicable law or agreed to in writing, software distributed
// under the License is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR
// CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.
// -------------------------------------------------------------------------------

#include "beamsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace beamsim {

namespace {

std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t Rng::word_at(std::uint64_t index) const {
    return splitmix64_finalize(seed_ + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

double Rng::uniform_at(std::uint64_t index) const {
    return static_cast<double>(word_at(index) >> 11) * 0x1.0p-53;
}

double Rng::gaussian_at(std::uint64_t index) const {
    // Box-Muller; u1 is kept away from zero so the log stays finite.
    double u1 = uniform_at(2 * index);
    double u2 = uniform_at(2 * index + 1);
    if (u1 < 0x1.0p-53)
        u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> Rng::complex_gaussian_at(std::uint64_t index) const {
    double u1 = uniform_at(2 * index);
    double u2 = uniform_at(2 * index + 1);
    if (u1 < 0x1.0p-53)
        u1 = 0x1.0p-53;
    // Both Box-Muller branches are used, so one complex draw costs two words
    // and the result has unit total variance (1/2 per component).
    const double r = std::sqrt(-std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

double Rng::laplacian_at(std::uint64_t index, double stddev) const {
    // Inverse CDF of the Laplace distribution; variance 2b^2 = stddev^2.
    const double b = stddev / std::numbers::sqrt2;
    const double u = uniform_at(index) - 0.5;
    const double mag = std::abs(u);
    const double clamped = mag >= 0.5 ? 0.5 - 0x1.0p-54 : mag;
    return -b * std::copysign(std::log1p(-2.0 * clamped), u);
}

Rng Rng::substream(std::uint64_t stream_id) const {
    return Rng(splitmix64_finalize(seed_ ^ (0xA5A5A5A55A5A5A5AULL + stream_id)));
}

} // namespace beamsim
