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

#pragma once

#include <complex>
#include <cstdint>

namespace beamsim {

/*!\brief Counter-based deterministic random source.
 *
 * Every draw is a pure function of (seed, index), so independent streams can
 * be carved out of one seed without sharing mutable state and artifacts stay
 * bit-identical across platforms. The word generator is the splitmix64
 * finalizer applied to seed + (index + 1) * golden-gamma.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    /// Raw 64-bit word at the given counter index.
    std::uint64_t word_at(std::uint64_t index) const;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform_at(std::uint64_t index) const;

    /// Standard normal deviate; consumes indices 2*index and 2*index + 1.
    double gaussian_at(std::uint64_t index) const;

    /// Unit-variance circular complex Gaussian; consumes indices 2*index and 2*index + 1.
    std::complex<double> complex_gaussian_at(std::uint64_t index) const;

    /// Zero-mean Laplacian deviate with the given standard deviation.
    double laplacian_at(std::uint64_t index, double stddev) const;

    /// Derive a named substream seed (hash of the parent seed and a stream id).
    Rng substream(std::uint64_t stream_id) const;

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
};

} // namespace beamsim
