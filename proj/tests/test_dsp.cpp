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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "beamsim/dsp.hpp"
#include "beamsim/rng.hpp"

using namespace beamsim;
using cd = std::complex<double>;

TEST_CASE("next power of two") {
    CHECK(next_pow2(1) == 1);
    CHECK(next_pow2(2) == 2);
    CHECK(next_pow2(3) == 4);
    CHECK(next_pow2(1023) == 1024);
    CHECK(next_pow2(1024) == 1024);
}

TEST_CASE("four-point transform matches the hand computation") {
    std::vector<cd> x = {{1, 0}, {2, -1}, {0, -1}, {-1, 2}};
    fft_inplace(x, false);
    const cd want[] = {{2, 0}, {-2, -2}, {0, -2}, {4, 4}};
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(std::abs(x[k] - want[k]) < 1e-12);
}

TEST_CASE("transform matches the direct DFT on random data") {
    const Rng rng(3);
    const std::size_t n = 64;
    std::vector<cd> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = rng.complex_gaussian_at(i);
    std::vector<cd> got = x;
    fft_inplace(got, false);
    for (std::size_t k = 0; k < n; ++k) {
        cd acc = 0.0;
        for (std::size_t t = 0; t < n; ++t)
            acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi *
                                              static_cast<double>(k * t) / n);
        CHECK(std::abs(got[k] - acc) < 1e-9);
    }
}

TEST_CASE("inverse transform restores the input") {
    const Rng rng(4);
    std::vector<cd> x(256);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = rng.complex_gaussian_at(i);
    std::vector<cd> y = x;
    fft_inplace(y, false);
    fft_inplace(y, true);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(y[i] - x[i]) < 1e-12);
}

TEST_CASE("non-power-of-two lengths are rejected; padding fixes them") {
    std::vector<cd> x(12, cd{1.0, 0.0});
    CHECK_THROWS_AS(fft_inplace(x, false), std::invalid_argument);
    const std::vector<cd> padded = fft_padded(x, 1);
    CHECK(padded.size() == 16);
}

TEST_CASE("convolution against a hand-worked example") {
    const std::vector<cd> a = {{1, 0}, {2, 0}, {3, 0}};
    const std::vector<cd> b = {{1, 0}, {-1, 0}};
    const std::vector<cd> c = convolve(a, b);
    REQUIRE(c.size() == 4);
    const double want[] = {1.0, 1.0, 1.0, -3.0};
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(c[i] - cd{want[i], 0.0}) < 1e-12);
}

TEST_CASE("tone projection is exact on a bin-centered tone") {
    const std::size_t n = 64;
    const double fs = 1000.0;
    const double f = fs / 8.0;
    const cd amp = std::polar(0.7, 0.3);
    std::vector<cd> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = amp * std::polar(1.0, 2.0 * std::numbers::pi * f * static_cast<double>(t) / fs);
    CHECK(std::abs(tone_amplitude(x, f, fs) - amp) < 1e-12);
    // A disjoint bin sees nothing.
    CHECK(std::abs(tone_amplitude(x, fs / 4.0, fs)) < 1e-12);
}

TEST_CASE("root-raised-cosine taps") {
    const double rolloff = 0.25;
    const std::size_t span = 8, sps = 16;
    const std::vector<double> taps = rrc_taps(rolloff, span, sps);
    REQUIRE(taps.size() == span * sps + 1);

    double energy = 0.0;
    for (double v : taps)
        energy += v * v;
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));

    for (std::size_t i = 0; i < taps.size(); ++i)
        CHECK(taps[i] == doctest::Approx(taps[taps.size() - 1 - i]).epsilon(1e-12));

    // Center tap and the |t| = 1/(4 rolloff) = 1 symbol special case.
    CHECK(taps[64] == doctest::Approx(0.26714634733324655).epsilon(1e-12));
    CHECK(taps[64 + 16] == doctest::Approx(-0.016063430424858593).epsilon(1e-9));

    CHECK_THROWS_AS(rrc_taps(-0.1, 8, 16), std::invalid_argument);
    CHECK_THROWS_AS(rrc_taps(1.5, 8, 16), std::invalid_argument);
    CHECK_THROWS_AS(rrc_taps(0.25, 0, 16), std::invalid_argument);
}

TEST_CASE("matched raised-cosine cascade is Nyquist") {
    // RRC convolved with itself must vanish at nonzero symbol multiples,
    // up to the ~7e-4 sidelobes an 8-symbol truncation leaves behind.
    const std::size_t sps = 16;
    const std::vector<double> taps = rrc_taps(0.25, 8, sps);
    std::vector<cd> h(taps.size());
    for (std::size_t i = 0; i < taps.size(); ++i)
        h[i] = taps[i];
    const std::vector<cd> rc = convolve(h, h);
    const std::size_t center = taps.size() - 1;
    const double peak = std::abs(rc[center]);
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-6));
    for (int k = 1; k <= 3; ++k) {
        CHECK(std::abs(rc[center + static_cast<std::size_t>(k) * sps]) < 1e-3);
        CHECK(std::abs(rc[center - static_cast<std::size_t>(k) * sps]) < 1e-3);
    }
}
