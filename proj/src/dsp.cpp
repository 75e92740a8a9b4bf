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

#include "beamsim/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beamsim {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

void fft_inplace(std::vector<std::complex<double>>& x, bool inverse) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_inplace: length must be a power of two");

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(x[i], x[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w = 1.0;
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = x[i + k];
                const std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : x)
            v *= scale;
    }
}

std::vector<std::complex<double>> fft_padded(const std::vector<std::complex<double>>& x,
                                             std::size_t min_size) {
    std::vector<std::complex<double>> out = x;
    out.resize(next_pow2(std::max(x.size(), min_size)), 0.0);
    fft_inplace(out, false);
    return out;
}

std::vector<std::complex<double>> convolve(const std::vector<std::complex<double>>& a,
                                           const std::vector<std::complex<double>>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("convolve: inputs must be non-empty");
    std::vector<std::complex<double>> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::complex<double> ai = a[i];
        for (std::size_t k = 0; k < b.size(); ++k)
            out[i + k] += ai * b[k];
    }
    return out;
}

std::complex<double> tone_amplitude(const std::vector<std::complex<double>>& x, double freq_hz,
                                    double sample_rate_hz) {
    if (x.empty())
        throw std::invalid_argument("tone_amplitude: empty input");
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("tone_amplitude: sample rate must be positive");
    const double w = -2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t)
        acc += x[t] * std::polar(1.0, w * static_cast<double>(t));
    return acc / static_cast<double>(x.size());
}

std::vector<double> rrc_taps(double rolloff, std::size_t span_symbols,
                             std::size_t samples_per_symbol) {
    if (!(rolloff >= 0.0) || rolloff > 1.0)
        throw std::invalid_argument("rrc_taps: rolloff must be in [0, 1]");
    if (span_symbols < 1 || samples_per_symbol < 1)
        throw std::invalid_argument("rrc_taps: span and oversampling must be >= 1");

    const std::size_t ntaps = span_symbols * samples_per_symbol + 1;
    const double half = 0.5 * static_cast<double>(span_symbols);
    std::vector<double> h(ntaps);
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < ntaps; ++i) {
        // t in symbol periods, symmetric around zero.
        const double t = static_cast<double>(i) / static_cast<double>(samples_per_symbol) - half;
        double v;
        if (std::abs(t) < 1e-12) {
            v = 1.0 - rolloff + 4.0 * rolloff / pi;
        } else if (rolloff > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * rolloff)) < 1e-12) {
            const double a = pi / (4.0 * rolloff);
            v = rolloff / std::numbers::sqrt2 *
                ((1.0 + 2.0 / pi) * std::sin(a) + (1.0 - 2.0 / pi) * std::cos(a));
        } else {
            const double num =
                std::sin(pi * t * (1.0 - rolloff)) + 4.0 * rolloff * t * std::cos(pi * t * (1.0 + rolloff));
            const double den = pi * t * (1.0 - 16.0 * rolloff * rolloff * t * t);
            v = num / den;
        }
        h[i] = v;
    }

    double energy = 0.0;
    for (double v : h)
        energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : h)
        v *= scale;
    return h;
}

} // namespace beamsim
