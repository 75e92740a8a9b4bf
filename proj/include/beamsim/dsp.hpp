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
#include <cstddef>
#include <vector>

namespace beamsim {

/// Smallest power of two >= n (n = 0 gives 1).
std::size_t next_pow2(std::size_t n);

/// In-place radix-2 FFT; length must be a power of two.
/// inverse = true applies the conjugate transform and the 1/N scale.
void fft_inplace(std::vector<std::complex<double>>& x, bool inverse);

/// Forward FFT of x zero-padded to the next power of two (at least min_size).
std::vector<std::complex<double>> fft_padded(const std::vector<std::complex<double>>& x,
                                             std::size_t min_size = 0);

/// Full linear convolution, output length a.size() + b.size() - 1.
std::vector<std::complex<double>> convolve(const std::vector<std::complex<double>>& a,
                                           const std::vector<std::complex<double>>& b);

/// Complex amplitude of the tone at freq_hz: (1/T) sum_t x[t] exp(-j 2 pi f t / fs).
/// Exact for tones centered on a length-T DFT bin, rectangular window otherwise.
std::complex<double> tone_amplitude(const std::vector<std::complex<double>>& x, double freq_hz,
                                    double sample_rate_hz);

/*!\brief Root-raised-cosine filter taps.
 *
 * span_symbols symbols on each side half, samples_per_symbol samples per
 * symbol, so the tap count is span_symbols * samples_per_symbol + 1. Taps are
 * scaled to unit energy, which makes the matched-filter cascade hit unit gain
 * at the symbol instants.
 */
std::vector<double> rrc_taps(double rolloff, std::size_t span_symbols,
                             std::size_t samples_per_symbol);

} // namespace beamsim
