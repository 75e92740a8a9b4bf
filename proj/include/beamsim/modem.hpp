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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamsim/angle.hpp"
#include "beamsim/array.hpp"
#include "beamsim/beamforming.hpp"

namespace beamsim {

/// Fixed pulse-shaping parameters shared by modulator and matched filter.
inline constexpr double kRolloff = 0.25;
inline constexpr std::size_t kRrcSpanSymbols = 8;

/// Normalized preamble correlation needed to declare a cell locked.
inline constexpr double kLockThreshold = 0.6;

/*!\brief Frequency slots carrying the independent streams.
 *
 * offsets_hz are complex-baseband subchannel centers. sample_rate must be an
 * integer multiple of symbol_rate, cover the widest offset plus one symbol
 * bandwidth twice over, and offsets must be spaced by more than
 * symbol_rate * (1 + rolloff).
 */
struct SubchannelPlan {
    std::vector<double> offsets_hz;
    double symbol_rate_hz = 0.0;
    double sample_rate_hz = 0.0;
};

/// One transmit stream: beam direction, frequency slot, payload, preamble.
struct TxStreamSpec {
    Angle direction;
    std::size_t subchannel_index = 0;
    std::vector<std::uint8_t> bits;
    std::vector<std::uint8_t> preamble;
};

struct DecodeCell {
    double rx_beam_deg = 0.0;
    double tx_stream_deg = 0.0;
    double subchannel_hz = 0.0;
    double evm_percent = 0.0;
    double ber = 0.0;
    bool locked = false;
    std::vector<std::complex<double>> constellation;
};

/// B x S cells, row-major: cell(b, s) = cells[b * streams + s].
struct DecodeGridResult {
    std::size_t beams = 0;
    std::size_t streams = 0;
    std::vector<DecodeCell> cells;

    const DecodeCell& cell(std::size_t b, std::size_t s) const { return cells[b * streams + s]; }
};

enum class SyncMode { analog, digital };

/// Synchronization cost: n^2 sequential captures for analog beams, one shared
/// capture for a digital bank.
struct SyncBudget {
    SyncMode mode = SyncMode::digital;
    std::size_t n_directions = 1;
    std::size_t trials = 1;
};

void validate(const SubchannelPlan& plan);

/// Gray QPSK: 00 -> (1+j)/sqrt2, 01 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2,
/// 10 -> (1-j)/sqrt2. Bits are 0/1 values, two per symbol, even count.
std::vector<std::complex<double>> qpsk_modulate(const std::vector<std::uint8_t>& bits);

/// Sign decisions per component, inverse Gray map; exact zeros decide bit 0.
std::vector<std::uint8_t> qpsk_demodulate(const std::vector<std::complex<double>>& symbols);

/*!\brief Shape symbols onto subchannel `index`.
 *
 * Root-raised-cosine shaping (rolloff 0.25, span 8 symbols) at
 * sample_rate/symbol_rate samples per symbol, then mixed to offsets_hz[index].
 * Output length is nsym * sps + span * sps (full convolution tail).
 */
std::vector<std::complex<double>> build_subchannel(
    const std::vector<std::complex<double>>& symbols, const SubchannelPlan& plan,
    std::size_t index);

/*!\brief Superpose all transmit streams onto the array.
 *
 * Each stream's preamble + payload symbols are shaped on its subchannel and
 * launched on the matched transmit beam a_t(direction)/N, so a receiver in
 * that direction sees the full coherent array gain. Streams must occupy
 * distinct subchannels.
 */
Eigen::MatrixXcd transmit_scene(const std::vector<TxStreamSpec>& specs,
                                const ArrayGeometry& tx_geom, const SubchannelPlan& plan);

/*!\brief Decode every (beam, stream) pair from one shared received block.
 *
 * Per cell: beam output, down-mix by the stream's offset, matched filter,
 * normalized preamble cross-correlation for timing, least-squares single-tap
 * gain from the preamble, demodulate. locked requires the correlation peak to
 * reach 0.6 of ideal; unlocked cells report ber = 0.5.
 */
DecodeGridResult decode_grid(const Eigen::MatrixXcd& r, const BeamBank& bank,
                             const SubchannelPlan& plan,
                             const std::vector<TxStreamSpec>& specs);

SyncBudget sync_trial_count(std::size_t n_directions, SyncMode mode);

/// EVM = 100 sqrt(mean|m - r|^2 / mean|r|^2).
double evm_percent(const std::vector<std::complex<double>>& measured,
                   const std::vector<std::complex<double>>& reference);

/// Bit error rate: Hamming distance / length.
double ber(const std::vector<std::uint8_t>& bits, const std::vector<std::uint8_t>& ref_bits);

/// 64-symbol constant-amplitude preamble snapped to QPSK points, as 128 bits.
std::vector<std::uint8_t> default_preamble_bits();

/// Deterministic payload bits from a counter-based stream.
std::vector<std::uint8_t> random_bits(std::uint64_t seed, std::size_t count);

/// JSON with per-cell {rx_beam_deg, tx_stream_deg, subchannel_hz, evm_percent,
/// ber, locked, constellation (capped at 1024 points)}.
std::string decode_grid_to_json(const DecodeGridResult& grid);

} // namespace beamsim
