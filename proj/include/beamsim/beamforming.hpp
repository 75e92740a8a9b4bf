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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamsim/angle.hpp"
#include "beamsim/array.hpp"

namespace beamsim {

/*!\brief Transmit-side hybrid configuration: x = f_rf * f_bb * a.
 *
 * f_rf is N x N_RF (analog network), f_bb is N_RF x N_S (digital precoder).
 * phase_bits > 0 constrains every f_rf entry to unit modulus with a phase on
 * the 2^phase_bits grid; 0 means unconstrained (fully digital).
 */
struct HybridConfig {
    Eigen::MatrixXcd f_rf;
    Eigen::MatrixXcd f_bb;
    int phase_bits = 0;
};

/// Receive-side mirror: y = w_bb^H * w_rf^H * r, w_rf M x M_RF, w_bb M_RF x N_S.
struct CombinerConfig {
    Eigen::MatrixXcd w_rf;
    Eigen::MatrixXcd w_bb;
    int phase_bits = 0;
};

/// B digital beam weight vectors over M elements, one label angle per beam.
struct BeamBank {
    std::vector<Eigen::VectorXcd> weights;
    std::vector<Angle> labels;
};

/// Work counter for apply_beam_bank's single-pass contract.
struct BeamBankStats {
    std::size_t complex_macs = 0;
};

void validate(const HybridConfig& cfg);
void validate(const CombinerConfig& cfg);
void validate(const BeamBank& bank);

/// x = f_rf * f_bb * a; a is N_S x T.
Eigen::MatrixXcd precode(const HybridConfig& cfg, const Eigen::MatrixXcd& a);

/// y = w_bb^H * w_rf^H * r; r is M x T.
Eigen::MatrixXcd combine(const CombinerConfig& cfg, const Eigen::MatrixXcd& r);

/*!\brief Project every entry onto the unit circle at 2^phase_bits phases.
 *
 * Phases round to the nearest grid multiple of 2*pi/2^phase_bits, ties toward
 * the larger phase. phase_bits must be >= 1 here; 0 only marks a config as
 * unconstrained and is rejected as an explicit quantization request.
 */
Eigen::MatrixXcd quantize_phases(const Eigen::MatrixXcd& matrix, int phase_bits);

/// One conjugate-matched beam per direction: weights[b] = conj(a(dir_b)) / M.
BeamBank matched_beam_bank(const ArrayGeometry& geom, const std::vector<Angle>& directions);

/*!\brief Apply all B beams to one shared M x T sample block.
 *
 * out(b,t) = sum_m weights[b][m] * r(m,t), summed in ascending element order,
 * a single pass over r. If stats is given it receives the exact complex
 * multiply-accumulate count, B*M*T.
 */
Eigen::MatrixXcd apply_beam_bank(const BeamBank& bank, const Eigen::MatrixXcd& r,
                                 BeamBankStats* stats = nullptr);

/// JSON {m, beams:[{label_az_deg, label_el_deg, weights:[{re,im},...]}]}.
std::string beam_bank_to_json(const BeamBank& bank);
BeamBank beam_bank_from_json(const std::string& text);

} // namespace beamsim
