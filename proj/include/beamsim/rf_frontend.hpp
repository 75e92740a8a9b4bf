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

namespace beamsim {

/*!\brief Per-chain analog error model.
 *
 * Applied in order: common gain/phase, then I/Q imbalance (amplitude ratio
 * iq_gain, phase error iq_phase_deg), then the additive dc offset.
 */
struct ChainImpairment {
    double gain_db = 0.0;
    double phase_deg = 0.0;
    double iq_gain = 1.0;
    double iq_phase_deg = 0.0;
    std::complex<double> dc_offset{0.0, 0.0};
};

/// Frequency plan: the RF carrier sits at exactly 7/2 times the external LO.
struct LoPlan {
    double external_lo_hz = 0.0;

    static constexpr int rf_multiplier_num = 7;
    static constexpr int rf_multiplier_den = 2;

    double rf_hz() const { return external_lo_hz * 7.0 / 2.0; }
};

/// Uniform mid-rise quantizer over [-full_scale, full_scale] per I/Q component.
struct QuantSpec {
    int bits = 12;
    double full_scale = 1.0;
};

/// Digital complex multipliers aligning every chain to chain 0.
struct CalibrationResult {
    std::vector<std::complex<double>> corrections;
};

struct QuantizedBlock {
    Eigen::MatrixXcd samples;
    std::size_t saturated_components = 0;
};

struct IqEstimate {
    double g_hat = 1.0;
    double phi_hat_rad = 0.0;
};

/// External LO frequency that puts the RF carrier at rf_hz: rf_hz * 2 / 7.
double lo_frequency_for_rf(double rf_hz);

/// Image model y = mu x + nu conj(x), mu = (1 + g e^{j phi})/2,
/// nu = (1 - g e^{-j phi})/2.
std::complex<double> iq_mu(double g, double phi_rad);
std::complex<double> iq_nu(double g, double phi_rad);

/// Image rejection ratio |mu|^2/|nu|^2 in dB.
double iq_irr_db(double g, double phi_rad);

std::vector<std::complex<double>> apply_iq_imbalance(const std::vector<std::complex<double>>& x,
                                                     double g, double phi_rad);

/// Inverse of the image model given estimated (g, phi).
std::vector<std::complex<double>> compensate_iq(const std::vector<std::complex<double>>& y,
                                                double g_hat, double phi_hat_rad);

/*!\brief Quantize every I and Q component.
 *
 * Values clip to the top/bottom code, step = 2 full_scale / 2^bits, output on
 * the code midpoints. Components outside (-full_scale, full_scale) are counted
 * in saturated_components; clipping itself is silent.
 */
QuantizedBlock quantize(const Eigen::MatrixXcd& x, const QuantSpec& spec);

/// Per chain k: scale by 10^{gain_db/20} e^{j phase}, I/Q imbalance, + dc.
Eigen::MatrixXcd apply_chain_impairments(const Eigen::MatrixXcd& streams,
                                         const std::vector<ChainImpairment>& imps);

/*!\brief Estimate inter-chain gain/phase mismatch from a shared tone.
 *
 * Each chain's complex tone amplitude comes from a full-block single-bin
 * Fourier projection; corrections[k] = amp[0]/amp[k] and corrections[0] is
 * exactly 1. Fails if any chain's tone sits less than 20 dB above that
 * chain's per-bin residual floor.
 */
CalibrationResult estimate_chain_mismatch(const Eigen::MatrixXcd& streams, double tone_freq_hz,
                                          double sample_rate_hz);

/// Multiply stream k by corrections[k]. Not idempotent: applying twice
/// squares the correction.
Eigen::MatrixXcd compensate(const Eigen::MatrixXcd& streams, const CalibrationResult& cal);

/*!\brief Estimate (g, phi) of the image model from a tone-dominated block.
 *
 * Locates the strongest FFT bin, projects the signal and image frequencies
 * exactly, and inverts the model via conj(mu) + nu = 1. Rejects blocks whose
 * image is at least as strong as the signal.
 */
IqEstimate estimate_iq_imbalance(const std::vector<std::complex<double>>& x,
                                 double sample_rate_hz);

/// JSON {reference_chain: 0, corrections: [{re, im}, ...]}.
std::string calibration_to_json(const CalibrationResult& cal);
CalibrationResult calibration_from_json(const std::string& text);

} // namespace beamsim
