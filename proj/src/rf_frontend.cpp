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

#include "beamsim/rf_frontend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "beamsim/dsp.hpp"

namespace beamsim {

double lo_frequency_for_rf(double rf_hz) {
    if (!(rf_hz > 0.0))
        throw std::invalid_argument("lo_frequency_for_rf: rf frequency must be positive");
    // Doubling is lossless, so the quotient is exact whenever 7/2 * lo was.
    return rf_hz * 2.0 / 7.0;
}

std::complex<double> iq_mu(double g, double phi_rad) {
    if (!(g > 0.0))
        throw std::invalid_argument("iq_mu: amplitude ratio must be positive");
    return 0.5 * (1.0 + g * std::polar(1.0, phi_rad));
}

std::complex<double> iq_nu(double g, double phi_rad) {
    if (!(g > 0.0))
        throw std::invalid_argument("iq_nu: amplitude ratio must be positive");
    return 0.5 * (1.0 - g * std::polar(1.0, -phi_rad));
}

double iq_irr_db(double g, double phi_rad) {
    const double num = std::norm(iq_mu(g, phi_rad));
    const double den = std::norm(iq_nu(g, phi_rad));
    if (den == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(num / den);
}

std::vector<std::complex<double>> apply_iq_imbalance(const std::vector<std::complex<double>>& x,
                                                     double g, double phi_rad) {
    const std::complex<double> mu = iq_mu(g, phi_rad);
    const std::complex<double> nu = iq_nu(g, phi_rad);
    std::vector<std::complex<double>> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = mu * x[i] + nu * std::conj(x[i]);
    return y;
}

std::vector<std::complex<double>> compensate_iq(const std::vector<std::complex<double>>& y,
                                                double g_hat, double phi_hat_rad) {
    const std::complex<double> mu = iq_mu(g_hat, phi_hat_rad);
    const std::complex<double> nu = iq_nu(g_hat, phi_hat_rad);
    const double det = std::norm(mu) - std::norm(nu);
    if (std::abs(det) < 1e-15)
        throw std::runtime_error("compensate_iq: estimated model is singular");
    std::vector<std::complex<double>> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        x[i] = (std::conj(mu) * y[i] - nu * std::conj(y[i])) / det;
    return x;
}

QuantizedBlock quantize(const Eigen::MatrixXcd& x, const QuantSpec& spec) {
    if (spec.bits < 1 || spec.bits > 24)
        throw std::invalid_argument("quantize: bits must be in [1, 24]");
    if (!(spec.full_scale > 0.0))
        throw std::invalid_argument("quantize: full_scale must be positive");

    const double fs = spec.full_scale;
    const double step = 2.0 * fs / std::ldexp(1.0, spec.bits);
    const double top = fs - 0.5 * step;

    QuantizedBlock out;
    out.samples.resize(x.rows(), x.cols());
    auto quantize_component = [&](double v) {
        if (v > fs || v < -fs)
            ++out.saturated_components;
        const double clipped = std::clamp(v, -fs, fs);
        const double code = step * (std::floor(clipped / step) + 0.5);
        return std::clamp(code, -top, top);
    };
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        for (Eigen::Index r = 0; r < x.rows(); ++r)
            out.samples(r, c) = {quantize_component(x(r, c).real()),
                                 quantize_component(x(r, c).imag())};
    return out;
}

Eigen::MatrixXcd apply_chain_impairments(const Eigen::MatrixXcd& streams,
                                         const std::vector<ChainImpairment>& imps) {
    if (static_cast<Eigen::Index>(imps.size()) != streams.rows())
        throw std::invalid_argument("apply_chain_impairments: one impairment per chain required");

    constexpr double d2r = std::numbers::pi / 180.0;
    Eigen::MatrixXcd out(streams.rows(), streams.cols());
    for (Eigen::Index k = 0; k < streams.rows(); ++k) {
        const ChainImpairment& imp = imps[static_cast<std::size_t>(k)];
        const std::complex<double> lin =
            std::polar(std::pow(10.0, imp.gain_db / 20.0), imp.phase_deg * d2r);
        const std::complex<double> mu = iq_mu(imp.iq_gain, imp.iq_phase_deg * d2r);
        const std::complex<double> nu = iq_nu(imp.iq_gain, imp.iq_phase_deg * d2r);
        for (Eigen::Index t = 0; t < streams.cols(); ++t) {
            const std::complex<double> v = lin * streams(k, t);
            out(k, t) = mu * v + nu * std::conj(v) + imp.dc_offset;
        }
    }
    return out;
}

CalibrationResult estimate_chain_mismatch(const Eigen::MatrixXcd& streams, double tone_freq_hz,
                                          double sample_rate_hz) {
    const auto t = static_cast<std::size_t>(streams.cols());
    if (streams.rows() < 1)
        throw std::invalid_argument("estimate_chain_mismatch: at least one chain required");
    if (t < 64)
        throw std::invalid_argument("estimate_chain_mismatch: at least 64 samples required");
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("estimate_chain_mismatch: sample rate must be positive");

    const double w = 2.0 * std::numbers::pi * tone_freq_hz / sample_rate_hz;
    std::vector<std::complex<double>> amps(static_cast<std::size_t>(streams.rows()));
    for (Eigen::Index k = 0; k < streams.rows(); ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < t; ++i)
            acc += streams(k, static_cast<Eigen::Index>(i)) *
                   std::polar(1.0, -w * static_cast<double>(i));
        const std::complex<double> amp = acc / static_cast<double>(t);

        // Residual after removing the projected tone, folded into a per-bin
        // floor; a usable tone must clear it by 20 dB.
        double residual = 0.0;
        for (std::size_t i = 0; i < t; ++i) {
            const std::complex<double> tone = amp * std::polar(1.0, w * static_cast<double>(i));
            residual += std::norm(streams(k, static_cast<Eigen::Index>(i)) - tone);
        }
        const double bin_floor = residual / static_cast<double>(t * t);
        if (std::norm(amp) <= 100.0 * bin_floor)
            throw std::runtime_error(
                "estimate_chain_mismatch: tone below 20 dB over the noise floor on chain " +
                std::to_string(k));
        amps[static_cast<std::size_t>(k)] = amp;
    }

    CalibrationResult cal;
    cal.corrections.resize(amps.size());
    cal.corrections[0] = {1.0, 0.0};
    for (std::size_t k = 1; k < amps.size(); ++k)
        cal.corrections[k] = amps[0] / amps[k];
    return cal;
}

Eigen::MatrixXcd compensate(const Eigen::MatrixXcd& streams, const CalibrationResult& cal) {
    if (static_cast<Eigen::Index>(cal.corrections.size()) != streams.rows())
        throw std::invalid_argument("compensate: correction count must match chain count");
    Eigen::MatrixXcd out(streams.rows(), streams.cols());
    for (Eigen::Index k = 0; k < streams.rows(); ++k)
        out.row(k) = streams.row(k) * cal.corrections[static_cast<std::size_t>(k)];
    return out;
}

IqEstimate estimate_iq_imbalance(const std::vector<std::complex<double>>& x,
                                 double sample_rate_hz) {
    if (x.size() < 64)
        throw std::invalid_argument("estimate_iq_imbalance: at least 64 samples required");
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("estimate_iq_imbalance: sample rate must be positive");

    // Coarse tone location from an FFT peak, then exact single-bin projections
    // at the signal and image frequencies.
    const std::vector<std::complex<double>> spec = fft_padded(x);
    std::size_t peak = 0;
    double peak_pow = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double p = std::norm(spec[i]);
        if (p > peak_pow) {
            peak_pow = p;
            peak = i;
        }
    }
    const double n = static_cast<double>(spec.size());
    double freq = static_cast<double>(peak) / n * sample_rate_hz;
    if (peak > spec.size() / 2)
        freq -= sample_rate_hz;

    const std::complex<double> a_sig = tone_amplitude(x, freq, sample_rate_hz);
    const std::complex<double> a_img = tone_amplitude(x, -freq, sample_rate_hz);
    if (!(std::abs(a_sig) > std::abs(a_img)))
        throw std::runtime_error("estimate_iq_imbalance: image at least as strong as signal");

    // a_sig = mu A, a_img = nu conj(A); with conj(mu) + nu = 1 the ratio
    // rho = a_img / conj(a_sig) = nu / conj(mu) pins the model down.
    const std::complex<double> rho = a_img / std::conj(a_sig);
    const std::complex<double> mu = std::conj(1.0 / (1.0 + rho));
    const std::complex<double> ge = 2.0 * mu - 1.0;

    IqEstimate est;
    est.g_hat = std::abs(ge);
    est.phi_hat_rad = std::arg(ge);
    if (!(est.g_hat > 0.0))
        throw std::runtime_error("estimate_iq_imbalance: degenerate estimate");
    return est;
}

std::string calibration_to_json(const CalibrationResult& cal) {
    nlohmann::json corrections = nlohmann::json::array();
    for (const auto& c : cal.corrections)
        corrections.push_back({{"re", c.real()}, {"im", c.imag()}});
    nlohmann::json root = {{"reference_chain", 0}, {"corrections", std::move(corrections)}};
    return root.dump(2) + "\n";
}

CalibrationResult calibration_from_json(const std::string& text) {
    const nlohmann::json root = nlohmann::json::parse(text);
    CalibrationResult cal;
    for (const auto& c : root.at("corrections"))
        cal.corrections.emplace_back(c.at("re").get<double>(), c.at("im").get<double>());
    if (cal.corrections.empty() || cal.corrections[0] != std::complex<double>(1.0, 0.0))
        throw std::invalid_argument("calibration_from_json: corrections[0] must be exactly 1");
    return cal;
}

} // namespace beamsim
