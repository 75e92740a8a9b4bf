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
#include "beamsim/rf_frontend.hpp"
#include "beamsim/rng.hpp"

using namespace beamsim;
using cd = std::complex<double>;

namespace {

std::vector<cd> tone(std::size_t n, double amp, double freq, double fs, double phase = 0.0) {
    std::vector<cd> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = std::polar(amp, 2.0 * std::numbers::pi * freq * static_cast<double>(t) / fs +
                                   phase);
    return x;
}

Eigen::MatrixXcd tone_rows(std::size_t rows, std::size_t n, double freq, double fs) {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
    const std::vector<cd> t = tone(n, 1.0, freq, fs);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < n; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t[c];
    return m;
}

} // namespace

TEST_CASE("LO plan puts the carrier at 3.5x the external LO") {
    CHECK(LoPlan{2e9}.rf_hz() == 7e9);
    CHECK(lo_frequency_for_rf(7e9) == 2e9);
    CHECK(lo_frequency_for_rf(60e9) ==
          doctest::Approx(17142857142.857143).epsilon(1e-15));
    // Round trip is exact in both directions for representable values.
    CHECK(LoPlan{lo_frequency_for_rf(60e9)}.rf_hz() == 60e9);
    CHECK_THROWS_AS(lo_frequency_for_rf(-1.0), std::invalid_argument);
}

TEST_CASE("image model coefficients") {
    // conj(mu) + nu = 1 for every (g, phi); it is what makes the image
    // estimator's inversion well-posed.
    const Rng rng(3);
    for (std::uint64_t i = 0; i < 30; ++i) {
        const double g = 0.5 + rng.uniform_at(2 * i);
        const double phi = (rng.uniform_at(2 * i + 1) - 0.5);
        CHECK(std::abs(std::conj(iq_mu(g, phi)) + iq_nu(g, phi) - cd{1.0, 0.0}) < 1e-15);
    }
    CHECK(std::abs(iq_mu(1.0, 0.0) - cd{1.0, 0.0}) == 0.0);
    CHECK(std::abs(iq_nu(1.0, 0.0)) == 0.0);
    CHECK(iq_irr_db(1.1, 5.0 * std::numbers::pi / 180.0) ==
          doctest::Approx(23.794648701808008).epsilon(1e-12));
}

TEST_CASE("imbalance then matched compensation is the identity") {
    const double g = 1.07, phi = -0.06;
    const std::vector<cd> x = tone(256, 0.8, 12.5e6, 200e6, 0.4);
    const std::vector<cd> y = apply_iq_imbalance(x, g, phi);
    const std::vector<cd> z = compensate_iq(y, g, phi);
    for (std::size_t t = 0; t < x.size(); ++t)
        CHECK(std::abs(z[t] - x[t]) < 1e-12);
}

TEST_CASE("imbalance creates the image tone at the modeled level") {
    const double fs = 200e6, f = 25e6;
    const std::vector<cd> y = apply_iq_imbalance(tone(512, 1.0, f, fs), 1.1,
                                                 5.0 * std::numbers::pi / 180.0);
    const double p_sig = std::norm(tone_amplitude(y, f, fs));
    const double p_img = std::norm(tone_amplitude(y, -f, fs));
    CHECK(10.0 * std::log10(p_sig / p_img) ==
          doctest::Approx(23.794648701808008).epsilon(1e-9));
}

TEST_CASE("quantizer codes, saturation accounting, and edge behavior") {
    const QuantSpec spec{12, 1.0};
    const double step = 2.0 / 4096.0;

    Eigen::MatrixXcd x(1, 4);
    x << cd{0.0, 0.0}, cd{step * 0.4, -step * 0.4}, cd{1.0, -1.0}, cd{2.0, -3.0};
    const QuantizedBlock q = quantize(x, spec);

    // Mid-rise: zero maps to +step/2, and the half-code offset is exact.
    CHECK(q.samples(0, 0) == cd{step / 2.0, step / 2.0});
    CHECK(q.samples(0, 1) == cd{step / 2.0, -step / 2.0});
    // Full scale clips to the top code silently; beyond it is saturation.
    CHECK(q.samples(0, 2) == cd{1.0 - step / 2.0, -(1.0 - step / 2.0)});
    CHECK(q.samples(0, 3) == cd{1.0 - step / 2.0, -(1.0 - step / 2.0)});
    CHECK(q.saturated_components == 2);

    CHECK_THROWS_AS(quantize(x, QuantSpec{0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(quantize(x, QuantSpec{25, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(quantize(x, QuantSpec{12, 0.0}), std::invalid_argument);
}

TEST_CASE("quantizer is idempotent and monotone") {
    const QuantSpec spec{6, 1.0};
    const Rng rng(9);
    Eigen::MatrixXcd x(1, 400);
    for (Eigen::Index i = 0; i < 400; ++i)
        x(0, i) = 1.2 * rng.complex_gaussian_at(static_cast<std::uint64_t>(i));
    const Eigen::MatrixXcd once = quantize(x, spec).samples;
    const Eigen::MatrixXcd twice = quantize(once, spec).samples;
    CHECK((once - twice).cwiseAbs().maxCoeff() == 0.0);

    for (Eigen::Index i = 0; i + 1 < 400; ++i) {
        const double a = x(0, i).real(), b = x(0, i + 1).real();
        const double qa = once(0, i).real(), qb = once(0, i + 1).real();
        if (a <= b)
            CHECK(qa <= qb);
        else
            CHECK(qa >= qb);
    }
}

TEST_CASE("12-bit quantization noise sits near the theoretical floor") {
    const double fs = 1966.08e6;
    const std::size_t n = 16384;
    // Irrational-ratio tone exercises the full code range.
    const std::vector<cd> clean = tone(n, 1.0, fs / std::numbers::pi / 4.0, fs);
    Eigen::MatrixXcd x(1, static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t)
        x(0, static_cast<Eigen::Index>(t)) = clean[t];
    const QuantizedBlock q = quantize(x, QuantSpec{12, 1.0});
    double sig = 0.0, err = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        sig += std::norm(clean[t]);
        err += std::norm(q.samples(0, static_cast<Eigen::Index>(t)) - clean[t]);
    }
    const double snr_db = 10.0 * std::log10(sig / err);
    CHECK(snr_db > 72.0);
    CHECK(snr_db < 76.0);
}

TEST_CASE("chain impairments scale, rotate, skew, and offset") {
    std::vector<ChainImpairment> imps(2);
    imps[0].gain_db = 20.0 * std::log10(2.0); // exactly x2
    imps[0].phase_deg = 90.0;
    imps[1].iq_gain = 1.2;
    imps[1].iq_phase_deg = -3.0;
    imps[1].dc_offset = cd{0.01, -0.02};

    Eigen::MatrixXcd x(2, 3);
    x << cd{1, 0}, cd{0, 1}, cd{-1, 1}, cd{1, 0}, cd{0, 1}, cd{-1, 1};
    const Eigen::MatrixXcd y = apply_chain_impairments(x, imps);

    for (int t = 0; t < 3; ++t)
        CHECK(std::abs(y(0, t) - x(0, t) * cd{0.0, 2.0}) < 1e-12);

    const cd mu = iq_mu(1.2, -3.0 * std::numbers::pi / 180.0);
    const cd nu = iq_nu(1.2, -3.0 * std::numbers::pi / 180.0);
    for (int t = 0; t < 3; ++t) {
        const cd want = mu * x(1, t) + nu * std::conj(x(1, t)) + cd{0.01, -0.02};
        CHECK(std::abs(y(1, t) - want) < 1e-12);
    }

    CHECK_THROWS_AS(apply_chain_impairments(x, std::vector<ChainImpairment>(3)),
                    std::invalid_argument);
}

TEST_CASE("chain mismatch estimation is exact on clean tones") {
    const double fs = 1966.08e6, f = fs / 8.0;
    const std::size_t n = 256;
    std::vector<ChainImpairment> imps(4);
    imps[0].gain_db = 0.8;
    imps[0].phase_deg = 10.0;
    imps[1].gain_db = -1.3;
    imps[1].phase_deg = -24.0;
    imps[2].gain_db = 1.9;
    imps[2].phase_deg = 3.0;
    imps[3].gain_db = -0.2;
    imps[3].phase_deg = 17.0;

    const Eigen::MatrixXcd y = apply_chain_impairments(tone_rows(4, n, f, fs), imps);
    const CalibrationResult cal = estimate_chain_mismatch(y, f, fs);
    REQUIRE(cal.corrections.size() == 4);
    CHECK(cal.corrections[0] == cd{1.0, 0.0});

    auto lin = [](const ChainImpairment& imp) {
        return std::polar(std::pow(10.0, imp.gain_db / 20.0),
                          imp.phase_deg * std::numbers::pi / 180.0);
    };
    for (std::size_t k = 1; k < 4; ++k)
        CHECK(std::abs(cal.corrections[k] - lin(imps[0]) / lin(imps[k])) < 1e-9);

    const Eigen::MatrixXcd aligned = compensate(y, cal);
    for (std::size_t k = 1; k < 4; ++k)
        CHECK((aligned.row(static_cast<Eigen::Index>(k)) - aligned.row(0))
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
}

TEST_CASE("chain mismatch estimation rejects weak tones and short blocks") {
    const double fs = 100e6, f = fs / 4.0;
    const Rng rng(12);
    Eigen::MatrixXcd noise(2, 256);
    for (Eigen::Index t = 0; t < 256; ++t)
        for (Eigen::Index k = 0; k < 2; ++k)
            noise(k, t) = rng.complex_gaussian_at(static_cast<std::uint64_t>(t * 2 + k));
    CHECK_THROWS_AS(estimate_chain_mismatch(noise, f, fs), std::runtime_error);
    CHECK_THROWS_AS(estimate_chain_mismatch(tone_rows(2, 32, f, fs), f, fs),
                    std::invalid_argument);
}

TEST_CASE("image estimator recovers the injected imbalance") {
    const double fs = 400e6, f = fs / 8.0;
    const double g = 1.1, phi = 5.0 * std::numbers::pi / 180.0;
    const std::vector<cd> y = apply_iq_imbalance(tone(1024, 0.9, f, fs, 0.7), g, phi);
    const IqEstimate est = estimate_iq_imbalance(y, fs);
    CHECK(est.g_hat == doctest::Approx(g).epsilon(1e-9));
    CHECK(est.phi_hat_rad == doctest::Approx(phi).epsilon(1e-9));

    // Compensating with the estimate restores image rejection.
    const std::vector<cd> fixed = compensate_iq(y, est.g_hat, est.phi_hat_rad);
    const double p_sig = std::norm(tone_amplitude(fixed, f, fs));
    const double p_img = std::norm(tone_amplitude(fixed, -f, fs));
    CHECK(10.0 * std::log10(p_sig / std::max(p_img, 1e-300)) > 80.0);
}

TEST_CASE("image estimator needs a one-sided tone") {
    const double fs = 400e6, f = fs / 8.0;
    // A real cosine has equal-power images; the estimator must refuse it.
    std::vector<cd> x(1024);
    for (std::size_t t = 0; t < x.size(); ++t)
        x[t] = std::cos(2.0 * std::numbers::pi * f * static_cast<double>(t) / fs);
    CHECK_THROWS_AS(estimate_iq_imbalance(x, fs), std::runtime_error);
    CHECK_THROWS_AS(estimate_iq_imbalance(std::vector<cd>(16, cd{1.0, 0.0}), fs),
                    std::invalid_argument);
}

TEST_CASE("negative-frequency tones are located correctly") {
    const double fs = 400e6, f = -fs / 8.0;
    const double g = 1.05, phi = -0.03;
    const std::vector<cd> y = apply_iq_imbalance(tone(512, 1.0, f, fs), g, phi);
    const IqEstimate est = estimate_iq_imbalance(y, fs);
    CHECK(est.g_hat == doctest::Approx(g).epsilon(1e-9));
    CHECK(est.phi_hat_rad == doctest::Approx(phi).epsilon(1e-9));
}

TEST_CASE("calibration JSON round trip and validation") {
    CalibrationResult cal;
    cal.corrections = {cd{1.0, 0.0}, cd{0.5, -0.25}, cd{1.5, 2.0}};
    const CalibrationResult back = calibration_from_json(calibration_to_json(cal));
    REQUIRE(back.corrections.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(back.corrections[i] == cal.corrections[i]);

    CalibrationResult bad;
    bad.corrections = {cd{0.9, 0.0}};
    CHECK_THROWS_AS(calibration_from_json(calibration_to_json(bad)), std::invalid_argument);
}
