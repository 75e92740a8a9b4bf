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

#include <doctest.h>

#include "beamsim/beamforming.hpp"
#include "beamsim/channel.hpp"
#include "beamsim/rng.hpp"

using namespace beamsim;
using cd = std::complex<double>;

namespace {
constexpr double kLambda = 0.005;

Eigen::MatrixXcd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    const Rng rng(seed);
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, c) = rng.complex_gaussian_at(static_cast<std::uint64_t>(c * rows + r));
    return m;
}

Eigen::MatrixXcd random_phases(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    const Rng rng(seed);
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, c) = std::polar(
                1.0, 2.0 * std::numbers::pi *
                         rng.uniform_at(static_cast<std::uint64_t>(c * rows + r)));
    return m;
}
} // namespace

TEST_CASE("hybrid validation enforces shapes and the unit-modulus analog stage") {
    HybridConfig cfg;
    cfg.f_rf = random_phases(8, 4, 1);
    cfg.f_bb = random_matrix(4, 2, 2);
    CHECK_NOTHROW(validate(cfg));

    HybridConfig wide = cfg;
    wide.f_bb = random_matrix(3, 2, 3); // rows must equal f_rf cols
    CHECK_THROWS_AS(validate(wide), std::invalid_argument);

    HybridConfig fat = cfg;
    fat.f_rf = random_phases(8, 9, 4); // more chains than elements
    CHECK_THROWS_AS(validate(fat), std::invalid_argument);

    HybridConfig scaled = cfg;
    scaled.phase_bits = 4;
    scaled.f_rf = quantize_phases(cfg.f_rf, 4);
    CHECK_NOTHROW(validate(scaled));
    scaled.f_rf(0, 0) *= 1.01; // off the unit circle
    CHECK_THROWS_AS(validate(scaled), std::invalid_argument);
}

TEST_CASE("phase grid constraint") {
    HybridConfig cfg;
    cfg.phase_bits = 2;
    cfg.f_bb = random_matrix(1, 1, 5);
    cfg.f_rf = Eigen::MatrixXcd::Constant(2, 1, std::polar(1.0, std::numbers::pi / 2.0));
    CHECK_NOTHROW(validate(cfg)); // pi/2 is on the 2-bit grid
    cfg.f_rf(0, 0) = std::polar(1.0, std::numbers::pi / 5.0);
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("phase quantization projects onto the unit-circle grid") {
    const auto one = [](cd v) { return Eigen::MatrixXcd::Constant(1, 1, v); };
    const cd q = quantize_phases(one(std::polar(1.0, std::numbers::pi / 5.0)), 2)(0, 0);
    CHECK(std::abs(q - cd{1.0, 0.0}) < 1e-15); // pi/5 < pi/4 rounds to 0

    const cd r = quantize_phases(one(std::polar(2.5, 1.9)), 3)(0, 0);
    CHECK(std::abs(r) == doctest::Approx(1.0).epsilon(1e-12)); // modulus is discarded
    const double step = std::numbers::pi / 4.0;
    const double snapped = std::arg(r);
    CHECK(std::abs(snapped / step - std::round(snapped / step)) < 1e-9);

    CHECK_THROWS_AS(quantize_phases(one(cd{1.0, 0.0}), 0), std::invalid_argument);
}

TEST_CASE("phase quantization is idempotent") {
    const Rng rng(31);
    Eigen::MatrixXcd v(50, 1);
    for (std::uint64_t i = 0; i < 50; ++i)
        v(static_cast<Eigen::Index>(i), 0) = std::polar(
            1.0, 2.0 * std::numbers::pi * rng.uniform_at(i) - std::numbers::pi);
    for (int bits = 1; bits <= 6; ++bits) {
        const Eigen::MatrixXcd once = quantize_phases(v, bits);
        CHECK((quantize_phases(once, bits) - once).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("coarser phase grids never beam closer to the target") {
    // Beamforming gain toward the steered direction is monotone in phase
    // resolution once the analog weights are snapped.
    const ArrayGeometry geom = make_ula(16, kLambda / 2.0, kLambda);
    const Angle steer = Angle::from_degrees(37.0, 0.0);
    const Eigen::VectorXcd ideal = steering_vector(geom, steer).conjugate();
    double prev = 0.0;
    for (int bits = 1; bits <= 6; ++bits) {
        const Eigen::VectorXcd w = quantize_phases(ideal, bits);
        const double gain = std::abs(array_factor(w, geom, steer));
        CHECK(gain >= prev - 1e-9);
        prev = gain;
    }
    CHECK(prev == doctest::Approx(16.0).epsilon(1e-3));
}

TEST_CASE("precode and combine agree with dense matrix evaluation") {
    const Rng rng(77);
    for (std::uint64_t trial = 0; trial < 25; ++trial) {
        const auto n = static_cast<Eigen::Index>(2 + rng.word_at(4 * trial) % 7);
        const auto m = static_cast<Eigen::Index>(2 + rng.word_at(4 * trial + 1) % 7);
        const Eigen::Index n_rf = 1 + static_cast<Eigen::Index>(rng.word_at(4 * trial + 2) %
                                                                static_cast<std::uint64_t>(n));
        const Eigen::Index m_rf = 1 + static_cast<Eigen::Index>(rng.word_at(4 * trial + 3) %
                                                                static_cast<std::uint64_t>(m));
        const Eigen::Index ns = 1 + std::min(n_rf, m_rf) / 2;

        HybridConfig tx;
        tx.f_rf = random_phases(n, n_rf, 100 + trial);
        tx.f_bb = random_matrix(n_rf, ns, 200 + trial);
        CombinerConfig rx;
        rx.w_rf = random_phases(m, m_rf, 300 + trial);
        rx.w_bb = random_matrix(m_rf, ns, 400 + trial);
        const Eigen::MatrixXcd h = random_matrix(m, n, 500 + trial);
        const Eigen::MatrixXcd s = random_matrix(ns, 10, 600 + trial);

        const Eigen::MatrixXcd via_ops = combine(rx, h * precode(tx, s));
        const Eigen::MatrixXcd dense =
            (rx.w_rf * rx.w_bb).adjoint() * h * (tx.f_rf * tx.f_bb) * s;
        CHECK((via_ops - dense).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("matched bank points where its labels say") {
    const ArrayGeometry geom = make_ula(4, kLambda / 2.0, kLambda);
    const std::vector<Angle> dirs = {
        Angle::from_degrees(-45.0, 0.0), Angle::from_degrees(-15.0, 0.0),
        Angle::from_degrees(15.0, 0.0), Angle::from_degrees(45.0, 0.0)};
    const BeamBank bank = matched_beam_bank(geom, dirs);
    REQUIRE(bank.weights.size() == 4);
    for (std::size_t b = 0; b < 4; ++b) {
        CHECK(bank.labels[b].az_rad == dirs[b].az_rad);
        // Unity gain toward the labeled direction.
        const cd g = array_factor(bank.weights[b], geom, dirs[b]);
        CHECK(std::abs(g - cd{1.0, 0.0}) < 1e-12);
    }
}

TEST_CASE("bank application is one pass over the samples") {
    const ArrayGeometry geom = make_ula(4, kLambda / 2.0, kLambda);
    const BeamBank bank = matched_beam_bank(
        geom, {Angle::from_degrees(-30.0, 0.0), Angle::from_degrees(0.0, 0.0),
               Angle::from_degrees(30.0, 0.0)});
    const Eigen::MatrixXcd r = random_matrix(4, 101, 8);
    BeamBankStats stats;
    const Eigen::MatrixXcd out = apply_beam_bank(bank, r, &stats);
    REQUIRE(out.rows() == 3);
    REQUIRE(out.cols() == 101);
    CHECK(stats.complex_macs == 3u * 4u * 101u);

    for (std::size_t b = 0; b < 3; ++b)
        for (Eigen::Index t = 0; t < 101; ++t) {
            const cd want = bank.weights[b].cwiseProduct(r.col(t)).sum();
            CHECK(std::abs(out(static_cast<Eigen::Index>(b), t) - want) < 1e-12);
        }

    CHECK_THROWS_AS(apply_beam_bank(bank, random_matrix(5, 4, 9), nullptr),
                    std::invalid_argument);
}

TEST_CASE("digital bank reproduces any hybrid combiner output") {
    // Every hybrid combiner column is one digital weight vector, so a bank
    // built from w_rf * w_bb replays the hybrid path exactly.
    const Eigen::Index m = 8, m_rf = 3, ns = 2;
    CombinerConfig rx;
    rx.w_rf = random_phases(m, m_rf, 21);
    rx.w_bb = random_matrix(m_rf, ns, 22);
    const Eigen::MatrixXcd r = random_matrix(m, 40, 23);

    const Eigen::MatrixXcd dense = rx.w_rf * rx.w_bb;
    BeamBank bank;
    for (Eigen::Index c = 0; c < ns; ++c) {
        bank.weights.push_back(dense.col(c).conjugate());
        bank.labels.push_back(Angle{0.0, 0.0});
    }
    const Eigen::MatrixXcd via_bank = apply_beam_bank(bank, r, nullptr);
    const Eigen::MatrixXcd via_combine = combine(rx, r);
    CHECK((via_bank - via_combine).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("beam bank JSON round trip") {
    const ArrayGeometry geom = make_ula(4, kLambda / 2.0, kLambda);
    const BeamBank bank = matched_beam_bank(
        geom, {Angle::from_degrees(-10.0, 0.0), Angle::from_degrees(25.0, 0.0)});
    const BeamBank back = beam_bank_from_json(beam_bank_to_json(bank));
    REQUIRE(back.weights.size() == bank.weights.size());
    for (std::size_t b = 0; b < bank.weights.size(); ++b) {
        CHECK(back.labels[b].az_deg() == doctest::Approx(bank.labels[b].az_deg()).epsilon(1e-12));
        CHECK((back.weights[b] - bank.weights[b]).cwiseAbs().maxCoeff() == 0.0);
    }
}
