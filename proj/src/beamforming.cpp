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

#include "beamsim/beamforming.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace beamsim {

namespace {

constexpr double kUnitModulusTol = 1e-9;

void check_analog_entries(const Eigen::MatrixXcd& analog, int phase_bits, const char* what) {
    if (phase_bits < 0)
        throw std::invalid_argument(std::string(what) + ": phase_bits must be >= 0");
    if (phase_bits == 0)
        return;
    const double step = 2.0 * std::numbers::pi / std::ldexp(1.0, phase_bits);
    for (Eigen::Index r = 0; r < analog.rows(); ++r) {
        for (Eigen::Index c = 0; c < analog.cols(); ++c) {
            const std::complex<double> v = analog(r, c);
            if (std::abs(std::abs(v) - 1.0) > kUnitModulusTol)
                throw std::invalid_argument(std::string(what) +
                                            ": analog entries must be unit modulus");
            const double k = std::arg(v) / step;
            if (std::abs(k - std::round(k)) > 1e-6)
                throw std::invalid_argument(std::string(what) +
                                            ": analog phase off the quantizer grid");
        }
    }
}

} // namespace

void validate(const HybridConfig& cfg) {
    if (cfg.f_rf.rows() < 1 || cfg.f_rf.cols() < 1 || cfg.f_bb.cols() < 1)
        throw std::invalid_argument("HybridConfig: empty matrices");
    if (cfg.f_rf.cols() > cfg.f_rf.rows())
        throw std::invalid_argument("HybridConfig: N_RF must be <= N");
    if (cfg.f_bb.rows() != cfg.f_rf.cols())
        throw std::invalid_argument("HybridConfig: f_bb rows must equal f_rf columns");
    if (cfg.f_bb.cols() > cfg.f_bb.rows())
        throw std::invalid_argument("HybridConfig: N_S must be <= N_RF");
    check_analog_entries(cfg.f_rf, cfg.phase_bits, "HybridConfig");
}

void validate(const CombinerConfig& cfg) {
    if (cfg.w_rf.rows() < 1 || cfg.w_rf.cols() < 1 || cfg.w_bb.cols() < 1)
        throw std::invalid_argument("CombinerConfig: empty matrices");
    if (cfg.w_rf.cols() > cfg.w_rf.rows())
        throw std::invalid_argument("CombinerConfig: M_RF must be <= M");
    if (cfg.w_bb.rows() != cfg.w_rf.cols())
        throw std::invalid_argument("CombinerConfig: w_bb rows must equal w_rf columns");
    if (cfg.w_bb.cols() > cfg.w_bb.rows())
        throw std::invalid_argument("CombinerConfig: N_S must be <= M_RF");
    check_analog_entries(cfg.w_rf, cfg.phase_bits, "CombinerConfig");
}

void validate(const BeamBank& bank) {
    if (bank.weights.empty())
        throw std::invalid_argument("BeamBank: at least one beam required");
    if (bank.labels.size() != bank.weights.size())
        throw std::invalid_argument("BeamBank: labels and weights disagree in count");
    for (const auto& w : bank.weights)
        if (w.size() != bank.weights[0].size())
            throw std::invalid_argument("BeamBank: weight vectors disagree in length");
}

Eigen::MatrixXcd precode(const HybridConfig& cfg, const Eigen::MatrixXcd& a) {
    validate(cfg);
    if (a.rows() != cfg.f_bb.cols())
        throw std::invalid_argument("precode: symbol rows must equal N_S");
    return cfg.f_rf * (cfg.f_bb * a);
}

Eigen::MatrixXcd combine(const CombinerConfig& cfg, const Eigen::MatrixXcd& r) {
    validate(cfg);
    if (r.rows() != cfg.w_rf.rows())
        throw std::invalid_argument("combine: sample rows must equal M");
    return cfg.w_bb.adjoint() * (cfg.w_rf.adjoint() * r);
}

Eigen::MatrixXcd quantize_phases(const Eigen::MatrixXcd& matrix, int phase_bits) {
    if (phase_bits < 1)
        throw std::invalid_argument("quantize_phases: phase_bits must be >= 1");
    const double levels = std::ldexp(1.0, phase_bits);
    const double step = 2.0 * std::numbers::pi / levels;
    Eigen::MatrixXcd out(matrix.rows(), matrix.cols());
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
            // floor(x + 0.5) sends half-step ties toward the larger phase.
            const double k = std::floor(std::arg(matrix(r, c)) / step + 0.5);
            out(r, c) = std::polar(1.0, k * step);
        }
    }
    return out;
}

BeamBank matched_beam_bank(const ArrayGeometry& geom, const std::vector<Angle>& directions) {
    if (directions.empty())
        throw std::invalid_argument("matched_beam_bank: at least one direction required");
    BeamBank bank;
    const double m = static_cast<double>(geom.size());
    for (const Angle& dir : directions) {
        bank.weights.push_back(steering_vector(geom, dir).conjugate() / m);
        bank.labels.push_back(dir);
    }
    return bank;
}

Eigen::MatrixXcd apply_beam_bank(const BeamBank& bank, const Eigen::MatrixXcd& r,
                                 BeamBankStats* stats) {
    validate(bank);
    const Eigen::Index m = bank.weights[0].size();
    if (r.rows() != m)
        throw std::invalid_argument("apply_beam_bank: sample rows must equal weight length");

    const auto b = static_cast<Eigen::Index>(bank.weights.size());
    Eigen::MatrixXcd out(b, r.cols());
    std::size_t macs = 0;
    for (Eigen::Index t = 0; t < r.cols(); ++t) {
        for (Eigen::Index bi = 0; bi < b; ++bi) {
            const Eigen::VectorXcd& w = bank.weights[static_cast<std::size_t>(bi)];
            std::complex<double> acc = 0.0;
            for (Eigen::Index mi = 0; mi < m; ++mi) {
                acc += w(mi) * r(mi, t);
                ++macs;
            }
            out(bi, t) = acc;
        }
    }
    if (stats != nullptr)
        stats->complex_macs = macs;
    return out;
}

std::string beam_bank_to_json(const BeamBank& bank) {
    validate(bank);
    nlohmann::json beams = nlohmann::json::array();
    for (std::size_t b = 0; b < bank.weights.size(); ++b) {
        nlohmann::json weights = nlohmann::json::array();
        for (Eigen::Index i = 0; i < bank.weights[b].size(); ++i)
            weights.push_back(
                {{"re", bank.weights[b](i).real()}, {"im", bank.weights[b](i).imag()}});
        beams.push_back({{"label_az_deg", bank.labels[b].az_deg()},
                         {"label_el_deg", bank.labels[b].el_deg()},
                         {"weights", std::move(weights)}});
    }
    nlohmann::json root = {{"m", bank.weights[0].size()}, {"beams", std::move(beams)}};
    return root.dump(2) + "\n";
}

BeamBank beam_bank_from_json(const std::string& text) {
    const nlohmann::json root = nlohmann::json::parse(text);
    const auto m = root.at("m").get<Eigen::Index>();
    BeamBank bank;
    for (const auto& beam : root.at("beams")) {
        bank.labels.push_back(Angle::from_degrees(beam.at("label_az_deg").get<double>(),
                                                  beam.at("label_el_deg").get<double>()));
        const auto& weights = beam.at("weights");
        Eigen::VectorXcd w(static_cast<Eigen::Index>(weights.size()));
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            const auto& entry = weights[static_cast<std::size_t>(i)];
            w(i) = {entry.at("re").get<double>(), entry.at("im").get<double>()};
        }
        if (w.size() != m)
            throw std::invalid_argument("beam_bank_from_json: weight length does not match m");
        bank.weights.push_back(std::move(w));
    }
    validate(bank);
    return bank;
}

} // namespace beamsim
