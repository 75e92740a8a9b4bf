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

#include "beamsim/modem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "beamsim/dsp.hpp"
#include "beamsim/rng.hpp"

namespace beamsim {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

const std::complex<double> kQpskPoints[4] = {
    {kInvSqrt2, kInvSqrt2},   // 00
    {-kInvSqrt2, kInvSqrt2},  // 01
    {-kInvSqrt2, -kInvSqrt2}, // 11
    {kInvSqrt2, -kInvSqrt2},  // 10
};

std::size_t samples_per_symbol(const SubchannelPlan& plan) {
    const double ratio = plan.sample_rate_hz / plan.symbol_rate_hz;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * rounded || rounded < 1.0)
        throw std::invalid_argument(
            "SubchannelPlan: sample_rate must be an integer multiple of symbol_rate");
    return static_cast<std::size_t>(rounded);
}

void check_bits(const std::vector<std::uint8_t>& bits, const char* what) {
    for (std::uint8_t b : bits)
        if (b > 1)
            throw std::invalid_argument(std::string(what) + ": bits must be 0 or 1");
}

struct CellDecode {
    std::vector<std::complex<double>> symbols;
    double corr_peak = 0.0;
    bool locked = false;
};

/*
 * Down-mix one beam output to baseband for a stream, matched-filter, locate
 * the preamble by normalized cross-correlation, and return the gain-corrected
 * symbol sequence (preamble included).
 */
CellDecode decode_stream(const std::vector<std::complex<double>>& beam_samples,
                         const SubchannelPlan& plan, std::size_t subchannel,
                         const std::vector<std::complex<double>>& preamble_syms,
                         std::size_t total_syms) {
    const std::size_t sps = samples_per_symbol(plan);
    const double offset = plan.offsets_hz[subchannel];
    const double w = -2.0 * std::numbers::pi * offset / plan.sample_rate_hz;

    std::vector<std::complex<double>> base(beam_samples.size());
    for (std::size_t t = 0; t < beam_samples.size(); ++t)
        base[t] = beam_samples[t] * std::polar(1.0, w * static_cast<double>(t));

    const std::vector<double> taps = rrc_taps(kRolloff, kRrcSpanSymbols, sps);
    std::vector<std::complex<double>> taps_c(taps.begin(), taps.end());
    const std::vector<std::complex<double>> z = convolve(base, taps_c);

    // Candidate timing offsets leaving room for every symbol of the frame.
    const std::size_t span = total_syms * sps;
    if (z.size() < span)
        throw std::invalid_argument("decode_stream: block shorter than one frame");
    const std::size_t max_tau = std::min<std::size_t>(z.size() - span, 4096);

    double pre_energy = 0.0;
    for (const auto& p : preamble_syms)
        pre_energy += std::norm(p);

    double best_metric = -1.0;
    std::size_t best_tau = 0;
    std::complex<double> best_corr = 0.0;
    for (std::size_t tau = 0; tau <= max_tau; ++tau) {
        std::complex<double> corr = 0.0;
        double energy = 0.0;
        for (std::size_t i = 0; i < preamble_syms.size(); ++i) {
            const std::complex<double> v = z[tau + i * sps];
            corr += std::conj(preamble_syms[i]) * v;
            energy += std::norm(v);
        }
        const double denom = std::sqrt(pre_energy * energy);
        const double metric = denom > 0.0 ? std::abs(corr) / denom : 0.0;
        if (metric > best_metric) {
            best_metric = metric;
            best_tau = tau;
            best_corr = corr;
        }
    }

    // Least-squares single-tap gain over the preamble at the chosen timing.
    std::complex<double> gain = best_corr / pre_energy;
    if (std::abs(gain) < 1e-30)
        gain = 1.0;

    CellDecode out;
    out.corr_peak = best_metric;
    out.locked = best_metric >= kLockThreshold;
    out.symbols.resize(total_syms);
    for (std::size_t i = 0; i < total_syms; ++i)
        out.symbols[i] = z[best_tau + i * sps] / gain;
    return out;
}

} // namespace

void validate(const SubchannelPlan& plan) {
    if (plan.offsets_hz.empty())
        throw std::invalid_argument("SubchannelPlan: at least one subchannel required");
    if (!(plan.symbol_rate_hz > 0.0) || !(plan.sample_rate_hz > 0.0))
        throw std::invalid_argument("SubchannelPlan: rates must be positive");
    samples_per_symbol(plan);

    double max_abs = 0.0;
    for (double f : plan.offsets_hz)
        max_abs = std::max(max_abs, std::abs(f));
    if (plan.sample_rate_hz < 2.0 * (max_abs + plan.symbol_rate_hz))
        throw std::invalid_argument(
            "SubchannelPlan: sample_rate below twice the highest occupied frequency");

    const double min_sep = plan.symbol_rate_hz * (1.0 + kRolloff);
    for (std::size_t i = 0; i < plan.offsets_hz.size(); ++i)
        for (std::size_t k = i + 1; k < plan.offsets_hz.size(); ++k)
            if (!(std::abs(plan.offsets_hz[i] - plan.offsets_hz[k]) > min_sep))
                throw std::invalid_argument(
                    "SubchannelPlan: offsets closer than symbol_rate * (1 + rolloff)");
}

std::vector<std::complex<double>> qpsk_modulate(const std::vector<std::uint8_t>& bits) {
    if (bits.size() % 2 != 0)
        throw std::invalid_argument("qpsk_modulate: bit count must be even");
    check_bits(bits, "qpsk_modulate");
    std::vector<std::complex<double>> symbols(bits.size() / 2);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const unsigned b0 = bits[2 * i];
        const unsigned b1 = bits[2 * i + 1];
        // Gray index: 00 -> 0, 01 -> 1, 11 -> 2, 10 -> 3.
        const unsigned idx = b0 == 0 ? (b1 == 0 ? 0 : 1) : (b1 == 1 ? 2 : 3);
        symbols[i] = kQpskPoints[idx];
    }
    return symbols;
}

std::vector<std::uint8_t> qpsk_demodulate(const std::vector<std::complex<double>>& symbols) {
    std::vector<std::uint8_t> bits(symbols.size() * 2);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        // I >= 0, Q >= 0 -> 00; I < 0, Q >= 0 -> 01; I < 0, Q < 0 -> 11; else 10.
        const bool ineg = symbols[i].real() < 0.0;
        const bool qneg = symbols[i].imag() < 0.0;
        bits[2 * i] = static_cast<std::uint8_t>(qneg);
        bits[2 * i + 1] = static_cast<std::uint8_t>(ineg);
    }
    return bits;
}

std::vector<std::complex<double>> build_subchannel(
    const std::vector<std::complex<double>>& symbols, const SubchannelPlan& plan,
    std::size_t index) {
    validate(plan);
    if (index >= plan.offsets_hz.size())
        throw std::invalid_argument("build_subchannel: subchannel index out of range");
    if (symbols.empty())
        throw std::invalid_argument("build_subchannel: no symbols");

    const std::size_t sps = samples_per_symbol(plan);
    std::vector<std::complex<double>> train(symbols.size() * sps, 0.0);
    for (std::size_t i = 0; i < symbols.size(); ++i)
        train[i * sps] = symbols[i];

    const std::vector<double> taps = rrc_taps(kRolloff, kRrcSpanSymbols, sps);
    std::vector<std::complex<double>> taps_c(taps.begin(), taps.end());
    std::vector<std::complex<double>> shaped = convolve(train, taps_c);

    const double w = 2.0 * std::numbers::pi * plan.offsets_hz[index] / plan.sample_rate_hz;
    for (std::size_t t = 0; t < shaped.size(); ++t)
        shaped[t] *= std::polar(1.0, w * static_cast<double>(t));
    return shaped;
}

Eigen::MatrixXcd transmit_scene(const std::vector<TxStreamSpec>& specs,
                                const ArrayGeometry& tx_geom, const SubchannelPlan& plan) {
    validate(plan);
    validate(tx_geom);

    std::set<std::size_t> used;
    for (const TxStreamSpec& spec : specs) {
        if (spec.subchannel_index >= plan.offsets_hz.size())
            throw std::invalid_argument("transmit_scene: subchannel index out of range");
        if (!used.insert(spec.subchannel_index).second)
            throw std::invalid_argument("transmit_scene: streams share a subchannel");
    }

    const auto n = static_cast<Eigen::Index>(tx_geom.size());
    const double scale = 1.0 / static_cast<double>(tx_geom.size());

    std::vector<std::vector<std::complex<double>>> waves;
    std::size_t t_max = 0;
    for (const TxStreamSpec& spec : specs) {
        std::vector<std::uint8_t> framed = spec.preamble;
        framed.insert(framed.end(), spec.bits.begin(), spec.bits.end());
        waves.push_back(build_subchannel(qpsk_modulate(framed), plan, spec.subchannel_index));
        t_max = std::max(t_max, waves.back().size());
    }

    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, static_cast<Eigen::Index>(t_max));
    for (std::size_t s = 0; s < specs.size(); ++s) {
        const Eigen::VectorXcd beam = steering_vector(tx_geom, specs[s].direction) * scale;
        for (std::size_t t = 0; t < waves[s].size(); ++t)
            x.col(static_cast<Eigen::Index>(t)) += beam * waves[s][t];
    }
    return x;
}

DecodeGridResult decode_grid(const Eigen::MatrixXcd& r, const BeamBank& bank,
                             const SubchannelPlan& plan,
                             const std::vector<TxStreamSpec>& specs) {
    validate(plan);
    validate(bank);
    if (specs.empty())
        throw std::invalid_argument("decode_grid: at least one stream spec required");

    const Eigen::MatrixXcd beam_out = apply_beam_bank(bank, r);

    DecodeGridResult grid;
    grid.beams = bank.weights.size();
    grid.streams = specs.size();
    grid.cells.resize(grid.beams * grid.streams);

    for (std::size_t b = 0; b < grid.beams; ++b) {
        std::vector<std::complex<double>> beam_samples(static_cast<std::size_t>(beam_out.cols()));
        for (std::size_t t = 0; t < beam_samples.size(); ++t)
            beam_samples[t] = beam_out(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(t));

        for (std::size_t s = 0; s < grid.streams; ++s) {
            const TxStreamSpec& spec = specs[s];
            const std::vector<std::complex<double>> pre_syms = qpsk_modulate(spec.preamble);
            const std::vector<std::complex<double>> pay_syms = qpsk_modulate(spec.bits);
            const std::size_t total = pre_syms.size() + pay_syms.size();

            const CellDecode dec =
                decode_stream(beam_samples, plan, spec.subchannel_index, pre_syms, total);

            std::vector<std::complex<double>> payload(dec.symbols.begin() +
                                                          static_cast<long>(pre_syms.size()),
                                                      dec.symbols.end());
            const std::vector<std::uint8_t> rx_bits = qpsk_demodulate(payload);

            DecodeCell& cell = grid.cells[b * grid.streams + s];
            cell.rx_beam_deg = bank.labels[b].az_deg();
            cell.tx_stream_deg = spec.direction.az_deg();
            cell.subchannel_hz = plan.offsets_hz[spec.subchannel_index];
            cell.locked = dec.locked;
            cell.evm_percent = evm_percent(payload, pay_syms);
            cell.ber = dec.locked ? ber(rx_bits, spec.bits) : 0.5;
            const std::size_t keep = std::min<std::size_t>(payload.size(), 1024);
            cell.constellation.assign(payload.begin(),
                                      payload.begin() + static_cast<long>(keep));
        }
    }
    return grid;
}

SyncBudget sync_trial_count(std::size_t n_directions, SyncMode mode) {
    if (n_directions < 1)
        throw std::invalid_argument("sync_trial_count: n must be >= 1");
    SyncBudget budget;
    budget.mode = mode;
    budget.n_directions = n_directions;
    budget.trials = mode == SyncMode::analog ? n_directions * n_directions : 1;
    return budget;
}

double evm_percent(const std::vector<std::complex<double>>& measured,
                   const std::vector<std::complex<double>>& reference) {
    if (measured.size() != reference.size())
        throw std::invalid_argument("evm_percent: length mismatch");
    if (measured.empty())
        throw std::invalid_argument("evm_percent: empty inputs");
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        err += std::norm(measured[i] - reference[i]);
        ref += std::norm(reference[i]);
    }
    if (ref == 0.0)
        throw std::invalid_argument("evm_percent: zero reference power");
    return 100.0 * std::sqrt(err / ref);
}

double ber(const std::vector<std::uint8_t>& bits, const std::vector<std::uint8_t>& ref_bits) {
    if (bits.size() != ref_bits.size())
        throw std::invalid_argument("ber: length mismatch");
    if (bits.empty())
        throw std::invalid_argument("ber: empty inputs");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        errors += bits[i] != ref_bits[i];
    return static_cast<double>(errors) / static_cast<double>(bits.size());
}

std::vector<std::uint8_t> default_preamble_bits() {
    // Even-length Zadoff-Chu-style phases, snapped to the QPSK constellation.
    // The snapped sequence keeps a sharp 64:16 autocorrelation peak.
    constexpr std::size_t n = 64;
    constexpr int root = 31;
    std::vector<std::complex<double>> syms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = -std::numbers::pi * static_cast<double>(root) *
                             static_cast<double>(i * i) / static_cast<double>(n);
        const std::complex<double> z = std::polar(1.0, phase);
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::max();
        for (std::size_t k = 0; k < 4; ++k) {
            const double d = std::norm(z - kQpskPoints[k]);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        syms[i] = kQpskPoints[best];
    }
    return qpsk_demodulate(syms);
}

std::vector<std::uint8_t> random_bits(std::uint64_t seed, std::size_t count) {
    const Rng rng(seed);
    std::vector<std::uint8_t> bits(count);
    for (std::size_t i = 0; i < count; ++i)
        bits[i] = static_cast<std::uint8_t>(rng.word_at(i) & 1u);
    return bits;
}

std::string decode_grid_to_json(const DecodeGridResult& grid) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t b = 0; b < grid.beams; ++b) {
        for (std::size_t s = 0; s < grid.streams; ++s) {
            const DecodeCell& c = grid.cell(b, s);
            nlohmann::json constellation = nlohmann::json::array();
            const std::size_t keep = std::min<std::size_t>(c.constellation.size(), 1024);
            for (std::size_t i = 0; i < keep; ++i)
                constellation.push_back(
                    {{"re", c.constellation[i].real()}, {"im", c.constellation[i].imag()}});
            cells.push_back({{"rx_beam", b},
                             {"tx_stream", s},
                             {"rx_beam_deg", c.rx_beam_deg},
                             {"tx_stream_deg", c.tx_stream_deg},
                             {"subchannel_hz", c.subchannel_hz},
                             {"evm_percent", c.evm_percent},
                             {"ber", c.ber},
                             {"locked", c.locked},
                             {"constellation", std::move(constellation)}});
        }
    }
    nlohmann::json root = {{"beams", grid.beams}, {"streams", grid.streams}, {"cells", cells}};
    return root.dump(2) + "\n";
}

} // namespace beamsim
