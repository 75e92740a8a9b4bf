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

#include "beamsim/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <type_traits>

#include <json.hpp>

#include "beamsim/array.hpp"
#include "beamsim/beamforming.hpp"
#include "beamsim/channel.hpp"
#include "beamsim/dsp.hpp"
#include "beamsim/rng.hpp"

namespace beamsim {

namespace fs = std::filesystem;

namespace {

constexpr double kSpeedOfLight = 299792458.0;

// Seed substream ids reserved by the orchestrator.
enum : std::uint64_t {
    kStreamImpairments = 11,
    kStreamPayload = 20,
    kStreamLinkNoise = 21,
    kStreamCalNoise = 31,
    kStreamIqNoise = 32,
    kStreamDraws = 40,
};

/*
 * Typed reader over IniDoc that materializes defaults and records every
 * resolved semantic value for the canonical config text.
 */
class Resolver {
  public:
    explicit Resolver(IniDoc& doc) : doc_(doc) {}

    double number(const std::string& sec, const std::string& key, double fallback) {
        const double v = doc_.get_double(sec, key, fallback);
        note(sec, key, format_full(v));
        return v;
    }

    std::int64_t integer(const std::string& sec, const std::string& key, std::int64_t fallback) {
        const std::int64_t v = doc_.get_int(sec, key, fallback);
        note(sec, key, std::to_string(v));
        return v;
    }

    std::uint64_t uinteger(const std::string& sec, const std::string& key,
                           std::uint64_t fallback) {
        const std::uint64_t v = doc_.get_uint(sec, key, fallback);
        note(sec, key, std::to_string(v));
        return v;
    }

    std::string text(const std::string& sec, const std::string& key,
                     const std::string& fallback) {
        const std::string v = doc_.get_string(sec, key, fallback);
        note(sec, key, v);
        return v;
    }

    std::vector<double> list(const std::string& sec, const std::string& key,
                             const std::vector<double>& fallback) {
        const std::vector<double> v = doc_.get_double_list(sec, key, fallback);
        std::string joined;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0)
                joined += ',';
            joined += format_full(v[i]);
        }
        note(sec, key, joined);
        return v;
    }

    void note(const std::string& sec, const std::string& key, const std::string& value) {
        canon_[sec + "." + key] = value;
    }

    IniDoc& doc() { return doc_; }

    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : canon_)
            out += k + "=" + v + "\n";
        return out;
    }

  private:
    IniDoc& doc_;
    std::map<std::string, std::string> canon_;
};

[[noreturn]] void config_fail(const std::string& section, int line, const std::string& what) {
    std::string msg = "[" + section + "]";
    if (line > 0)
        msg += " (line " + std::to_string(line) + ")";
    throw ConfigError(msg + ": " + what);
}

template <class F>
void check_section(Resolver& r, const std::string& section, F&& validator) {
    try {
        validator();
    } catch (const std::invalid_argument& e) {
        config_fail(section, r.doc().section_line(section), e.what());
    }
}

std::vector<Eigen::Vector2d> feed_offsets(const FeedsConfig& feeds) {
    std::vector<Eigen::Vector2d> out;
    const double center = 0.5 * static_cast<double>(feeds.count - 1);
    for (std::size_t i = 0; i < feeds.count; ++i)
        out.emplace_back((static_cast<double>(i) - center) * feeds.pitch_m, 0.0);
    return out;
}

std::vector<Angle> sweep_grid(const SweepConfig& sweep) {
    const auto steps =
        static_cast<std::size_t>(std::floor((sweep.stop_deg - sweep.start_deg) / sweep.step_deg +
                                            1e-9));
    std::vector<Angle> grid;
    grid.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        grid.push_back(
            Angle::from_degrees(sweep.start_deg + static_cast<double>(i) * sweep.step_deg, 0.0));
    return grid;
}

SweepConfig load_sweep(Resolver& r) {
    SweepConfig sweep;
    sweep.start_deg = r.number("sweep", "start_deg", -90.0);
    sweep.stop_deg = r.number("sweep", "stop_deg", 90.0);
    sweep.step_deg = r.number("sweep", "step_deg", 0.1);
    if (!(sweep.step_deg > 0.0) || !(sweep.stop_deg > sweep.start_deg))
        config_fail("sweep", r.doc().section_line("sweep"), "need stop > start and step > 0");
    return sweep;
}

LensSpec load_lens(Resolver& r) {
    LensSpec lens;
    lens.radius_m = r.number("lens", "radius_m", 0.05);
    lens.base_length_m = r.number("lens", "base_length_m", 0.057);
    lens.focal_length_m = r.number("lens", "focal_length_m", lens.base_length_m);
    lens.loss_db = r.number("lens", "loss_db", 1.5);
    check_section(r, "lens", [&] { validate(lens); });
    return lens;
}

FeedsConfig load_feeds(Resolver& r, double wavelength_m) {
    FeedsConfig feeds;
    feeds.count = r.uinteger("feeds", "count", 4);
    feeds.pitch_m = r.number("feeds", "pitch_m", 0.01);
    feeds.subarray_n = static_cast<int>(r.integer("feeds", "subarray_n", 8));
    feeds.subarray_spacing_m = r.number("feeds", "subarray_spacing_m", 0.5 * wavelength_m);
    if (feeds.count < 1 || !(feeds.pitch_m > 0.0))
        config_fail("feeds", r.doc().section_line("feeds"), "need count >= 1 and pitch > 0");
    check_section(r, "feeds", [&] {
        FeedLayout layout{feed_offsets(feeds), feeds.subarray_n, feeds.subarray_spacing_m};
        validate(layout);
    });
    return feeds;
}

std::vector<ChainImpairment> load_impairments(Resolver& r, std::size_t chains,
                                              std::uint64_t seed, double default_iq_gain,
                                              double default_iq_phase_deg) {
    // Seeded defaults give every chain a distinct, reproducible mismatch.
    const Rng rng = Rng(seed).substream(kStreamImpairments);
    std::vector<double> gain_default(chains), phase_default(chains);
    std::vector<double> iq_gain_default(chains, default_iq_gain);
    std::vector<double> iq_phase_default(chains, default_iq_phase_deg);
    for (std::size_t k = 0; k < chains; ++k) {
        gain_default[k] = -2.0 + 4.0 * rng.uniform_at(2 * k);
        phase_default[k] = -30.0 + 60.0 * rng.uniform_at(2 * k + 1);
    }

    const std::vector<double> gain = r.list("impairments", "gain_db", gain_default);
    const std::vector<double> phase = r.list("impairments", "phase_deg", phase_default);
    const std::vector<double> iq_gain = r.list("impairments", "iq_gain", iq_gain_default);
    const std::vector<double> iq_phase = r.list("impairments", "iq_phase_deg", iq_phase_default);
    if (gain.size() != chains || phase.size() != chains || iq_gain.size() != chains ||
        iq_phase.size() != chains)
        config_fail("impairments", r.doc().section_line("impairments"),
                    "lists must carry one value per chain");

    std::vector<ChainImpairment> imps(chains);
    for (std::size_t k = 0; k < chains; ++k) {
        imps[k].gain_db = gain[k];
        imps[k].phase_deg = phase[k];
        imps[k].iq_gain = iq_gain[k];
        imps[k].iq_phase_deg = iq_phase[k];
        if (!(imps[k].iq_gain > 0.0))
            config_fail("impairments", r.doc().section_line("impairments"),
                        "iq_gain must be positive");
    }
    return imps;
}

BeampatternConfig load_beampattern(Resolver& r, std::uint64_t seed) {
    BeampatternConfig c;
    c.carrier_hz = r.number("rf", "carrier_hz", 28e9);
    if (!(c.carrier_hz > 0.0))
        config_fail("rf", r.doc().section_line("rf"), "carrier_hz must be positive");
    c.wavelength_m = kSpeedOfLight / c.carrier_hz;
    c.sample_rate_hz = r.number("rf", "sample_rate_hz", 1966.08e6);
    c.tone_freq_hz = r.number("rf", "tone_freq_hz", c.sample_rate_hz / 8.0);
    c.tone_samples = r.uinteger("rf", "tone_samples", 1024);
    c.adc_bits = static_cast<int>(r.integer("rf", "adc_bits", 12));
    c.full_scale = r.number("rf", "full_scale", 1.0);
    if (c.tone_samples < 64)
        config_fail("rf", r.doc().section_line("rf"), "tone_samples must be >= 64");
    if (!(c.sample_rate_hz > 0.0) || !(std::abs(c.tone_freq_hz) < 0.5 * c.sample_rate_hz))
        config_fail("rf", r.doc().section_line("rf"), "tone must sit below Nyquist");
    check_section(r, "rf", [&] { quantize(Eigen::MatrixXcd::Zero(1, 1),
                                          QuantSpec{c.adc_bits, c.full_scale}); });
    c.lens = load_lens(r);
    c.feeds = load_feeds(r, c.wavelength_m);
    c.sweep = load_sweep(r);
    c.impairments = load_impairments(r, c.feeds.count, seed, 1.0, 0.0);
    check_section(r, "feeds", [&] {
        for (const auto& offset : feed_offsets(c.feeds))
            feed_to_beam_angle(offset, c.lens);
    });
    return c;
}

LensletConfig load_lenslet(Resolver& r) {
    LensletConfig c;
    c.carrier_hz = r.number("rf", "carrier_hz", 28e9);
    if (!(c.carrier_hz > 0.0))
        config_fail("rf", r.doc().section_line("rf"), "carrier_hz must be positive");
    c.wavelength_m = kSpeedOfLight / c.carrier_hz;
    c.lens = load_lens(r);
    c.feeds = load_feeds(r, c.wavelength_m);
    c.sweep = load_sweep(r);
    c.lenslet.num_lenses = r.uinteger("lenslet", "count", 4);
    c.lenslet.pitch_m = r.number("lenslet", "pitch_m", 0.10);
    c.measured_pattern_csv = r.text("lenslet", "measured_pattern_csv", "");
    check_section(r, "lenslet", [&] { validate(c.lenslet, c.lens); });
    check_section(r, "feeds", [&] {
        for (const auto& offset : feed_offsets(c.feeds))
            feed_to_beam_angle(offset, c.lens);
    });
    return c;
}

LinkConfig load_link(Resolver& r) {
    LinkConfig c;
    c.carrier_hz = r.number("rf", "carrier_hz", 60e9);
    if (!(c.carrier_hz > 0.0))
        config_fail("rf", r.doc().section_line("rf"), "carrier_hz must be positive");
    c.wavelength_m = kSpeedOfLight / c.carrier_hz;
    c.snr_db = r.number("rf", "snr_db", 20.0);
    c.plan.sample_rate_hz = r.number("plan", "sample_rate_hz", 245.76e6);
    c.plan.symbol_rate_hz = r.number("plan", "symbol_rate_hz", 15.36e6);
    c.plan.offsets_hz =
        r.list("plan", "offsets_hz", {-61.44e6, -30.72e6, 30.72e6, 61.44e6});
    check_section(r, "plan", [&] { validate(c.plan); });

    c.tx_n = r.uinteger("arrays", "tx_n", 4);
    c.rx_m = r.uinteger("arrays", "rx_m", 4);
    c.element_spacing_m = r.number("arrays", "spacing_m", 0.5 * c.wavelength_m);
    check_section(r, "arrays", [&] {
        make_ula(c.tx_n, c.element_spacing_m, c.wavelength_m);
        make_ula(c.rx_m, c.element_spacing_m, c.wavelength_m);
    });

    c.tx_directions_deg = r.list("streams", "directions_deg", {-45.0, -15.0, 15.0, 45.0});
    c.rx_directions_deg = r.list("streams", "rx_directions_deg", c.tx_directions_deg);
    c.payload_bits = r.uinteger("streams", "payload_bits", 10000);
    if (c.tx_directions_deg.empty() ||
        c.tx_directions_deg.size() > c.plan.offsets_hz.size())
        config_fail("streams", r.doc().section_line("streams"),
                    "need 1..S directions, one subchannel each");
    if (c.payload_bits < 2 || c.payload_bits % 2 != 0)
        config_fail("streams", r.doc().section_line("streams"),
                    "payload_bits must be even and >= 2");
    return c;
}

CalibrateConfig load_calibrate(Resolver& r, std::uint64_t seed) {
    CalibrateConfig c;
    c.chains = r.uinteger("rf", "chains", 4);
    c.sample_rate_hz = r.number("rf", "sample_rate_hz", 1966.08e6);
    c.tone_freq_hz = r.number("rf", "tone_freq_hz", c.sample_rate_hz / 8.0);
    c.tone_samples = r.uinteger("rf", "tone_samples", 4096);
    c.snr_db = r.number("rf", "snr_db", 60.0);
    if (c.chains < 1)
        config_fail("rf", r.doc().section_line("rf"), "chains must be >= 1");
    if (c.tone_samples < 64)
        config_fail("rf", r.doc().section_line("rf"), "tone_samples must be >= 64");
    if (!(c.sample_rate_hz > 0.0) || !(std::abs(c.tone_freq_hz) < 0.5 * c.sample_rate_hz))
        config_fail("rf", r.doc().section_line("rf"), "tone must sit below Nyquist");
    c.iq_gain = r.number("iq", "gain", 1.1);
    c.iq_phase_deg = r.number("iq", "phase_deg", 5.0);
    if (!(c.iq_gain > 0.0))
        config_fail("iq", r.doc().section_line("iq"), "gain must be positive");
    c.impairments = load_impairments(r, c.chains, seed, 1.0, 0.0);
    return c;
}

SyncConfig load_sync(Resolver& r) {
    SyncConfig c;
    c.n = r.uinteger("sync", "n", 4);
    if (c.n < 1)
        config_fail("sync", r.doc().section_line("sync"), "n must be >= 1");
    return c;
}

ChannelStatsConfig load_channel_stats(Resolver& r) {
    ChannelStatsConfig c;
    c.tx_n = r.uinteger("channel", "tx_n", 4);
    c.rx_m = r.uinteger("channel", "rx_m", 4);
    c.clusters = r.uinteger("channel", "clusters", 2);
    c.subpaths = r.uinteger("channel", "subpaths_per_cluster", 3);
    c.angle_spread_deg = r.number("channel", "angle_spread_deg", 5.0);
    c.gain_power = r.number("channel", "gain_power", 1.0);
    c.max_delay_s = r.number("channel", "max_delay_s", 0.0);
    c.draws = r.uinteger("channel", "draws", 10000);
    c.carrier_hz = r.number("channel", "carrier_hz", 28e9);
    if (!(c.carrier_hz > 0.0))
        config_fail("channel", r.doc().section_line("channel"), "carrier_hz must be positive");
    c.wavelength_m = kSpeedOfLight / c.carrier_hz;
    if (c.draws < 1)
        config_fail("channel", r.doc().section_line("channel"), "draws must be >= 1");
    check_section(r, "channel", [&] {
        ClusterParams p{c.clusters, c.subpaths,
                        c.angle_spread_deg * std::numbers::pi / 180.0, c.gain_power, 0};
        draw_subpaths(p, c.max_delay_s);
        make_ula(c.tx_n, 0.5 * c.wavelength_m, c.wavelength_m);
        make_ula(c.rx_m, 0.5 * c.wavelength_m, c.wavelength_m);
    });
    return c;
}

void write_text(const fs::path& dir, const std::string& name, const std::string& content,
                std::vector<std::string>* artifacts) {
    const fs::path path = dir / name;
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw OutputError("cannot open for writing: " + path.string());
    file << content;
    file.flush();
    if (!file)
        throw OutputError("write failed: " + path.string());
    if (artifacts != nullptr)
        artifacts->push_back(name);
}

std::string constellation_csv(const std::vector<std::complex<double>>& points) {
    std::string out = "re,im\n";
    for (const auto& p : points) {
        out += format_full(p.real());
        out += ',';
        out += format_full(p.imag());
        out += '\n';
    }
    return out;
}

Eigen::MatrixXcd tone_block(const std::vector<double>& amplitudes, double freq_hz,
                            double sample_rate_hz, std::size_t samples) {
    Eigen::MatrixXcd block(static_cast<Eigen::Index>(amplitudes.size()),
                           static_cast<Eigen::Index>(samples));
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
    for (std::size_t t = 0; t < samples; ++t) {
        const std::complex<double> ph = std::polar(1.0, w * static_cast<double>(t));
        for (std::size_t k = 0; k < amplitudes.size(); ++k)
            block(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
                amplitudes[k] * ph;
    }
    return block;
}

Eigen::MatrixXcd add_noise(const Eigen::MatrixXcd& x, double variance, const Rng& rng) {
    if (variance <= 0.0)
        return x;
    Eigen::MatrixXcd out = x;
    const double scale = std::sqrt(variance);
    for (Eigen::Index t = 0; t < x.cols(); ++t)
        for (Eigen::Index k = 0; k < x.rows(); ++k)
            out(k, t) += scale * rng.complex_gaussian_at(
                                     static_cast<std::uint64_t>(t) *
                                         static_cast<std::uint64_t>(x.rows()) +
                                     static_cast<std::uint64_t>(k));
    return out;
}

void run_beampattern(const Scenario&, const BeampatternConfig& c, const fs::path& dir,
                     std::vector<std::string>* artifacts) {
    const std::vector<Angle> grid = sweep_grid(c.sweep);
    const std::vector<Eigen::Vector2d> offsets = feed_offsets(c.feeds);
    const FeedLayout layout{offsets, c.feeds.subarray_n, c.feeds.subarray_spacing_m};
    const QuantSpec quant{c.adc_bits, c.full_scale};

    std::vector<Beampattern> analytic;
    for (std::size_t f = 0; f < offsets.size(); ++f) {
        analytic.push_back(lens_beampattern(c.lens, layout, offsets[f], c.wavelength_m, grid));
        write_text(dir, "beam_analytic_" + std::to_string(f) + ".csv",
                   beampattern_to_csv(analytic.back()), artifacts);
    }

    // Calibration pass: one shared reference tone through every chain.
    const std::vector<double> ref_amp(offsets.size(), 0.45 * c.full_scale);
    const Eigen::MatrixXcd ref =
        tone_block(ref_amp, c.tone_freq_hz, c.sample_rate_hz, c.tone_samples);
    const Eigen::MatrixXcd ref_rx = quantize(apply_chain_impairments(ref, c.impairments),
                                             quant).samples;
    const CalibrationResult cal =
        estimate_chain_mismatch(ref_rx, c.tone_freq_hz, c.sample_rate_hz);
    write_text(dir, "calibration.json", calibration_to_json(cal), artifacts);

    // Absolute scale: the integrator is referenced to the known injected tone,
    // so chain 0's own gain drops out of the measured patterns.
    std::vector<std::complex<double>> chain0(ref_rx.cols());
    for (Eigen::Index t = 0; t < ref_rx.cols(); ++t)
        chain0[static_cast<std::size_t>(t)] = ref_rx(0, t);
    const std::complex<double> a0 =
        tone_amplitude(chain0, c.tone_freq_hz, c.sample_rate_hz);
    const double absolute_db = 20.0 * std::log10(std::abs(a0) / (0.45 * c.full_scale));

    // Measured sweep: per angle, the per-feed lens gains scale a common tone,
    // the chains impair and digitize it, and a power integrator reads it back.
    double max_db = -1e300;
    for (const Beampattern& p : analytic)
        for (double v : p.power_db)
            max_db = std::max(max_db, v);
    const double amp_scale = 0.45 * c.full_scale / std::pow(10.0, max_db / 20.0);
    const double ref_db = 20.0 * std::log10(amp_scale);

    std::vector<Beampattern> measured(offsets.size());
    for (std::size_t f = 0; f < offsets.size(); ++f) {
        measured[f].angles = grid;
        measured[f].power_db.resize(grid.size());
    }
    std::vector<double> amps(offsets.size());
    for (std::size_t a = 0; a < grid.size(); ++a) {
        for (std::size_t f = 0; f < offsets.size(); ++f)
            amps[f] = amp_scale * std::pow(10.0, analytic[f].power_db[a] / 20.0);
        const Eigen::MatrixXcd clean =
            tone_block(amps, c.tone_freq_hz, c.sample_rate_hz, c.tone_samples);
        const Eigen::MatrixXcd digitized =
            quantize(apply_chain_impairments(clean, c.impairments), quant).samples;
        const Eigen::MatrixXcd aligned = compensate(digitized, cal);
        for (std::size_t f = 0; f < offsets.size(); ++f) {
            const double power =
                aligned.row(static_cast<Eigen::Index>(f)).squaredNorm() /
                static_cast<double>(c.tone_samples);
            measured[f].power_db[a] =
                10.0 * std::log10(std::max(power, 1e-300)) - ref_db - absolute_db;
        }
    }
    for (std::size_t f = 0; f < offsets.size(); ++f)
        write_text(dir, "beam_measured_" + std::to_string(f) + ".csv",
                   beampattern_to_csv(measured[f]), artifacts);
}

void run_lenslet(const Scenario&, const LensletConfig& c, const fs::path& dir,
                 std::vector<std::string>* artifacts) {
    const std::vector<Angle> grid = sweep_grid(c.sweep);
    const std::vector<Eigen::Vector2d> offsets = feed_offsets(c.feeds);
    const FeedLayout layout{offsets, c.feeds.subarray_n, c.feeds.subarray_spacing_m};

    Beampattern measured;
    const bool use_measured = !c.measured_pattern_csv.empty();
    if (use_measured) {
        measured = load_measured_pattern(c.measured_pattern_csv);
        write_text(dir, "element_measured.csv", beampattern_to_csv(measured), artifacts);
    }

    for (std::size_t f = 0; f < offsets.size(); ++f) {
        const Angle steer = feed_to_beam_angle(offsets[f], c.lens);
        Beampattern element;
        if (use_measured) {
            element = measured;
        } else {
            element = lens_beampattern(c.lens, layout, offsets[f], c.wavelength_m, grid);
            write_text(dir, "single_lens_" + std::to_string(f) + ".csv",
                       beampattern_to_csv(element), artifacts);
        }
        const Beampattern composite =
            lenslet_pattern(element, c.lenslet, steer, c.wavelength_m);
        write_text(dir, "composite_" + std::to_string(f) + ".csv",
                   beampattern_to_csv(composite), artifacts);
    }
}

void run_link(const Scenario& sc, const LinkConfig& c, const fs::path& dir,
              std::vector<std::string>* artifacts) {
    const ArrayGeometry tx_geom = make_ula(c.tx_n, c.element_spacing_m, c.wavelength_m);
    const ArrayGeometry rx_geom = make_ula(c.rx_m, c.element_spacing_m, c.wavelength_m);

    std::vector<TxStreamSpec> specs;
    for (std::size_t s = 0; s < c.tx_directions_deg.size(); ++s) {
        TxStreamSpec spec;
        spec.direction = Angle::from_degrees(c.tx_directions_deg[s], 0.0);
        spec.subchannel_index = s;
        spec.preamble = default_preamble_bits();
        spec.bits = random_bits(Rng(sc.seed).substream(kStreamPayload + s).seed(),
                                c.payload_bits);
        specs.push_back(std::move(spec));
    }

    // Line-of-sight channel: one unit-gain subpath per stream direction.
    SubpathSet los;
    los.num_clusters = specs.size();
    los.subpaths_per_cluster = 1;
    for (const TxStreamSpec& spec : specs)
        los.subpaths.push_back(Subpath{{1.0, 0.0}, spec.direction, spec.direction, 0.0});
    const ChannelMatrix h = assemble_narrowband(los, tx_geom, rx_geom);

    const Eigen::MatrixXcd x = transmit_scene(specs, tx_geom, c.plan);
    const Eigen::MatrixXcd clean = h.entries * x;
    const double mean_power =
        clean.squaredNorm() / static_cast<double>(clean.rows() * clean.cols());
    const double noise_variance = mean_power * std::pow(10.0, -c.snr_db / 10.0);
    const Eigen::MatrixXcd y =
        apply_channel(h, x, noise_variance, Rng(sc.seed).substream(kStreamLinkNoise).seed());

    std::vector<Angle> rx_dirs;
    for (double deg : c.rx_directions_deg)
        rx_dirs.push_back(Angle::from_degrees(deg, 0.0));
    const BeamBank bank = matched_beam_bank(rx_geom, rx_dirs);
    const DecodeGridResult grid = decode_grid(y, bank, c.plan, specs);

    write_text(dir, "bank.json", beam_bank_to_json(bank), artifacts);
    write_text(dir, "grid.json", decode_grid_to_json(grid), artifacts);
    for (std::size_t b = 0; b < grid.beams; ++b)
        for (std::size_t s = 0; s < grid.streams; ++s)
            write_text(dir,
                       "constellation_rx" + std::to_string(b) + "_tx" + std::to_string(s) +
                           ".csv",
                       constellation_csv(grid.cell(b, s).constellation), artifacts);

    nlohmann::json budget = {{"carrier_hz", c.carrier_hz},
                             {"external_lo_hz", lo_frequency_for_rf(c.carrier_hz)},
                             {"snr_db", c.snr_db},
                             {"noise_variance", noise_variance},
                             {"mean_rx_element_power", mean_power}};
    write_text(dir, "link_budget.json", budget.dump(2) + "\n", artifacts);
}

void run_calibrate(const Scenario& sc, const CalibrateConfig& c, const fs::path& dir,
                   std::vector<std::string>* artifacts) {
    const double noise_variance = std::pow(10.0, -c.snr_db / 10.0);

    // Chain gain/phase alignment from one shared tone.
    const std::vector<double> amps(c.chains, 1.0);
    const Eigen::MatrixXcd clean =
        tone_block(amps, c.tone_freq_hz, c.sample_rate_hz, c.tone_samples);
    const Eigen::MatrixXcd noisy =
        add_noise(apply_chain_impairments(clean, c.impairments), noise_variance,
                  Rng(sc.seed).substream(kStreamCalNoise));
    const CalibrationResult cal =
        estimate_chain_mismatch(noisy, c.tone_freq_hz, c.sample_rate_hz);
    const Eigen::MatrixXcd aligned = compensate(noisy, cal);
    write_text(dir, "calibration.json", calibration_to_json(cal), artifacts);

    std::string report = "chain,gain_db,phase_deg,correction_re,correction_im,residual_rel\n";
    const double ref_norm = aligned.row(0).norm();
    for (std::size_t k = 0; k < c.chains; ++k) {
        const double resid =
            (aligned.row(static_cast<Eigen::Index>(k)) - aligned.row(0)).norm() /
            (ref_norm > 0.0 ? ref_norm : 1.0);
        report += std::to_string(k) + ',' + format_full(c.impairments[k].gain_db) + ',' +
                  format_full(c.impairments[k].phase_deg) + ',' +
                  format_full(cal.corrections[k].real()) + ',' +
                  format_full(cal.corrections[k].imag()) + ',' + format_full(resid) + '\n';
    }
    write_text(dir, "chain_report.csv", report, artifacts);

    // Single-chain I/Q image calibration demo.
    const double phi_rad = c.iq_phase_deg * std::numbers::pi / 180.0;
    std::vector<std::complex<double>> tone(c.tone_samples);
    const double w = 2.0 * std::numbers::pi * c.tone_freq_hz / c.sample_rate_hz;
    for (std::size_t t = 0; t < tone.size(); ++t)
        tone[t] = 0.9 * std::polar(1.0, w * static_cast<double>(t));
    std::vector<std::complex<double>> skewed = apply_iq_imbalance(tone, c.iq_gain, phi_rad);
    const Rng iq_noise = Rng(sc.seed).substream(kStreamIqNoise);
    if (noise_variance > 0.0) {
        const double scale = std::sqrt(noise_variance);
        for (std::size_t t = 0; t < skewed.size(); ++t)
            skewed[t] += scale * iq_noise.complex_gaussian_at(t);
    }

    auto measured_irr = [&](const std::vector<std::complex<double>>& block) {
        const double p_sig =
            std::norm(tone_amplitude(block, c.tone_freq_hz, c.sample_rate_hz));
        const double p_img =
            std::norm(tone_amplitude(block, -c.tone_freq_hz, c.sample_rate_hz));
        return 10.0 * std::log10(p_sig / std::max(p_img, 1e-300));
    };

    const double irr_before = measured_irr(skewed);
    const IqEstimate est = estimate_iq_imbalance(skewed, c.sample_rate_hz);
    const std::vector<std::complex<double>> fixed =
        compensate_iq(skewed, est.g_hat, est.phi_hat_rad);
    const double irr_after = measured_irr(fixed);

    nlohmann::json iq = {{"g_true", c.iq_gain},
                         {"phi_true_deg", c.iq_phase_deg},
                         {"g_hat", est.g_hat},
                         {"phi_hat_deg", est.phi_hat_rad * 180.0 / std::numbers::pi},
                         {"irr_before_db", irr_before},
                         {"irr_after_db", irr_after},
                         {"model_irr_db", iq_irr_db(c.iq_gain, phi_rad)}};
    write_text(dir, "iq_calibration.json", iq.dump(2) + "\n", artifacts);
}

void run_sync(const Scenario&, const SyncConfig& c, const fs::path& dir,
              std::vector<std::string>* artifacts) {
    const SyncBudget analog = sync_trial_count(c.n, SyncMode::analog);
    const SyncBudget digital = sync_trial_count(c.n, SyncMode::digital);
    nlohmann::json out = {{"n_directions", c.n},
                          {"analog_trials", analog.trials},
                          {"digital_trials", digital.trials}};
    write_text(dir, "sync_budget.json", out.dump(2) + "\n", artifacts);
}

void run_channel_stats(const Scenario& sc, const ChannelStatsConfig& c, const fs::path& dir,
                       std::vector<std::string>* artifacts) {
    const ArrayGeometry tx = make_ula(c.tx_n, 0.5 * c.wavelength_m, c.wavelength_m);
    const ArrayGeometry rx = make_ula(c.rx_m, 0.5 * c.wavelength_m, c.wavelength_m);
    const double nm = static_cast<double>(c.tx_n * c.rx_m);

    ClusterParams params{c.clusters, c.subpaths, c.angle_spread_deg * std::numbers::pi / 180.0,
                         c.gain_power, 0};
    const Rng seeds = Rng(sc.seed).substream(kStreamDraws);

    double sum = 0.0, min_v = 1e300, max_v = -1e300;
    SubpathSet first;
    ChannelMatrix first_h;
    for (std::size_t i = 0; i < c.draws; ++i) {
        params.seed = seeds.word_at(i);
        const SubpathSet set = draw_subpaths(params, c.max_delay_s);
        const ChannelMatrix h = assemble_narrowband(set, tx, rx);
        const double v = h.entries.squaredNorm() / nm;
        sum += v;
        min_v = std::min(min_v, v);
        max_v = std::max(max_v, v);
        if (i == 0) {
            first = set;
            first_h = h;
        }
    }

    nlohmann::json stats = {{"draws", c.draws},
                            {"mean_frob_sq_over_nm", sum / static_cast<double>(c.draws)},
                            {"min_frob_sq_over_nm", min_v},
                            {"max_frob_sq_over_nm", max_v}};
    write_text(dir, "channel_stats.json", stats.dump(2) + "\n", artifacts);
    write_text(dir, "subpaths_example.json", subpaths_to_json(first), artifacts);
    write_text(dir, "channel_example.csv", channel_to_csv(first_h), artifacts);
}

} // namespace

std::string preset_name(Preset preset) {
    switch (preset) {
    case Preset::beampattern_28:
        return "beampattern-28";
    case Preset::lenslet_28:
        return "lenslet-28";
    case Preset::link_60:
        return "link-60";
    case Preset::calibrate:
        return "calibrate";
    case Preset::sync_budget:
        return "sync-budget";
    case Preset::channel_stats:
        return "channel-stats";
    }
    throw std::logic_error("preset_name: unhandled preset");
}

Preset preset_from_name(const std::string& name) {
    if (name == "beampattern-28")
        return Preset::beampattern_28;
    if (name == "lenslet-28")
        return Preset::lenslet_28;
    if (name == "link-60")
        return Preset::link_60;
    if (name == "calibrate")
        return Preset::calibrate;
    if (name == "sync-budget")
        return Preset::sync_budget;
    if (name == "channel-stats")
        return Preset::channel_stats;
    throw ConfigError("unknown preset '" + name + "'");
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

Scenario parse_scenario(const std::string& text, const ScenarioOverrides& overrides) {
    IniDoc doc = IniDoc::parse(text);
    Resolver r(doc);

    const std::string file_preset = doc.get_string("scenario", "preset", "");
    const std::string preset_str =
        overrides.preset.has_value() ? *overrides.preset : file_preset;
    if (preset_str.empty())
        throw ConfigError("scenario.preset is required (file key or --preset)");

    Scenario sc;
    sc.preset = preset_from_name(preset_str);
    sc.seed = doc.require_uint("scenario", "seed");
    if (overrides.seed.has_value())
        sc.seed = *overrides.seed;
    sc.output_dir = doc.get_string("scenario", "output_dir", "out");
    if (overrides.output_dir.has_value())
        sc.output_dir = *overrides.output_dir;

    r.note("scenario", "preset", preset_name(sc.preset));
    r.note("scenario", "seed", std::to_string(sc.seed));

    switch (sc.preset) {
    case Preset::beampattern_28:
        sc.config = load_beampattern(r, sc.seed);
        break;
    case Preset::lenslet_28:
        sc.config = load_lenslet(r);
        break;
    case Preset::link_60:
        sc.config = load_link(r);
        break;
    case Preset::calibrate:
        sc.config = load_calibrate(r, sc.seed);
        break;
    case Preset::sync_budget:
        sc.config = load_sync(r);
        break;
    case Preset::channel_stats:
        sc.config = load_channel_stats(r);
        break;
    }

    doc.reject_unconsumed();
    sc.canonical_config = r.canonical();
    sc.config_hash = fnv1a64(sc.canonical_config);
    return sc;
}

RunResult run(const Scenario& scenario) {
    const auto t0 = std::chrono::steady_clock::now();

    const fs::path dir(scenario.output_dir);
    try {
        fs::create_directories(dir);
    } catch (const fs::filesystem_error& e) {
        throw OutputError("cannot create output directory " + dir.string() + ": " + e.what());
    }
    if (!fs::is_directory(dir))
        throw OutputError("output path is not a directory: " + dir.string());

    RunResult result;
    std::visit(
        [&](const auto& cfg) {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, BeampatternConfig>)
                run_beampattern(scenario, cfg, dir, &result.artifacts);
            else if constexpr (std::is_same_v<T, LensletConfig>)
                run_lenslet(scenario, cfg, dir, &result.artifacts);
            else if constexpr (std::is_same_v<T, LinkConfig>)
                run_link(scenario, cfg, dir, &result.artifacts);
            else if constexpr (std::is_same_v<T, CalibrateConfig>)
                run_calibrate(scenario, cfg, dir, &result.artifacts);
            else if constexpr (std::is_same_v<T, SyncConfig>)
                run_sync(scenario, cfg, dir, &result.artifacts);
            else
                run_channel_stats(scenario, cfg, dir, &result.artifacts);
        },
        scenario.config);

    std::sort(result.artifacts.begin(), result.artifacts.end());
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    char hash_hex[19];
    std::snprintf(hash_hex, sizeof(hash_hex), "0x%016llx",
                  static_cast<unsigned long long>(scenario.config_hash));
    nlohmann::json manifest = {{"preset", preset_name(scenario.preset)},
                               {"seed", scenario.seed},
                               {"config_hash", hash_hex},
                               {"artifacts", result.artifacts},
                               {"wall_time_s", result.wall_time_s}};
    write_text(dir, "manifest.json", manifest.dump(2) + "\n", nullptr);
    return result;
}

} // namespace beamsim
