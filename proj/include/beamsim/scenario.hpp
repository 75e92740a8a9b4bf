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

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "beamsim/ini.hpp"
#include "beamsim/lens.hpp"
#include "beamsim/modem.hpp"
#include "beamsim/rf_frontend.hpp"

namespace beamsim {

/// Output location failure: directory cannot be created or written.
/// The CLI maps this to its own exit code, distinct from config errors.
class OutputError : public std::runtime_error {
  public:
    explicit OutputError(const std::string& what) : std::runtime_error(what) {}
};

enum class Preset {
    beampattern_28,
    lenslet_28,
    link_60,
    calibrate,
    sync_budget,
    channel_stats,
};

std::string preset_name(Preset preset);
Preset preset_from_name(const std::string& name);

struct SweepConfig {
    double start_deg = -90.0;
    double stop_deg = 90.0;
    double step_deg = 0.1;
};

struct FeedsConfig {
    std::size_t count = 4;
    double pitch_m = 0.01;
    int subarray_n = 8;
    double subarray_spacing_m = 0.0;
};

struct BeampatternConfig {
    double carrier_hz = 0.0;
    double wavelength_m = 0.0;
    double sample_rate_hz = 0.0;
    double tone_freq_hz = 0.0;
    std::size_t tone_samples = 0;
    int adc_bits = 12;
    double full_scale = 1.0;
    LensSpec lens;
    FeedsConfig feeds;
    SweepConfig sweep;
    std::vector<ChainImpairment> impairments;
};

struct LensletConfig {
    double carrier_hz = 0.0;
    double wavelength_m = 0.0;
    LensSpec lens;
    FeedsConfig feeds;
    SweepConfig sweep;
    LensletArraySpec lenslet;
    std::string measured_pattern_csv;
};

struct LinkConfig {
    double carrier_hz = 0.0;
    double wavelength_m = 0.0;
    double snr_db = 20.0;
    SubchannelPlan plan;
    std::size_t tx_n = 4;
    std::size_t rx_m = 4;
    double element_spacing_m = 0.0;
    std::vector<double> tx_directions_deg;
    std::vector<double> rx_directions_deg;
    std::size_t payload_bits = 10000;
};

struct CalibrateConfig {
    std::size_t chains = 4;
    double sample_rate_hz = 0.0;
    double tone_freq_hz = 0.0;
    std::size_t tone_samples = 4096;
    double snr_db = 60.0;
    double iq_gain = 1.1;
    double iq_phase_deg = 5.0;
    std::vector<ChainImpairment> impairments;
};

struct SyncConfig {
    std::size_t n = 4;
};

struct ChannelStatsConfig {
    std::size_t tx_n = 4;
    std::size_t rx_m = 4;
    std::size_t clusters = 2;
    std::size_t subpaths = 3;
    double angle_spread_deg = 5.0;
    double gain_power = 1.0;
    double max_delay_s = 0.0;
    std::size_t draws = 10000;
    double carrier_hz = 0.0;
    double wavelength_m = 0.0;
};

using PresetConfig = std::variant<BeampatternConfig, LensletConfig, LinkConfig, CalibrateConfig,
                                  SyncConfig, ChannelStatsConfig>;

/*!\brief Fully resolved run description.
 *
 * All defaults are materialized and all module invariants checked at parse
 * time. canonical_config lists every resolved semantic value as sorted
 * key=value lines; config_hash is its FNV-1a 64 digest, so the hash changes
 * exactly when a semantic value changes.
 */
struct Scenario {
    Preset preset = Preset::sync_budget;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    PresetConfig config;
    std::string canonical_config;
    std::uint64_t config_hash = 0;
};

/// Command-line overrides applied on top of the config file.
struct ScenarioOverrides {
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
};

/// Parse and validate an INI scenario. Unknown keys or sections, missing
/// requirements, and module invariant violations all raise ConfigError with
/// the offending name and line.
Scenario parse_scenario(const std::string& text, const ScenarioOverrides& overrides = {});

struct RunResult {
    std::vector<std::string> artifacts;
    double wall_time_s = 0.0;
};

/// Execute the scenario, writing its artifacts plus manifest.json into
/// scenario.output_dir. Throws OutputError if the directory is unusable and
/// std::runtime_error for runtime numerical failures.
RunResult run(const Scenario& scenario);

/// FNV-1a 64-bit digest of a byte string.
std::uint64_t fnv1a64(const std::string& text);

} // namespace beamsim
