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

#include "beamsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "beamsim/rng.hpp"

namespace beamsim {

namespace {

// Substream ids for the independent random quantities of one draw.
enum : std::uint64_t {
    kStreamAoaCenters = 0,
    kStreamAodCenters = 1,
    kStreamAoaOffsets = 2,
    kStreamAodOffsets = 3,
    kStreamGains = 4,
    kStreamDelays = 5,
    kStreamNoise = 6,
};

void check_params(const ClusterParams& p) {
    if (p.num_clusters < 1 || p.subpaths_per_cluster < 1)
        throw std::invalid_argument("ClusterParams: C and L must be >= 1");
    if (!(p.angle_spread_rad >= 0.0))
        throw std::invalid_argument("ClusterParams: angle_spread must be >= 0");
    if (!(p.gain_power > 0.0))
        throw std::invalid_argument("ClusterParams: gain_power must be > 0");
}

void check_consistent(const SubpathSet& s) {
    if (s.subpaths.size() != s.num_clusters * s.subpaths_per_cluster)
        throw std::invalid_argument("SubpathSet: subpath count does not equal C*L");
    for (const Subpath& sp : s.subpaths)
        if (!(sp.delay_s >= 0.0))
            throw std::invalid_argument("SubpathSet: negative delay");
}

Eigen::MatrixXcd gaussian_noise(std::size_t m, std::size_t t, double variance,
                                std::uint64_t seed) {
    Eigen::MatrixXcd n(m, t);
    const Rng rng = Rng(seed).substream(kStreamNoise);
    const double scale = std::sqrt(variance);
    for (std::size_t col = 0; col < t; ++col)
        for (std::size_t row = 0; row < m; ++row)
            n(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                scale * rng.complex_gaussian_at(col * m + row);
    return n;
}

} // namespace

SubpathSet draw_subpaths(const ClusterParams& params, double max_delay_s) {
    check_params(params);
    if (!(max_delay_s >= 0.0))
        throw std::invalid_argument("draw_subpaths: max_delay must be >= 0");

    const Rng rng(params.seed);
    const Rng aoa_centers = rng.substream(kStreamAoaCenters);
    const Rng aod_centers = rng.substream(kStreamAodCenters);
    const Rng aoa_offsets = rng.substream(kStreamAoaOffsets);
    const Rng aod_offsets = rng.substream(kStreamAodOffsets);
    const Rng gains = rng.substream(kStreamGains);
    const Rng delays = rng.substream(kStreamDelays);

    SubpathSet out;
    out.num_clusters = params.num_clusters;
    out.subpaths_per_cluster = params.subpaths_per_cluster;
    out.subpaths.reserve(params.num_clusters * params.subpaths_per_cluster);

    const double amp = std::sqrt(params.gain_power);
    for (std::size_t c = 0; c < params.num_clusters; ++c) {
        const double aoa_c = std::numbers::pi * (aoa_centers.uniform_at(c) - 0.5);
        const double aod_c = std::numbers::pi * (aod_centers.uniform_at(c) - 0.5);
        for (std::size_t l = 0; l < params.subpaths_per_cluster; ++l) {
            const std::size_t i = c * params.subpaths_per_cluster + l;
            Subpath sp;
            sp.aoa = Angle{aoa_c + aoa_offsets.laplacian_at(i, params.angle_spread_rad), 0.0};
            sp.aod = Angle{aod_c + aod_offsets.laplacian_at(i, params.angle_spread_rad), 0.0};
            sp.alpha = amp * gains.complex_gaussian_at(i);
            sp.delay_s = max_delay_s * delays.uniform_at(i);
            out.subpaths.push_back(sp);
        }
    }
    return out;
}

ChannelMatrix assemble_narrowband(const SubpathSet& subpaths, const ArrayGeometry& tx,
                                  const ArrayGeometry& rx) {
    check_consistent(subpaths);
    validate(tx);
    validate(rx);

    const auto m = static_cast<Eigen::Index>(rx.size());
    const auto n = static_cast<Eigen::Index>(tx.size());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, n);
    for (const Subpath& sp : subpaths.subpaths) {
        const Eigen::VectorXcd ar = steering_vector(rx, sp.aoa);
        const Eigen::VectorXcd at = steering_vector(tx, sp.aod);
        h.noalias() += sp.alpha * (ar * at.adjoint());
    }
    // sqrt(N*M/(C*L)) against unit-norm response vectors reduces to 1/sqrt(C*L)
    // on the raw steering vectors (norms sqrt(N), sqrt(M)).
    h *= 1.0 / std::sqrt(static_cast<double>(subpaths.subpaths.size()));
    return ChannelMatrix{std::move(h)};
}

TappedChannel assemble_wideband(const SubpathSet& subpaths, const ArrayGeometry& tx,
                                const ArrayGeometry& rx, double sample_rate_hz,
                                std::size_t num_taps) {
    check_consistent(subpaths);
    validate(tx);
    validate(rx);
    if (num_taps < 1)
        throw std::invalid_argument("assemble_wideband: num_taps must be >= 1");
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("assemble_wideband: sample_rate must be positive");

    const auto m = static_cast<Eigen::Index>(rx.size());
    const auto n = static_cast<Eigen::Index>(tx.size());
    TappedChannel out;
    out.sample_rate_hz = sample_rate_hz;
    out.taps.assign(num_taps, Eigen::MatrixXcd::Zero(m, n));

    const double scale = 1.0 / std::sqrt(static_cast<double>(subpaths.subpaths.size()));
    for (const Subpath& sp : subpaths.subpaths) {
        if (sp.delay_s * sample_rate_hz >= static_cast<double>(num_taps))
            throw std::invalid_argument("assemble_wideband: subpath delay exceeds tap span");
        const auto tap = std::min<std::size_t>(
            static_cast<std::size_t>(std::llround(sp.delay_s * sample_rate_hz)), num_taps - 1);
        const Eigen::VectorXcd ar = steering_vector(rx, sp.aoa);
        const Eigen::VectorXcd at = steering_vector(tx, sp.aod);
        out.taps[tap].noalias() += (scale * sp.alpha) * (ar * at.adjoint());
    }
    return out;
}

Eigen::MatrixXcd apply_channel(const ChannelMatrix& ch, const Eigen::MatrixXcd& x,
                               double noise_variance, std::uint64_t seed) {
    if (x.rows() != ch.entries.cols())
        throw std::invalid_argument("apply_channel: input rows do not match channel columns");
    if (!(noise_variance >= 0.0))
        throw std::invalid_argument("apply_channel: noise variance must be >= 0");

    Eigen::MatrixXcd y = ch.entries * x;
    if (noise_variance > 0.0)
        y += gaussian_noise(static_cast<std::size_t>(y.rows()),
                            static_cast<std::size_t>(y.cols()), noise_variance, seed);
    return y;
}

Eigen::MatrixXcd apply_channel(const TappedChannel& ch, const Eigen::MatrixXcd& x,
                               double noise_variance, std::uint64_t seed) {
    if (ch.taps.empty())
        throw std::invalid_argument("apply_channel: tapped channel has no taps");
    for (const auto& tap : ch.taps)
        if (tap.rows() != ch.taps[0].rows() || tap.cols() != ch.taps[0].cols())
            throw std::invalid_argument("apply_channel: taps disagree in shape");
    if (x.rows() != ch.taps[0].cols())
        throw std::invalid_argument("apply_channel: input rows do not match channel columns");
    if (!(noise_variance >= 0.0))
        throw std::invalid_argument("apply_channel: noise variance must be >= 0");

    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(ch.taps[0].rows(), x.cols());
    for (std::size_t d = 0; d < ch.taps.size(); ++d) {
        const auto delay = static_cast<Eigen::Index>(d);
        if (delay >= x.cols())
            break;
        y.rightCols(x.cols() - delay).noalias() += ch.taps[d] * x.leftCols(x.cols() - delay);
    }
    if (noise_variance > 0.0)
        y += gaussian_noise(static_cast<std::size_t>(y.rows()),
                            static_cast<std::size_t>(y.cols()), noise_variance, seed);
    return y;
}

std::string subpaths_to_json(const SubpathSet& set) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Subpath& sp : set.subpaths) {
        arr.push_back({{"alpha_re", sp.alpha.real()},
                       {"alpha_im", sp.alpha.imag()},
                       {"aoa_az_rad", sp.aoa.az_rad},
                       {"aoa_el_rad", sp.aoa.el_rad},
                       {"aod_az_rad", sp.aod.az_rad},
                       {"aod_el_rad", sp.aod.el_rad},
                       {"delay_s", sp.delay_s}});
    }
    return arr.dump(2) + "\n";
}

SubpathSet subpaths_from_json(const std::string& text, std::size_t num_clusters,
                              std::size_t subpaths_per_cluster) {
    const nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array())
        throw std::invalid_argument("subpaths_from_json: top level must be an array");
    SubpathSet out;
    out.num_clusters = num_clusters;
    out.subpaths_per_cluster = subpaths_per_cluster;
    for (const auto& obj : arr) {
        Subpath sp;
        sp.alpha = {obj.at("alpha_re").get<double>(), obj.at("alpha_im").get<double>()};
        sp.aoa = Angle{obj.at("aoa_az_rad").get<double>(), obj.at("aoa_el_rad").get<double>()};
        sp.aod = Angle{obj.at("aod_az_rad").get<double>(), obj.at("aod_el_rad").get<double>()};
        sp.delay_s = obj.at("delay_s").get<double>();
        out.subpaths.push_back(sp);
    }
    check_consistent(out);
    return out;
}

std::string channel_to_csv(const ChannelMatrix& ch) {
    std::string out = "# " + std::to_string(ch.entries.rows()) + " " +
                      std::to_string(ch.entries.cols()) + "\n";
    for (Eigen::Index r = 0; r < ch.entries.rows(); ++r) {
        for (Eigen::Index c = 0; c < ch.entries.cols(); ++c) {
            if (c > 0)
                out += ',';
            out += format_full(ch.entries(r, c).real());
            out += ',';
            out += format_full(ch.entries(r, c).imag());
        }
        out += '\n';
    }
    return out;
}

ChannelMatrix channel_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
        throw std::invalid_argument("channel_from_csv: missing dimension header");
    std::istringstream hdr(line.substr(1));
    Eigen::Index m = 0, n = 0;
    if (!(hdr >> m >> n) || m < 1 || n < 1)
        throw std::invalid_argument("channel_from_csv: malformed dimension header");

    Eigen::MatrixXcd h(m, n);
    for (Eigen::Index r = 0; r < m; ++r) {
        if (!std::getline(in, line))
            throw std::invalid_argument("channel_from_csv: missing row " + std::to_string(r));
        std::istringstream row(line);
        std::string field;
        for (Eigen::Index c = 0; c < n; ++c) {
            double re = 0.0, im = 0.0;
            if (!std::getline(row, field, ','))
                throw std::invalid_argument("channel_from_csv: short row " + std::to_string(r));
            re = std::stod(field);
            if (!std::getline(row, field, ','))
                throw std::invalid_argument("channel_from_csv: short row " + std::to_string(r));
            im = std::stod(field);
            h(r, c) = {re, im};
        }
    }
    return ChannelMatrix{std::move(h)};
}

} // namespace beamsim
