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
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamsim/angle.hpp"
#include "beamsim/array.hpp"

namespace beamsim {

/*!\brief Cluster channel draw parameters.
 *
 * gain_power is E|alpha|^2 of each subpath gain; angle_spread is the standard
 * deviation of the Laplacian subpath offsets around each cluster center.
 */
struct ClusterParams {
    std::size_t num_clusters = 1;
    std::size_t subpaths_per_cluster = 1;
    double angle_spread_rad = 0.0;
    double gain_power = 1.0;
    std::uint64_t seed = 0;
};

struct Subpath {
    std::complex<double> alpha{0.0, 0.0};
    Angle aoa;
    Angle aod;
    double delay_s = 0.0;
};

/// The C*L subpaths of one channel realization, flat index c*L + l.
struct SubpathSet {
    std::size_t num_clusters = 0;
    std::size_t subpaths_per_cluster = 0;
    std::vector<Subpath> subpaths;
};

/// M x N channel: rows are receive elements, columns transmit elements.
struct ChannelMatrix {
    Eigen::MatrixXcd entries;
};

/// Integer-sample-delay taps sharing one M x N shape.
struct TappedChannel {
    std::vector<Eigen::MatrixXcd> taps;
    double sample_rate_hz = 0.0;
};

/*!\brief Draw a seed-deterministic subpath set.
 *
 * Cluster centers are uniform in azimuth over [-pi/2, pi/2] at zero elevation,
 * independently for arrival and departure. Each subpath offsets its cluster
 * center by a Laplacian azimuth deviate, takes a circularly-symmetric complex
 * Gaussian gain with variance gain_power, and a delay uniform in
 * [0, max_delay_s].
 */
SubpathSet draw_subpaths(const ClusterParams& params, double max_delay_s);

/*!\brief Assemble the narrowband channel from a subpath set.
 *
 * H = sqrt(N*M/(C*L)) * sum alpha * (a_r/sqrt(M)) * (a_t/sqrt(N))^H, i.e. the
 * response vectors enter unit-norm, so E|alpha|^2 = 1 gives E ||H||_F^2 = N*M.
 */
ChannelMatrix assemble_narrowband(const SubpathSet& subpaths, const ArrayGeometry& tx,
                                  const ArrayGeometry& rx);

/*!\brief Tapped wideband extension.
 *
 * Each subpath's rank-1 term lands on tap min(round(delay * fs), num_taps - 1);
 * a delay of num_taps/fs or more is an error. Scaling matches
 * assemble_narrowband, so the taps sum to the narrowband matrix.
 */
TappedChannel assemble_wideband(const SubpathSet& subpaths, const ArrayGeometry& tx,
                                const ArrayGeometry& rx, double sample_rate_hz,
                                std::size_t num_taps);

/*!\brief y = H x + n with white circular complex Gaussian noise.
 *
 * Noise has per-element variance noise_variance and is drawn from a
 * counter-based stream indexed by (column, row), so the output is
 * bit-identical regardless of evaluation order.
 */
Eigen::MatrixXcd apply_channel(const ChannelMatrix& ch, const Eigen::MatrixXcd& x,
                               double noise_variance, std::uint64_t seed);

/// Tapped variant: y[:,t] = sum_d taps[d] x[:,t-d] + n[:,t], zero prehistory.
Eigen::MatrixXcd apply_channel(const TappedChannel& ch, const Eigen::MatrixXcd& x,
                               double noise_variance, std::uint64_t seed);

/// JSON array of {alpha_re, alpha_im, aoa_az_rad, aoa_el_rad, aod_az_rad,
/// aod_el_rad, delay_s} objects.
std::string subpaths_to_json(const SubpathSet& set);
SubpathSet subpaths_from_json(const std::string& text, std::size_t num_clusters,
                              std::size_t subpaths_per_cluster);

/// CSV with a `# M N` header line, then one row per receive element of
/// interleaved re,im values at 17 significant digits.
std::string channel_to_csv(const ChannelMatrix& ch);
ChannelMatrix channel_from_csv(const std::string& text);

} // namespace beamsim
