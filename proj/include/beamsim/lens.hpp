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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamsim/angle.hpp"
#include "beamsim/array.hpp"

namespace beamsim {

/*!\brief Dielectric lens treated as an ideal circular aperture.
 *
 * loss_db absorbs material and spillover losses as a flat gain deficit.
 * focal_length locates the feed plane behind the lens.
 */
struct LensSpec {
    double radius_m = 0.0;
    double base_length_m = 0.0;
    double focal_length_m = 0.0;
    double loss_db = 0.0;
};

/*!\brief Feed antennas on the focal plane.
 *
 * Each offset is (x, y) meters from the lens axis. Every feed is an
 * element_subarray_n-element vertical series-fed column at element_spacing_m,
 * which narrows the beam in elevation only.
 */
struct FeedLayout {
    std::vector<Eigen::Vector2d> feed_offsets_m;
    int element_subarray_n = 1;
    double element_spacing_m = 0.0;
};

/// Several identical lens+feed units phased together at a fixed pitch.
struct LensletArraySpec {
    std::size_t num_lenses = 1;
    double pitch_m = 0.0;
};

void validate(const LensSpec& spec);
void validate(const FeedLayout& layout);
/// pitch must be at least the lens diameter, or the units would overlap.
void validate(const LensletArraySpec& spec, const LensSpec& lens);

/// Boresight directivity of the uniform circular aperture minus loss_db:
/// 10 log10(4 pi * (pi r^2) / lambda^2) - loss_db.
double lens_directivity_dbi(const LensSpec& spec, double wavelength_m);

/*!\brief Beam direction produced by a displaced focal-plane feed.
 *
 * azimuth = -atan(offset_x / focal_length), elevation = -atan(offset_y / f).
 * Offsets at or beyond the focal length are outside the usable field.
 */
Angle feed_to_beam_angle(const Eigen::Vector2d& offset_m, const LensSpec& spec);

/*!\brief Analytic lens+feed pattern over a grid, absolute dBi.
 *
 * Airy aperture pattern 2 J1(u)/u with u = (2 pi r / lambda) sin(delta),
 * delta the angle off the feed's beam direction, peaking at
 * lens_directivity_dbi; multiplied by the normalized elevation factor of the
 * feed's series-fed column.
 */
Beampattern lens_beampattern(const LensSpec& spec, const FeedLayout& layout,
                             const Eigen::Vector2d& feed_offset_m, double wavelength_m,
                             const std::vector<Angle>& grid);

/*!\brief Composite lenslet pattern: element pattern plus array factor in dB.
 *
 * The array factor is a matched (conjugate) beam of num_lenses elements at the
 * lenslet pitch steered to `steer`, carrying a peak of 20 log10(num_lenses).
 * With grid = nullptr the element pattern's own grid is used; otherwise element
 * values are linearly interpolated in dB and the element grid must cover the
 * requested azimuths.
 */
Beampattern lenslet_pattern(const Beampattern& element, const LensletArraySpec& spec,
                            const Angle& steer, double wavelength_m,
                            const std::vector<Angle>* grid = nullptr);

/// Parse a Beampattern CSV (array-core format); errors name the line number.
Beampattern load_measured_pattern(const std::string& path);
Beampattern parse_measured_pattern(const std::string& text);

} // namespace beamsim
