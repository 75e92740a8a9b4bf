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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamsim/angle.hpp"

namespace beamsim {

/*!\brief Antenna element layout plus the carrier wavelength it operates at.
 *
 * Positions are in meters. The element count doubles as the array dimension
 * (N or M) everywhere a steering vector or weight vector length is needed.
 */
struct ArrayGeometry {
    std::vector<Eigen::Vector3d> element_positions;
    double carrier_wavelength = 0.0;

    std::size_t size() const { return element_positions.size(); }
};

/*!\brief Sampled radiation pattern in dB over an ordered angle grid.*/
struct Beampattern {
    std::vector<Angle> angles;
    std::vector<double> power_db;
    bool normalized = false;
};

/// Throws std::invalid_argument if the geometry violates its invariants
/// (empty, non-positive wavelength, or duplicate element positions).
void validate(const ArrayGeometry& geom);

/// Uniform linear array along the x axis, centered on the origin.
ArrayGeometry make_ula(std::size_t n, double spacing_m, double wavelength_m);

/// Unit propagation direction for an angle:
/// u = (cos(el) sin(az), sin(el), cos(el) cos(az)); broadside is +z.
Eigen::Vector3d unit_direction(const Angle& angle);

/*!\brief Array response (steering) vector.
 *
 * Entry k is exp(+j (2*pi/lambda) <u(angle), p_k>). The receive-side sign
 * convention (+j) is used for both link ends. Entries are unit modulus and
 * the vector is unnormalized, so its Euclidean norm is sqrt(N).
 */
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, const Angle& angle);

/*!\brief Complex array factor sum_k weights[k] * a_k(angle).
 *
 * Bilinear in the stored weights: a beam matched to angle theta0 stores
 * conj(a(theta0)) scaled as desired, and any conjugation is baked into the
 * weights rather than applied here. This one convention is shared by every
 * pattern and beam-bank operation in the library.
 */
std::complex<double> array_factor(const Eigen::VectorXcd& weights, const ArrayGeometry& geom,
                                  const Angle& angle);

/// Evaluate 20*log10|array_factor| over a grid, optionally peak-normalized to 0 dB.
Beampattern beampattern(const Eigen::VectorXcd& weights, const ArrayGeometry& geom,
                        const std::vector<Angle>& grid, bool normalize);

/// Azimuth cut from -90 to +90 degrees in 0.1 degree steps at zero elevation.
std::vector<Angle> default_azimuth_grid();

/// CSV serialization: header `azimuth_deg,elevation_deg,power_db`, one row per
/// grid point, LF line endings, 17 significant digits.
std::string beampattern_to_csv(const Beampattern& pattern);
void write_beampattern_csv(const Beampattern& pattern, const std::string& path);

/// Format a double with 17 significant digits (shared by all CSV writers).
std::string format_full(double value);

} // namespace beamsim
