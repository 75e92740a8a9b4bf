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

#include "beamsim/array.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace beamsim {

void validate(const ArrayGeometry& geom) {
    if (geom.element_positions.empty())
        throw std::invalid_argument("ArrayGeometry: at least one element required");
    if (!(geom.carrier_wavelength > 0.0) || !std::isfinite(geom.carrier_wavelength))
        throw std::invalid_argument("ArrayGeometry: carrier_wavelength must be positive");
    for (std::size_t i = 0; i < geom.element_positions.size(); ++i)
        for (std::size_t k = i + 1; k < geom.element_positions.size(); ++k)
            if ((geom.element_positions[i] - geom.element_positions[k]).norm() == 0.0)
                throw std::invalid_argument("ArrayGeometry: duplicate element positions");
}

ArrayGeometry make_ula(std::size_t n, double spacing_m, double wavelength_m) {
    if (n < 1)
        throw std::invalid_argument("make_ula: n must be >= 1");
    if (!(spacing_m > 0.0))
        throw std::invalid_argument("make_ula: spacing must be positive");
    if (!(wavelength_m > 0.0))
        throw std::invalid_argument("make_ula: wavelength must be positive");

    ArrayGeometry geom;
    geom.carrier_wavelength = wavelength_m;
    geom.element_positions.reserve(n);
    const double center = 0.5 * static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = (static_cast<double>(k) - center) * spacing_m;
        geom.element_positions.emplace_back(x, 0.0, 0.0);
    }
    return geom;
}

Eigen::Vector3d unit_direction(const Angle& angle) {
    const double ce = std::cos(angle.el_rad);
    return {ce * std::sin(angle.az_rad), std::sin(angle.el_rad), ce * std::cos(angle.az_rad)};
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, const Angle& angle) {
    validate(geom);
    if (!std::isfinite(angle.az_rad) || !std::isfinite(angle.el_rad))
        throw std::invalid_argument("steering_vector: angle must be finite");

    const Eigen::Vector3d u = unit_direction(angle);
    const double k0 = 2.0 * std::numbers::pi / geom.carrier_wavelength;
    Eigen::VectorXcd a(static_cast<Eigen::Index>(geom.size()));
    for (std::size_t m = 0; m < geom.size(); ++m) {
        const double phase = k0 * u.dot(geom.element_positions[m]);
        a(static_cast<Eigen::Index>(m)) = std::polar(1.0, phase);
    }
    return a;
}

std::complex<double> array_factor(const Eigen::VectorXcd& weights, const ArrayGeometry& geom,
                                  const Angle& angle) {
    if (weights.size() != static_cast<Eigen::Index>(geom.size()))
        throw std::invalid_argument("array_factor: weight length does not match element count");
    const Eigen::VectorXcd a = steering_vector(geom, angle);
    std::complex<double> acc = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k)
        acc += weights(k) * a(k);
    return acc;
}

Beampattern beampattern(const Eigen::VectorXcd& weights, const ArrayGeometry& geom,
                        const std::vector<Angle>& grid, bool normalize) {
    if (grid.empty())
        throw std::invalid_argument("beampattern: angle grid must be non-empty");

    Beampattern out;
    out.angles = grid;
    out.power_db.reserve(grid.size());
    // Magnitudes are floored so perfect nulls stay representable in dB.
    constexpr double floor_mag = 1e-300;
    for (const Angle& angle : grid) {
        const double mag = std::abs(array_factor(weights, geom, angle));
        out.power_db.push_back(20.0 * std::log10(std::max(mag, floor_mag)));
    }
    if (normalize) {
        const double peak = *std::max_element(out.power_db.begin(), out.power_db.end());
        for (double& v : out.power_db)
            v -= peak;
        out.normalized = true;
    }
    return out;
}

std::vector<Angle> default_azimuth_grid() {
    std::vector<Angle> grid;
    grid.reserve(1801);
    for (int i = -900; i <= 900; ++i)
        grid.push_back(Angle::from_degrees(0.1 * static_cast<double>(i), 0.0));
    return grid;
}

std::string format_full(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string beampattern_to_csv(const Beampattern& pattern) {
    std::string out = "azimuth_deg,elevation_deg,power_db\n";
    for (std::size_t i = 0; i < pattern.angles.size(); ++i) {
        out += format_full(pattern.angles[i].az_deg());
        out += ',';
        out += format_full(pattern.angles[i].el_deg());
        out += ',';
        out += format_full(pattern.power_db[i]);
        out += '\n';
    }
    return out;
}

void write_beampattern_csv(const Beampattern& pattern, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open for writing: " + path);
    file << beampattern_to_csv(pattern);
    if (!file)
        throw std::runtime_error("write failed: " + path);
}

} // namespace beamsim
