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

#include "beamsim/lens.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace beamsim {

namespace {

constexpr double kAmplitudeFloor = 1e-300;

double airy_amplitude(double u) {
    // 2 J1(u)/u, an even function with value 1 at u = 0.
    const double au = std::abs(u);
    if (au < 1e-8)
        return 1.0 - au * au / 8.0;
    return 2.0 * std::cyl_bessel_j(1.0, au) / au;
}

double db_of_amplitude(double a) {
    return 20.0 * std::log10(std::max(std::abs(a), kAmplitudeFloor));
}

} // namespace

void validate(const LensSpec& spec) {
    if (!(spec.radius_m > 0.0))
        throw std::invalid_argument("LensSpec: radius must be positive");
    if (!(spec.base_length_m >= 0.0))
        throw std::invalid_argument("LensSpec: base_length must be >= 0");
    if (!(spec.focal_length_m > 0.0))
        throw std::invalid_argument("LensSpec: focal_length must be positive");
    if (!(spec.loss_db >= 0.0))
        throw std::invalid_argument("LensSpec: loss must be >= 0");
}

void validate(const FeedLayout& layout) {
    if (layout.feed_offsets_m.empty())
        throw std::invalid_argument("FeedLayout: at least one feed required");
    if (layout.element_subarray_n < 1)
        throw std::invalid_argument("FeedLayout: subarray size must be >= 1");
    if (layout.element_subarray_n > 1 && !(layout.element_spacing_m > 0.0))
        throw std::invalid_argument("FeedLayout: subarray spacing must be positive");
}

void validate(const LensletArraySpec& spec, const LensSpec& lens) {
    validate(lens);
    if (spec.num_lenses < 1)
        throw std::invalid_argument("LensletArraySpec: num_lenses must be >= 1");
    if (!(spec.pitch_m >= 2.0 * lens.radius_m))
        throw std::invalid_argument("LensletArraySpec: pitch smaller than the lens diameter");
}

double lens_directivity_dbi(const LensSpec& spec, double wavelength_m) {
    validate(spec);
    if (!(wavelength_m > 0.0))
        throw std::invalid_argument("lens_directivity_dbi: wavelength must be positive");
    const double area = std::numbers::pi * spec.radius_m * spec.radius_m;
    return 10.0 * std::log10(4.0 * std::numbers::pi * area / (wavelength_m * wavelength_m)) -
           spec.loss_db;
}

Angle feed_to_beam_angle(const Eigen::Vector2d& offset_m, const LensSpec& spec) {
    validate(spec);
    if (!(offset_m.norm() < spec.focal_length_m))
        throw std::invalid_argument("feed_to_beam_angle: feed offset outside the usable field");
    return Angle{-std::atan(offset_m.x() / spec.focal_length_m),
                 -std::atan(offset_m.y() / spec.focal_length_m)};
}

Beampattern lens_beampattern(const LensSpec& spec, const FeedLayout& layout,
                             const Eigen::Vector2d& feed_offset_m, double wavelength_m,
                             const std::vector<Angle>& grid) {
    validate(spec);
    validate(layout);
    if (!(wavelength_m > 0.0))
        throw std::invalid_argument("lens_beampattern: wavelength must be positive");
    if (grid.empty())
        throw std::invalid_argument("lens_beampattern: angle grid must be non-empty");

    const Angle beam = feed_to_beam_angle(feed_offset_m, spec);
    const Eigen::Vector3d ub = unit_direction(beam);
    const double peak_db = lens_directivity_dbi(spec, wavelength_m);
    const double k_aperture = 2.0 * std::numbers::pi * spec.radius_m / wavelength_m;

    // Vertical series-fed column, normalized to unit gain at its broadside.
    const int n_sub = layout.element_subarray_n;
    std::vector<double> y_pos(static_cast<std::size_t>(n_sub));
    for (int i = 0; i < n_sub; ++i)
        y_pos[static_cast<std::size_t>(i)] =
            (static_cast<double>(i) - 0.5 * (n_sub - 1)) * layout.element_spacing_m;
    const double k0 = 2.0 * std::numbers::pi / wavelength_m;

    Beampattern out;
    out.angles = grid;
    out.power_db.reserve(grid.size());
    for (const Angle& angle : grid) {
        const Eigen::Vector3d u = unit_direction(angle);
        const double cosd = std::clamp(u.dot(ub), -1.0, 1.0);
        const double sind = std::sqrt(std::max(0.0, 1.0 - cosd * cosd));
        const double airy = airy_amplitude(k_aperture * sind);

        std::complex<double> sub = 0.0;
        const double sy = std::sin(angle.el_rad);
        for (double y : y_pos)
            sub += std::polar(1.0, k0 * sy * y);
        const double sub_norm = std::abs(sub) / static_cast<double>(n_sub);

        out.power_db.push_back(peak_db + db_of_amplitude(airy * sub_norm));
    }
    return out;
}

Beampattern lenslet_pattern(const Beampattern& element, const LensletArraySpec& spec,
                            const Angle& steer, double wavelength_m,
                            const std::vector<Angle>* grid) {
    if (element.angles.empty())
        throw std::invalid_argument("lenslet_pattern: element pattern is empty");
    if (spec.num_lenses < 1)
        throw std::invalid_argument("lenslet_pattern: num_lenses must be >= 1");
    if (!(spec.pitch_m > 0.0))
        throw std::invalid_argument("lenslet_pattern: pitch must be positive");

    const ArrayGeometry geom = make_ula(spec.num_lenses, spec.pitch_m, wavelength_m);
    // Unit-modulus matched weights carry an array-factor peak of num_lenses.
    const Eigen::VectorXcd weights = steering_vector(geom, steer).conjugate();

    const std::vector<Angle>& target = (grid != nullptr) ? *grid : element.angles;
    if (target.empty())
        throw std::invalid_argument("lenslet_pattern: requested grid is empty");

    Beampattern out;
    out.angles = target;
    out.power_db.reserve(target.size());

    for (std::size_t idx = 0; idx < target.size(); ++idx) {
        const Angle& angle = target[idx];
        double element_db;
        if (grid == nullptr) {
            element_db = element.power_db[idx];
        } else {
            // dB-domain linear interpolation on the element azimuth grid.
            const double az = angle.az_deg();
            const auto lower = std::lower_bound(
                element.angles.begin(), element.angles.end(), az,
                [](const Angle& a, double v) { return a.az_deg() < v; });
            if (lower == element.angles.end() ||
                (lower == element.angles.begin() && lower->az_deg() > az))
                throw std::invalid_argument(
                    "lenslet_pattern: requested angle outside element pattern coverage");
            const auto hi = static_cast<std::size_t>(lower - element.angles.begin());
            if (element.angles[hi].az_deg() == az) {
                element_db = element.power_db[hi];
            } else {
                const std::size_t lo = hi - 1;
                const double a0 = element.angles[lo].az_deg();
                const double a1 = element.angles[hi].az_deg();
                const double w = (az - a0) / (a1 - a0);
                element_db = (1.0 - w) * element.power_db[lo] + w * element.power_db[hi];
            }
        }
        const double af = std::abs(array_factor(weights, geom, angle));
        out.power_db.push_back(element_db + db_of_amplitude(af));
    }
    return out;
}

Beampattern parse_measured_pattern(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("measured pattern: empty file");
    if (line == "azimuth_deg,elevation_deg,power_db\r")
        line.pop_back();
    if (line != "azimuth_deg,elevation_deg,power_db")
        throw std::runtime_error("measured pattern: line 1: bad header '" + line + "'");

    Beampattern out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string f0, f1, f2;
        if (!std::getline(row, f0, ',') || !std::getline(row, f1, ',') ||
            !std::getline(row, f2))
            throw std::runtime_error("measured pattern: line " + std::to_string(lineno) +
                                     ": expected 3 comma-separated fields");
        double az, el, db;
        try {
            std::size_t used = 0;
            az = std::stod(f0, &used);
            el = std::stod(f1, &used);
            db = std::stod(f2, &used);
        } catch (const std::exception&) {
            throw std::runtime_error("measured pattern: line " + std::to_string(lineno) +
                                     ": non-numeric field");
        }
        if (!std::isfinite(az) || !std::isfinite(el) || !std::isfinite(db))
            throw std::runtime_error("measured pattern: line " + std::to_string(lineno) +
                                     ": non-finite value");
        if (!out.angles.empty() && az <= out.angles.back().az_deg())
            throw std::runtime_error("measured pattern: line " + std::to_string(lineno) +
                                     ": azimuth grid must be strictly increasing");
        out.angles.push_back(Angle::from_degrees(az, el));
        out.power_db.push_back(db);
    }
    if (out.angles.empty())
        throw std::runtime_error("measured pattern: no data rows");
    return out;
}

Beampattern load_measured_pattern(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("measured pattern: cannot open " + path);
    std::ostringstream buf;
    buf << file.rdbuf();
    return parse_measured_pattern(buf.str());
}

} // namespace beamsim
