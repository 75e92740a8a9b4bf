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

#include <cmath>
#include <numbers>

namespace beamsim {

/*!\brief Direction of arrival or departure, stored in radians.
 *
 * Azimuth is measured in the horizontal plane from broadside (+z axis) toward
 * +x; elevation is measured from the horizontal plane toward +y. Broadside is
 * (0, 0). The unit propagation vector used throughout is
 *   u = (cos(el) sin(az), sin(el), cos(el) cos(az)).
 */
struct Angle {
    double az_rad = 0.0;
    double el_rad = 0.0;

    static Angle from_degrees(double az_deg, double el_deg) {
        constexpr double d2r = std::numbers::pi / 180.0;
        return Angle{az_deg * d2r, el_deg * d2r};
    }

    double az_deg() const { return az_rad * 180.0 / std::numbers::pi; }
    double el_deg() const { return el_rad * 180.0 / std::numbers::pi; }
};

} // namespace beamsim
