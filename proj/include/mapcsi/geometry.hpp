// SPDX-License-Identifier: Apache-2.0
//
// mapcsi: single-site map-assisted localization from massive-MIMO CSI
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MAPCSI_GEOMETRY_HPP
#define MAPCSI_GEOMETRY_HPP

#include <cmath>

namespace mapcsi
{
    // Planar point / vector in meters (bird-view map coordinates)
    struct Point2
    {
        double x = 0.0;
        double y = 0.0;

        constexpr Point2 operator+(const Point2 &o) const { return {x + o.x, y + o.y}; }
        constexpr Point2 operator-(const Point2 &o) const { return {x - o.x, y - o.y}; }
        constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
        constexpr Point2 operator/(double s) const { return {x / s, y / s}; }
        constexpr Point2 operator-() const { return {-x, -y}; }
        constexpr Point2 &operator+=(const Point2 &o)
        {
            x += o.x;
            y += o.y;
            return *this;
        }
        constexpr bool operator==(const Point2 &) const = default;
    };

    constexpr Point2 operator*(double s, const Point2 &p) { return {s * p.x, s * p.y}; }

    constexpr double dot(const Point2 &a, const Point2 &b) { return a.x * b.x + a.y * b.y; }

    // z-component of the 3D cross product
    constexpr double cross(const Point2 &a, const Point2 &b) { return a.x * b.y - a.y * b.x; }

    inline double norm(const Point2 &a) { return std::hypot(a.x, a.y); }

    inline double distance(const Point2 &a, const Point2 &b) { return norm(a - b); }

    inline Point2 normalized(const Point2 &a)
    {
        const double n = norm(a);
        return {a.x / n, a.y / n};
    }

    inline bool is_finite(const Point2 &a) { return std::isfinite(a.x) && std::isfinite(a.y); }

} // namespace mapcsi

#endif
