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

#ifndef MAPCSI_ENVMAP_HPP
#define MAPCSI_ENVMAP_HPP

#include "mapcsi/geometry.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mapcsi
{
    // Intersections closer than this to the ray origin are ignored
    inline constexpr double kHitEpsilon = 1e-9;

    inline constexpr std::size_t kDefaultMaxBranches = 8;
    inline constexpr int kMaxBounces = 10;

    enum class Material
    {
        Reflective,     // building wall: specular mirror
        SemiTransparent // bus: ray both reflects and continues above it
    };

    struct Surface
    {
        Point2 a;
        Point2 b;
        Material material = Material::Reflective;

        double length() const { return distance(a, b); }

        // Unit normal (left of a->b)
        Point2 normal() const;
    };

    // Closed axis-aligned box enclosing all user positions
    struct Aoi
    {
        double x_min = 0.0;
        double x_max = 0.0;
        double y_min = 0.0;
        double y_max = 0.0;
    };

    struct EnvironmentMap
    {
        Point2 bs;
        std::vector<Surface> surfaces;
        Aoi aoi;
    };

    // Throws std::invalid_argument on zero-length surfaces, non-finite coordinates or an empty AoI
    void validate(const EnvironmentMap &map);

    struct Hit
    {
        std::size_t surface = 0;
        Point2 point;
        double distance = 0.0;
    };

    struct RayTerminal
    {
        Point2 point;
        int bounces = 0;
        bool attenuation_branch = false; // at least one pass-through of a SemiTransparent surface
        bool truncated = false;          // stopped at kMaxBounces before spending the budget
    };

    // A traced branch with every vertex (origin, hit points, terminal) for inspection
    struct TracedBranch
    {
        std::vector<Point2> vertices;
        RayTerminal terminal;

        double length() const;
    };

    // Physical launch direction for an ADP angle: the ULA lies on the x-axis and rays depart into the
    // lower half-plane, so theta in [0, pi] maps to (cos theta, -sin theta).
    Point2 aod_direction(double aod);

    // Inverse of aod_direction for any non-zero vector; returns a value in (-pi, pi]
    double direction_aod(const Point2 &direction);

    std::optional<Hit> nearest_hit(const Point2 &origin, const Point2 &direction, std::span<const Surface> surfaces,
                                   std::optional<std::size_t> exclude = std::nullopt);

    Point2 reflect_direction(const Point2 &direction, const Surface &surface);

    // Mirror image of a point across the infinite line through the surface
    Point2 reflect_point(const Point2 &p, const Surface &surface);

    // Recursive specular trace from map.bs. SemiTransparent hits split the ray into a reflected and a
    // pass-through continuation; once max_branches branches exist, further splits keep only the reflection.
    std::vector<RayTerminal> trace_path(const EnvironmentMap &map, double aod, double budget,
                                        std::size_t max_branches = kDefaultMaxBranches);

    std::vector<TracedBranch> trace_branches(const EnvironmentMap &map, const Point2 &origin, const Point2 &direction,
                                             double budget, std::size_t max_branches = kDefaultMaxBranches);

    bool in_aoi(const Point2 &p, const Aoi &aoi);

    // Surfaces crossed by the open segment p -> q (endpoint touches within kHitEpsilon are ignored)
    std::vector<std::size_t> segment_crossings(const Point2 &p, const Point2 &q, std::span<const Surface> surfaces);

    // True if no surface of any material lies across the BS-user segment
    bool line_of_sight(const EnvironmentMap &map, const Point2 &user);

    std::string to_string(Material m);
    Material material_from_string(const std::string &s);

} // namespace mapcsi

#endif
