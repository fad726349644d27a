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

#include "mapcsi/envmap.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace mapcsi
{
    Point2 Surface::normal() const
    {
        const Point2 t = normalized(b - a);
        return {-t.y, t.x};
    }

    void validate(const EnvironmentMap &map)
    {
        if (!is_finite(map.bs))
            throw std::invalid_argument("BS position must be finite.");
        const Aoi &r = map.aoi;
        if (!(r.x_min < r.x_max) || !(r.y_min < r.y_max))
            throw std::invalid_argument("AoI must satisfy x_min < x_max and y_min < y_max.");
        for (const auto &s : map.surfaces)
        {
            if (!is_finite(s.a) || !is_finite(s.b))
                throw std::invalid_argument("Surface endpoints must be finite.");
            if (!(s.length() > 0.0))
                throw std::invalid_argument("Surface has zero length.");
        }
    }

    double TracedBranch::length() const
    {
        double total = 0.0;
        for (std::size_t i = 1; i < vertices.size(); ++i)
            total += distance(vertices[i - 1], vertices[i]);
        return total;
    }

    Point2 aod_direction(double aod)
    {
        return {std::cos(aod), -std::sin(aod)};
    }

    double direction_aod(const Point2 &direction)
    {
        return std::atan2(-direction.y, direction.x);
    }

    std::optional<Hit> nearest_hit(const Point2 &origin, const Point2 &direction, std::span<const Surface> surfaces,
                                   std::optional<std::size_t> exclude)
    {
        std::optional<Hit> best;
        for (std::size_t i = 0; i < surfaces.size(); ++i)
        {
            if (exclude && *exclude == i)
                continue;
            const Surface &s = surfaces[i];
            const Point2 seg = s.b - s.a;
            const double denom = cross(direction, seg);
            if (std::abs(denom) <= 1e-15 * norm(seg))
                continue; // parallel or collinear

            const Point2 ao = s.a - origin;
            const double t = cross(ao, seg) / denom;
            const double u = cross(ao, direction) / denom;
            if (t < kHitEpsilon || u < 0.0 || u > 1.0)
                continue;
            if (!best || t < best->distance)
                best = Hit{i, origin + t * direction, t};
        }
        return best;
    }

    Point2 reflect_direction(const Point2 &direction, const Surface &surface)
    {
        const Point2 n = surface.normal();
        return direction - 2.0 * dot(direction, n) * n;
    }

    Point2 reflect_point(const Point2 &p, const Surface &surface)
    {
        const Point2 n = surface.normal();
        return p - 2.0 * dot(p - surface.a, n) * n;
    }

    namespace
    {
        struct Branch
        {
            Point2 position;
            Point2 direction;
            double remaining = 0.0;
            std::optional<std::size_t> exclude;
            int bounces = 0;
            bool crossed = false;
            std::vector<Point2> vertices;
        };
    } // namespace

    std::vector<TracedBranch> trace_branches(const EnvironmentMap &map, const Point2 &origin, const Point2 &direction,
                                             double budget, std::size_t max_branches)
    {
        if (!(budget >= 0.0) || !std::isfinite(budget))
            throw std::invalid_argument("Trace budget must be finite and non-negative.");
        if (max_branches == 0)
            throw std::invalid_argument("max_branches must be at least 1.");

        std::vector<TracedBranch> out;
        std::deque<Branch> queue;
        queue.push_back({origin, normalized(direction), budget, std::nullopt, 0, false, {origin}});
        std::size_t n_branches = 1;

        // Each pop advances a branch to its next event; split continuations go to the back (breadth-first).
        while (!queue.empty())
        {
            Branch br = std::move(queue.front());
            queue.pop_front();

            const auto hit = br.remaining > 0.0 ? nearest_hit(br.position, br.direction, map.surfaces, br.exclude)
                                                : std::nullopt;
            if (!hit || hit->distance >= br.remaining)
            {
                const Point2 end = br.position + br.remaining * br.direction;
                br.vertices.push_back(end);
                out.push_back({std::move(br.vertices), {end, br.bounces, br.crossed, false}});
                continue;
            }

            br.remaining -= hit->distance;
            br.position = hit->point;
            br.vertices.push_back(hit->point);
            br.exclude = hit->surface;

            const Surface &s = map.surfaces[hit->surface];
            const bool split = s.material == Material::SemiTransparent && n_branches < max_branches;
            if (split)
            {
                Branch through = br;
                through.crossed = true;
                ++n_branches;

                br.direction = normalized(reflect_direction(br.direction, s));
                br.bounces += 1;
                if (br.bounces > kMaxBounces)
                    out.push_back({br.vertices, {br.position, br.bounces, br.crossed, true}});
                else
                    queue.push_back(std::move(br));
                queue.push_back(std::move(through));
                continue;
            }

            br.direction = normalized(reflect_direction(br.direction, s));
            br.bounces += 1;
            if (br.bounces > kMaxBounces)
            {
                out.push_back({std::move(br.vertices), {br.position, br.bounces, br.crossed, true}});
                continue;
            }
            queue.push_front(std::move(br)); // unsplit branch keeps its place in the order
        }
        return out;
    }

    std::vector<RayTerminal> trace_path(const EnvironmentMap &map, double aod, double budget,
                                        std::size_t max_branches)
    {
        auto branches = trace_branches(map, map.bs, aod_direction(aod), budget, max_branches);
        std::vector<RayTerminal> out;
        out.reserve(branches.size());
        for (const auto &b : branches)
            out.push_back(b.terminal);
        return out;
    }

    bool in_aoi(const Point2 &p, const Aoi &aoi)
    {
        return p.x >= aoi.x_min && p.x <= aoi.x_max && p.y >= aoi.y_min && p.y <= aoi.y_max;
    }

    std::vector<std::size_t> segment_crossings(const Point2 &p, const Point2 &q, std::span<const Surface> surfaces)
    {
        std::vector<std::size_t> out;
        const double len = distance(p, q);
        if (len <= 2.0 * kHitEpsilon)
            return out;
        const Point2 dir = (q - p) / len;
        for (std::size_t i = 0; i < surfaces.size(); ++i)
        {
            const Surface &s = surfaces[i];
            const Point2 seg = s.b - s.a;
            const double denom = cross(dir, seg);
            if (std::abs(denom) <= 1e-15 * norm(seg))
                continue;
            const Point2 ao = s.a - p;
            const double t = cross(ao, seg) / denom;
            const double u = cross(ao, dir) / denom;
            if (t > kHitEpsilon && t < len - kHitEpsilon && u >= 0.0 && u <= 1.0)
                out.push_back(i);
        }
        return out;
    }

    bool line_of_sight(const EnvironmentMap &map, const Point2 &user)
    {
        return segment_crossings(map.bs, user, map.surfaces).empty();
    }

    std::string to_string(Material m)
    {
        return m == Material::Reflective ? "reflective" : "semi";
    }

    Material material_from_string(const std::string &s)
    {
        if (s == "reflective")
            return Material::Reflective;
        if (s == "semi")
            return Material::SemiTransparent;
        throw std::invalid_argument("Unknown surface material '" + s + "' (expected \"reflective\" or \"semi\").");
    }

} // namespace mapcsi
