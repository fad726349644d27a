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

#ifndef MAPCSI_TESTS_RAY_MARCH_HPP
#define MAPCSI_TESTS_RAY_MARCH_HPP

// Small-step ray marcher used as an independent reference for the reflection tracer.
// Only mirror reflection is modelled; every wall is treated as a perfect reflector.

#include <cmath>
#include <optional>
#include <vector>

namespace oracle
{
    struct Vec
    {
        double x = 0.0;
        double y = 0.0;
    };

    struct Wall
    {
        Vec a;
        Vec b;
    };

    struct MarchResult
    {
        Vec point;
        int bounces = 0;
    };

    namespace detail
    {
        // Fraction s in (0, 1] along p -> p + v where it meets wall w, if it does
        inline std::optional<double> crossing(Vec p, Vec v, const Wall &w)
        {
            const double ex = w.b.x - w.a.x, ey = w.b.y - w.a.y;
            const double den = v.x * ey - v.y * ex;
            if (std::abs(den) < 1e-300)
                return std::nullopt;
            const double wx = w.a.x - p.x, wy = w.a.y - p.y;
            const double s = (wx * ey - wy * ex) / den;
            const double u = (wx * v.y - wy * v.x) / den;
            if (s <= 1e-12 || s > 1.0 || u < 0.0 || u > 1.0)
                return std::nullopt;
            return s;
        }

        // Keep the component along the wall, flip the rest
        inline Vec mirror(Vec d, const Wall &w)
        {
            const double ex = w.b.x - w.a.x, ey = w.b.y - w.a.y;
            const double len = std::hypot(ex, ey);
            const double tx = ex / len, ty = ey / len;
            const double along = d.x * tx + d.y * ty;
            return {2.0 * along * tx - d.x, 2.0 * along * ty - d.y};
        }
    } // namespace detail

    // Walks `length` meters from `origin` along unit vector `dir` in steps of `step` meters, reflecting
    // whenever a step crosses a wall.
    inline MarchResult march(Vec origin, Vec dir, double length, const std::vector<Wall> &walls, double step = 1e-3)
    {
        MarchResult r;
        Vec p = origin;
        Vec d = dir;
        double left = length;
        int last = -1;
        while (left > 0.0)
        {
            const double h = std::min(step, left);
            const Vec v{d.x * h, d.y * h};
            double best = 2.0;
            int hit = -1;
            for (int i = 0; i < static_cast<int>(walls.size()); ++i)
            {
                if (i == last)
                    continue;
                if (auto s = detail::crossing(p, v, walls[i]); s && *s < best)
                {
                    best = *s;
                    hit = i;
                }
            }
            if (hit < 0)
            {
                p = {p.x + v.x, p.y + v.y};
                left -= h;
                last = -1;
                continue;
            }
            p = {p.x + v.x * best, p.y + v.y * best};
            left -= h * best;
            d = detail::mirror(d, walls[hit]);
            last = hit;
            ++r.bounces;
        }
        r.point = p;
        return r;
    }

} // namespace oracle

#endif
