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
#include "oracles/ray_march.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace mapcsi;

namespace
{
    EnvironmentMap canyon()
    {
        EnvironmentMap m;
        m.bs = {0.0, 10.0};
        m.surfaces = {{{-50.0, 10.0}, {150.0, 10.0}, Material::Reflective},
                      {{-50.0, -10.0}, {150.0, -10.0}, Material::Reflective}};
        m.aoi = {10.0, 100.0, -2.0, 2.0};
        return m;
    }

    std::vector<oracle::Wall> walls_of(const EnvironmentMap &m)
    {
        std::vector<oracle::Wall> w;
        for (const auto &s : m.surfaces)
            w.push_back({{s.a.x, s.a.y}, {s.b.x, s.b.y}});
        return w;
    }
} // namespace

TEST_SUITE("envmap")
{
    TEST_CASE("nearest_hit finds the wall straight ahead")
    {
        const std::vector<Surface> s{{{-50.0, 10.0}, {150.0, 10.0}, Material::Reflective}};
        const auto h = nearest_hit({0.0, 0.0}, {0.0, 1.0}, s);
        REQUIRE(h);
        CHECK(h->point.x == doctest::Approx(0.0));
        CHECK(h->point.y == doctest::Approx(10.0));
        CHECK(h->distance == doctest::Approx(10.0));
    }

    TEST_CASE("nearest_hit skips the excluded departure surface")
    {
        const auto m = canyon();
        const auto h = nearest_hit({0.0, 10.0}, {0.0, -1.0}, m.surfaces, 0);
        REQUIRE(h);
        CHECK(h->surface == 1);
        CHECK(h->point.y == doctest::Approx(-10.0));
        CHECK(h->distance == doctest::Approx(20.0));
    }

    TEST_CASE("nearest_hit ignores parallel rays and hits behind the origin")
    {
        const std::vector<Surface> s{{{-5.0, 1.0}, {5.0, 1.0}, Material::Reflective}};
        CHECK_FALSE(nearest_hit({0.0, 0.0}, {1.0, 0.0}, s));
        CHECK_FALSE(nearest_hit({0.0, 0.0}, {0.0, -1.0}, s));
        CHECK_FALSE(nearest_hit({0.0, 1.0 - 1e-12}, {0.0, 1.0}, s)); // closer than the hit epsilon
    }

    TEST_CASE("reflect_direction mirrors across the surface")
    {
        const Surface wall{{-1.0, 0.0}, {1.0, 0.0}, Material::Reflective};
        const Point2 r = reflect_direction({0.6, 0.8}, wall);
        CHECK(r.x == doctest::Approx(0.6));
        CHECK(r.y == doctest::Approx(-0.8));
        const Point2 img = reflect_point({40.0, 0.0}, {{0.0, -10.0}, {1.0, -10.0}, Material::Reflective});
        CHECK(img.y == doctest::Approx(-20.0));
    }

    TEST_CASE("aod_direction points into the lower half-plane")
    {
        const Point2 d = aod_direction(std::numbers::pi / 2);
        CHECK(d.x == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(d.y == doctest::Approx(-1.0));
        for (double a : {0.1, 0.7, 1.5, 2.9})
            CHECK(direction_aod(aod_direction(a)) == doctest::Approx(a));
    }

    TEST_CASE("trace_path bounces once off the far wall")
    {
        const auto t = trace_path(canyon(), std::numbers::pi / 2, 25.0);
        REQUIRE(t.size() == 1);
        CHECK(t[0].point.x == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(t[0].point.y == doctest::Approx(-5.0));
        CHECK(t[0].bounces == 1);
        CHECK_FALSE(t[0].attenuation_branch);
    }

    TEST_CASE("trace_path with zero budget stays at the BS; negative budgets are rejected")
    {
        const auto t = trace_path(canyon(), 1.0, 0.0);
        REQUIRE(t.size() == 1);
        CHECK(t[0].point == Point2{0.0, 10.0});
        CHECK_THROWS_AS(trace_path(canyon(), 1.0, -1.0), std::invalid_argument);
    }

    TEST_CASE("a semi-transparent surface splits the ray in two")
    {
        auto m = canyon();
        m.surfaces.push_back({{-5.0, 5.0}, {5.0, 5.0}, Material::SemiTransparent});
        const auto t = trace_path(m, std::numbers::pi / 2, 12.0);
        REQUIRE(t.size() == 2);
        int through = 0;
        for (const auto &r : t)
        {
            through += r.attenuation_branch;
            if (r.attenuation_branch)
                CHECK(r.point.y == doctest::Approx(-2.0));
            else
                CHECK(r.point.y == doctest::Approx(8.0)); // 5 m down, 5 m back up, 2 m down again
        }
        CHECK(through == 1);
    }

    TEST_CASE("branch count never exceeds the cap")
    {
        auto m = canyon();
        for (int i = 0; i < 6; ++i)
            m.surfaces.push_back({{-5.0, 8.0 - 3.0 * i}, {5.0, 8.0 - 3.0 * i}, Material::SemiTransparent});
        for (std::size_t cap : {1u, 2u, 4u, 8u})
        {
            const auto t = trace_path(m, std::numbers::pi / 2, 80.0, cap);
            CHECK(t.size() <= cap);
            CHECK(t.size() >= 1);
        }
    }

    TEST_CASE("traced branch length equals the budget")
    {
        auto m = canyon();
        m.surfaces.push_back({{0.0, 4.0}, {30.0, 4.0}, Material::SemiTransparent});
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> aod(0.2, 2.9), budget(1.0, 120.0);
        for (int i = 0; i < 200; ++i)
        {
            const double b = budget(rng);
            for (const auto &br : trace_branches(m, m.bs, aod_direction(aod(rng)), b))
                if (!br.terminal.truncated)
                    CHECK(br.length() == doctest::Approx(b).epsilon(1e-9));
        }
    }

    TEST_CASE("trace_path agrees with a millimetre ray march in the canyon")
    {
        const auto m = canyon();
        const auto walls = walls_of(m);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> aod(0.05, std::numbers::pi - 0.05), budget(0.0, 150.0);
        for (int i = 0; i < 100; ++i)
        {
            const double a = aod(rng), b = budget(rng);
            const auto t = trace_path(m, a, b);
            REQUIRE(t.size() == 1);
            const Point2 d = aod_direction(a);
            const auto ref = oracle::march({m.bs.x, m.bs.y}, {d.x, d.y}, b, walls);
            if (t[0].truncated)
                continue;
            CHECK(std::hypot(t[0].point.x - ref.point.x, t[0].point.y - ref.point.y) < 5e-3);
            CHECK(t[0].bounces == ref.bounces);
        }
    }

    TEST_CASE("AoI membership is closed and LOS sees through nothing")
    {
        const auto m = canyon();
        CHECK(in_aoi({10.0, -2.0}, m.aoi));
        CHECK_FALSE(in_aoi({9.999, 0.0}, m.aoi));
        CHECK(line_of_sight(m, {40.0, 0.0}));
        auto blocked = m;
        blocked.surfaces.push_back({{10.0, 5.0}, {30.0, 5.0}, Material::SemiTransparent});
        CHECK_FALSE(line_of_sight(blocked, {20.0, 0.0}));
        CHECK(segment_crossings(blocked.bs, {20.0, 0.0}, blocked.surfaces).size() == 1);
    }

    TEST_CASE("map validation")
    {
        auto m = canyon();
        CHECK_NOTHROW(validate(m));
        m.surfaces.push_back({{1.0, 1.0}, {1.0, 1.0}, Material::Reflective});
        CHECK_THROWS_AS(validate(m), std::invalid_argument);
        auto bad_aoi = canyon();
        bad_aoi.aoi = {5.0, 5.0, 0.0, 1.0};
        CHECK_THROWS_AS(validate(bad_aoi), std::invalid_argument);
        CHECK(material_from_string(to_string(Material::SemiTransparent)) == Material::SemiTransparent);
        CHECK_THROWS(material_from_string("glass"));
    }
}
