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


#include "mapcsi/harness.hpp"
#include "mapcsi/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

using namespace mapcsi;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch(const std::string &name)
    {
        const auto dir = fs::temp_directory_path() / "mapcsi_io_test";
        fs::create_directories(dir);
        return dir / name;
    }

    CsiMatrix random_csi(const SystemConfig &cfg)
    {
        std::mt19937_64 rng(17);
        std::normal_distribution<double> g;
        CsiMatrix h(cfg.n_t, cfg.n_c);
        for (auto &x : h.data())
            x = {g(rng), g(rng)};
        return h;
    }
} // namespace

TEST_SUITE("io")
{
    TEST_CASE("map JSON round trip")
    {
        const auto m = street_map(ScenarioKind::Mixed);
        const auto path = scratch("map.json");
        io::save_map(path, m);
        const auto back = io::load_map(path);
        CHECK(back.bs == m.bs);
        REQUIRE(back.surfaces.size() == m.surfaces.size());
        for (std::size_t i = 0; i < m.surfaces.size(); ++i)
        {
            CHECK(back.surfaces[i].a == m.surfaces[i].a);
            CHECK(back.surfaces[i].b == m.surfaces[i].b);
            CHECK(back.surfaces[i].material == m.surfaces[i].material);
        }
        CHECK(back.aoi.x_min == m.aoi.x_min);
        CHECK(back.aoi.y_max == m.aoi.y_max);
    }

    TEST_CASE("malformed maps are rejected")
    {
        CHECK_THROWS(io::map_from_json(nlohmann::json::parse(R"({"bs": [0, 0]})")));
        CHECK_THROWS(io::map_from_json(nlohmann::json::parse(R"({"bs": [0], "aoi": [0, 1, 0, 1]})")));
        CHECK_THROWS(io::map_from_json(nlohmann::json::parse(
            R"({"bs": [0, 0], "aoi": [0, 1, 0, 1], "surfaces": [{"a": [1, 1], "b": [1, 1]}]})")));
        CHECK_NOTHROW(io::map_from_json(nlohmann::json::parse(R"({"bs": [0, 0], "aoi": [0, 1, 0, 1]})")));
    }

    TEST_CASE("CSI round trips bit-exactly in both formats")
    {
        SystemConfig cfg;
        cfg.n_t = 6;
        cfg.n_c = 5;
        const auto h = random_csi(cfg);
        for (const char *name : {"h.bin", "h.json"})
        {
            const auto path = scratch(name);
            io::save_csi(path, h, cfg);
            const auto f = io::load_csi(path);
            CHECK(f.h == h);
            CHECK(f.t_s == cfg.t_s);
            CHECK(f.wavelength == cfg.wavelength);
        }
    }

    TEST_CASE("binary CSI layout")
    {
        SystemConfig cfg;
        cfg.n_t = 2;
        cfg.n_c = 3;
        const auto h = random_csi(cfg);
        std::ostringstream os;
        io::write_csi_binary(os, h, cfg);
        const std::string s = os.str();
        CHECK(s.size() == 4 + 4 * 3 + 8 * 2 + 16 * 6);
        CHECK(s.substr(0, 4) == "MCSI");
        std::istringstream bad("NOPE0000");
        CHECK_THROWS(io::read_csi_binary(bad));
        std::istringstream cut(s.substr(0, s.size() - 3));
        CHECK_THROWS(io::read_csi_binary(cut));
    }

    TEST_CASE("config overlay keeps unspecified defaults")
    {
        const auto c = io::config_from_json(nlohmann::json::parse(R"({"n_tt": 120, "k_max": 2, "rel_threshold": 0.2})"));
        CHECK(c.system.n_tt == 120);
        CHECK(c.system.n_cc == 180);
        CHECK(c.pipeline.k_max == 2);
        CHECK(c.pipeline.n_max == 5);
        REQUIRE(c.pipeline.peaks);
        CHECK(c.pipeline.peaks->rel_threshold == 0.2);
        const auto back = io::config_from_json(io::config_to_json(c));
        CHECK(back.system == c.system);
        CHECK(back.pipeline.k_max == 2);
    }

    TEST_CASE("diagnostics carry candidates and the error")
    {
        const auto map = street_map(ScenarioKind::Los);
        const SystemConfig cfg;
        const Point2 user{40.0, 0.0};
        const auto est = localize_csi(synthesize_csi(enumerate_paths(map, user, cfg), cfg), map, cfg, PipelineParams{});
        const auto j = io::diagnostics_to_json(est, &cfg, user);
        CHECK(j["candidates"].size() == est.candidates.size());
        CHECK(j["peaks"].size() == est.peaks.size());
        CHECK(j.contains("labels"));
        CHECK(j["error_m"].get<double>() == doctest::Approx(distance(user, est.estimate)));
    }
}
