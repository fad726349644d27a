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

#include "mapcsi/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mapcsi::io
{
    using nlohmann::json;

    namespace
    {
        Point2 point_from(const json &j, const char *what)
        {
            if (!j.is_array() || j.size() != 2)
                throw std::invalid_argument(std::string(what) + " must be a [x, y] array.");
            return {j[0].get<double>(), j[1].get<double>()};
        }

        json point_to(const Point2 &p) { return json::array({p.x, p.y}); }
    } // namespace

    json map_to_json(const EnvironmentMap &map)
    {
        json j;
        j["bs"] = point_to(map.bs);
        j["aoi"] = json::array({map.aoi.x_min, map.aoi.x_max, map.aoi.y_min, map.aoi.y_max});
        j["surfaces"] = json::array();
        for (const auto &s : map.surfaces)
            j["surfaces"].push_back({{"a", point_to(s.a)}, {"b", point_to(s.b)}, {"material", to_string(s.material)}});
        return j;
    }

    EnvironmentMap map_from_json(const json &j)
    {
        EnvironmentMap m;
        m.bs = point_from(j.at("bs"), "bs");
        const auto &a = j.at("aoi");
        if (!a.is_array() || a.size() != 4)
            throw std::invalid_argument("aoi must be [x_min, x_max, y_min, y_max].");
        m.aoi = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>()};
        if (j.contains("surfaces"))
            for (const auto &s : j.at("surfaces"))
            {
                Surface surf;
                surf.a = point_from(s.at("a"), "surface a");
                surf.b = point_from(s.at("b"), "surface b");
                surf.material = material_from_string(s.value("material", std::string("reflective")));
                m.surfaces.push_back(surf);
            }
        validate(m);
        return m;
    }

    json read_json(const std::filesystem::path &path)
    {
        std::ifstream f(path);
        if (!f)
            throw std::runtime_error("Cannot open " + path.string());
        return json::parse(f);
    }

    EnvironmentMap load_map(const std::filesystem::path &path)
    {
        return map_from_json(read_json(path));
    }

    void save_map(const std::filesystem::path &path, const EnvironmentMap &map)
    {
        std::ofstream f(path);
        if (!f)
            throw std::runtime_error("Cannot write " + path.string());
        f << map_to_json(map).dump(2) << '\n';
    }

    json csi_to_json(const CsiMatrix &h, const SystemConfig &cfg)
    {
        json j;
        j["n_t"] = h.rows();
        j["n_c"] = h.cols();
        j["t_s"] = cfg.t_s;
        j["wavelength"] = cfg.wavelength;
        json e = json::array();
        for (const auto &v : h.data())
            e.push_back(json::array({v.real(), v.imag()}));
        j["entries"] = std::move(e);
        return j;
    }

    CsiFile csi_from_json(const json &j)
    {
        CsiFile f;
        const auto nt = j.at("n_t").get<std::size_t>();
        const auto nc = j.at("n_c").get<std::size_t>();
        f.t_s = j.at("t_s").get<double>();
        f.wavelength = j.at("wavelength").get<double>();
        const auto &e = j.at("entries");
        if (e.size() != nt * nc)
            throw std::invalid_argument("CSI entry count does not match n_t * n_c.");
        f.h = CsiMatrix(nt, nc);
        auto d = f.h.data();
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = {e[i].at(0).get<double>(), e[i].at(1).get<double>()};
        return f;
    }

    namespace
    {
        constexpr std::array<char, 4> kMagic{'M', 'C', 'S', 'I'};
        constexpr std::uint32_t kVersion = 1;

        static_assert(std::endian::native == std::endian::little, "binary CSI I/O assumes a little-endian host");

        template <typename T>
        void put(std::ostream &os, T v)
        {
            char buf[sizeof(T)];
            std::memcpy(buf, &v, sizeof(T));
            os.write(buf, sizeof(T));
        }

        template <typename T>
        T get(std::istream &is)
        {
            char buf[sizeof(T)];
            if (!is.read(buf, sizeof(T)))
                throw std::runtime_error("Truncated CSI file.");
            T v;
            std::memcpy(&v, buf, sizeof(T));
            return v;
        }
    } // namespace

    void write_csi_binary(std::ostream &os, const CsiMatrix &h, const SystemConfig &cfg)
    {
        os.write(kMagic.data(), kMagic.size());
        put<std::uint32_t>(os, kVersion);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(h.rows()));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(h.cols()));
        put<double>(os, cfg.t_s);
        put<double>(os, cfg.wavelength);
        for (const auto &v : h.data())
        {
            put<double>(os, v.real());
            put<double>(os, v.imag());
        }
    }

    CsiFile read_csi_binary(std::istream &is)
    {
        std::array<char, 4> magic{};
        if (!is.read(magic.data(), magic.size()) || magic != kMagic)
            throw std::runtime_error("Not a CSI file (bad magic).");
        if (get<std::uint32_t>(is) != kVersion)
            throw std::runtime_error("Unsupported CSI file version.");
        const auto nt = get<std::uint32_t>(is);
        const auto nc = get<std::uint32_t>(is);
        CsiFile f;
        f.t_s = get<double>(is);
        f.wavelength = get<double>(is);
        f.h = CsiMatrix(nt, nc);
        for (auto &v : f.h.data())
        {
            const double re = get<double>(is);
            const double im = get<double>(is);
            v = {re, im};
        }
        return f;
    }

    void save_csi(const std::filesystem::path &path, const CsiMatrix &h, const SystemConfig &cfg)
    {
        if (path.extension() == ".json")
        {
            std::ofstream f(path);
            if (!f)
                throw std::runtime_error("Cannot write " + path.string());
            f << csi_to_json(h, cfg).dump() << '\n';
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("Cannot write " + path.string());
        write_csi_binary(f, h, cfg);
    }

    CsiFile load_csi(const std::filesystem::path &path)
    {
        if (path.extension() == ".json")
            return csi_from_json(read_json(path));
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("Cannot open " + path.string());
        return read_csi_binary(f);
    }

    RunConfig config_from_json(const json &j, RunConfig c)
    {
        auto take = [&](const char *key, auto &dst) {
            if (j.contains(key))
                dst = j.at(key).get<std::decay_t<decltype(dst)>>();
        };
        take("n_t", c.system.n_t);
        take("n_c", c.system.n_c);
        take("n_tt", c.system.n_tt);
        take("n_cc", c.system.n_cc);
        take("t_s", c.system.t_s);
        if (j.contains("wavelength"))
        {
            c.system.wavelength = j.at("wavelength").get<double>();
            c.system.spacing = c.system.wavelength / 2.0;
        }
        take("n_max", c.pipeline.n_max);
        take("i_max", c.pipeline.i_max);
        take("k_max", c.pipeline.k_max);
        take("d_th", c.pipeline.d_th);
        take("max_branches", c.pipeline.max_branches);
        take("seed", c.pipeline.seed);
        take("max_order", c.max_order);
        if (j.contains("suppress_a") || j.contains("suppress_d") || j.contains("rel_threshold"))
        {
            PeakParams p = c.pipeline.peaks.value_or(PeakParams::scaled_for(c.system));
            take("suppress_a", p.suppress_a);
            take("suppress_d", p.suppress_d);
            take("rel_threshold", p.rel_threshold);
            c.pipeline.peaks = p;
        }
        return c;
    }

    json config_to_json(const RunConfig &c)
    {
        json j{{"n_t", c.system.n_t},        {"n_c", c.system.n_c},
               {"n_tt", c.system.n_tt},      {"n_cc", c.system.n_cc},
               {"t_s", c.system.t_s},        {"wavelength", c.system.wavelength},
               {"n_max", c.pipeline.n_max},  {"i_max", c.pipeline.i_max},
               {"k_max", c.pipeline.k_max},  {"d_th", c.pipeline.d_th},
               {"max_branches", c.pipeline.max_branches},
               {"seed", c.pipeline.seed},    {"max_order", c.max_order}};
        if (c.pipeline.peaks)
        {
            j["suppress_a"] = c.pipeline.peaks->suppress_a;
            j["suppress_d"] = c.pipeline.peaks->suppress_d;
            j["rel_threshold"] = c.pipeline.peaks->rel_threshold;
        }
        return j;
    }

    RunConfig load_config(const std::filesystem::path &path)
    {
        return config_from_json(read_json(path));
    }

    json diagnostics_to_json(const LocationEstimate &est, const SystemConfig *cfg, const std::optional<Point2> &truth)
    {
        json j;
        j["peaks"] = json::array();
        for (const auto &p : est.peaks)
        {
            json pk{{"angle_bin", p.angle_bin}, {"delay_bin", p.delay_bin}, {"magnitude", p.magnitude}};
            if (cfg)
            {
                pk["aod_rad"] = bin_to_aod(p.angle_bin, *cfg);
                pk["delay_s"] = bin_to_delay(p.delay_bin, *cfg);
            }
            j["peaks"].push_back(pk);
        }
        j["rays"] = json::array();
        for (const auto &r : est.rays)
            j["rays"].push_back({{"aod_rad", r.aod}, {"toa_s", r.toa_adp}, {"magnitude", r.magnitude}});
        j["candidates"] = json::array();
        for (const auto &c : est.candidates)
            j["candidates"].push_back({{"point", point_to(c.point)},
                                       {"n", c.ray_index},
                                       {"i", c.ambiguity_index},
                                       {"weight", c.weight},
                                       {"bounces", c.bounces},
                                       {"branch", c.branch},
                                       {"kept", c.kept}});
        j["labels"] = est.cluster.labels;
        j["k_e"] = est.cluster.k_e;
        j["mean_silhouette"] = json::array();
        for (const auto &[k, s] : est.cluster.mean_silhouette)
            j["mean_silhouette"].push_back({{"k", k}, {"s", s}});
        j["estimate"] = point_to(est.estimate);
        if (truth)
        {
            j["truth"] = point_to(*truth);
            j["error_m"] = distance(*truth, est.estimate);
        }
        return j;
    }

} // namespace mapcsi::io
