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

#ifndef MAPCSI_IO_HPP
#define MAPCSI_IO_HPP

// File formats
//
//   Map (JSON):    {"bs": [x, y], "aoi": [x_min, x_max, y_min, y_max],
//                   "surfaces": [{"a": [x, y], "b": [x, y], "material": "reflective" | "semi"}]}
//
//   CSI (JSON):    {"n_t": .., "n_c": .., "t_s": .., "wavelength": .., "entries": [[re, im], ...]}
//                  entries are row-major (antenna-major), n_t * n_c pairs.
//
//   CSI (binary):  little-endian; "MCSI" magic, uint32 version (1), uint32 n_t, uint32 n_c, float64 t_s,
//                  float64 wavelength, then n_t * n_c (float64 re, float64 im) pairs row-major.
//
//   Config (JSON): any subset of n_t, n_c, n_tt, n_cc, t_s, wavelength, n_max, i_max, k_max, d_th, suppress_a,
//                  suppress_d, rel_threshold, max_branches, seed, max_order; missing keys keep their defaults.

#include "mapcsi/channel.hpp"
#include "mapcsi/envmap.hpp"
#include "mapcsi/localize.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace mapcsi::io
{
    nlohmann::json map_to_json(const EnvironmentMap &map);
    EnvironmentMap map_from_json(const nlohmann::json &j);
    EnvironmentMap load_map(const std::filesystem::path &path);
    void save_map(const std::filesystem::path &path, const EnvironmentMap &map);

    struct CsiFile
    {
        CsiMatrix h;
        double t_s = 0.0;
        double wavelength = 0.0;
    };

    nlohmann::json csi_to_json(const CsiMatrix &h, const SystemConfig &cfg);
    CsiFile csi_from_json(const nlohmann::json &j);
    void write_csi_binary(std::ostream &os, const CsiMatrix &h, const SystemConfig &cfg);
    CsiFile read_csi_binary(std::istream &is);

    // Format chosen by extension: ".json" is JSON, anything else binary
    void save_csi(const std::filesystem::path &path, const CsiMatrix &h, const SystemConfig &cfg);
    CsiFile load_csi(const std::filesystem::path &path);

    struct RunConfig
    {
        SystemConfig system;
        PipelineParams pipeline;
        int max_order = 2;
    };

    // Overlays keys present in j onto base
    RunConfig config_from_json(const nlohmann::json &j, RunConfig base = {});
    nlohmann::json config_to_json(const RunConfig &cfg);
    RunConfig load_config(const std::filesystem::path &path);

    // Per-sample diagnostics: peaks, every candidate with its kept flag, labels, k_e, estimate, and the error when
    // the true position is known
    nlohmann::json diagnostics_to_json(const LocationEstimate &est, const SystemConfig *cfg,
                                       const std::optional<Point2> &truth);

    nlohmann::json read_json(const std::filesystem::path &path);

} // namespace mapcsi::io

#endif
