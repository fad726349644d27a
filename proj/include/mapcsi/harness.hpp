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

#ifndef MAPCSI_HARNESS_HPP
#define MAPCSI_HARNESS_HPP

#include "mapcsi/channel.hpp"
#include "mapcsi/envmap.hpp"
#include "mapcsi/localize.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mapcsi
{
    enum class ScenarioKind
    {
        Los,  // street canyon, every grid point sees the BS
        Mixed // same street with two buses shadowing about half of the grid
    };

    enum class Method
    {
        Csi, // MAP-CSI
        At   // MAP-AT
    };

    std::string to_string(Method m);
    std::string to_string(ScenarioKind k);
    ScenarioKind scenario_kind_from_string(const std::string &s);

    struct Scenario
    {
        EnvironmentMap map;
        std::vector<Point2> grid; // x-major: index = v * grid_h + h
        std::vector<bool> los_mask;
        int grid_h = 0;
        int grid_v = 0;
    };

    // Synthetic street-canyon map: 20 m wide street between two building walls, BS on the upper wall,
    // a 90 m x 4 m AoI in the middle of the street. Mixed adds two 12 m buses between the BS and the AoI.
    EnvironmentMap street_map(ScenarioKind kind);

    // grid_h positions across the AoI (y) times grid_v positions along it (x), x-major order
    std::vector<Point2> aoi_grid(const Aoi &aoi, int grid_h, int grid_v);

    Scenario build_scenario(ScenarioKind kind, int grid_h = 5, int grid_v = 1000);

    // Grid and LOS mask for an arbitrary map
    Scenario scenario_from_map(EnvironmentMap map, int grid_h = 5, int grid_v = 1000);

    struct EvalRecord
    {
        std::size_t grid_index = 0;
        Point2 position;
        Method method = Method::Csi;
        int n_tt = 0;
        int n_cc = 0;
        double error = 0.0; // meters; 0 when unlocalizable
        bool los = true;
        bool unlocalizable = false;
        Point2 estimate;
    };

    struct EvalOptions
    {
        std::vector<Method> methods{Method::Csi, Method::At};
        std::size_t sample_limit = 200;
        std::uint64_t seed = 0;
        int max_order = 2;
        std::optional<double> snr_db; // additive CSI noise, off by default
        unsigned threads = 1;
    };

    // Evenly spread subset of grid indices covering every cross-street row (all of them when limit >= size)
    std::vector<std::size_t> stratified_sample(const Scenario &scenario, std::size_t limit);

    // Records are ordered by grid index, then method (CSI before AT), independent of threading
    std::vector<EvalRecord> evaluate(const Scenario &scenario, const SystemConfig &cfg, const PipelineParams &params,
                                     const EvalOptions &options);

    struct SummaryRow
    {
        Method method = Method::Csi;
        int n_tt = 0;
        int n_cc = 0;
        std::string region; // "all", "los", "nlos"
        std::size_t samples = 0;
        std::size_t unlocalizable = 0;
        double mean_error = 0.0;
        double p50 = 0.0;
        double p90 = 0.0;
    };

    // Statistics over the localizable records in a region; NaN means when nothing is localizable
    SummaryRow summarize(const std::vector<EvalRecord> &records, Method method, int n_tt, int n_cc,
                         const std::string &region);

    // Mean errors per (method, size). Rows for region "all"; "los"/"nlos" rows are added when the scenario
    // contains both kinds of positions.
    std::vector<SummaryRow> sweep(const Scenario &scenario, const SystemConfig &cfg_base, const PipelineParams &params,
                                  const std::vector<std::pair<int, int>> &sizes, const EvalOptions &options);

    void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &rows);
    void write_records_csv(std::ostream &os, const std::vector<EvalRecord> &records);

} // namespace mapcsi

#endif
