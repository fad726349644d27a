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

#ifndef MAPCSI_LOCALIZE_HPP
#define MAPCSI_LOCALIZE_HPP

#include "mapcsi/adp.hpp"
#include "mapcsi/channel.hpp"
#include "mapcsi/cluster.hpp"
#include "mapcsi/envmap.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace mapcsi
{
    // Raised when no candidate survives AoI filtering; callers report the sample instead of an error distance.
    class UnlocalizableError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct RayHypothesis
    {
        double aod = 0.0;       // radians
        double toa_adp = 0.0;   // seconds, within one ambiguity window
        double magnitude = 0.0; // ADP peak value or |gain|
    };

    struct CandidatePoint
    {
        Point2 point;
        int ray_index = 1;       // n, 1-based
        int ambiguity_index = 1; // i, 1-based; budget uses i - 1 extra windows
        double weight = 0.0;
        int bounces = 0;
        bool branch = false;     // came through a SemiTransparent surface
        bool kept = false;       // inside the AoI
    };

    struct PipelineParams
    {
        int n_max = 5;
        int i_max = 7;
        int k_max = 3;
        double d_th = 2.0;
        std::optional<PeakParams> peaks; // unset: PeakParams::scaled_for(cfg)
        std::size_t max_branches = kDefaultMaxBranches;
        std::uint64_t seed = 0;
    };

    void validate(const PipelineParams &params);

    struct LocationEstimate
    {
        Point2 estimate;
        ClusterResult cluster;              // labels index the kept candidates in order
        std::vector<AdpPeak> peaks;         // MAP-CSI only
        std::vector<RayHypothesis> rays;
        std::vector<CandidatePoint> candidates; // every terminal, kept or filtered
    };

    // One candidate per trace_path terminal for each ambiguity index i = 1..i_max,
    // with budget (toa_adp + (i - 1) N_c T_s) c.
    std::vector<CandidatePoint> candidates_from_ray(const EnvironmentMap &map, const RayHypothesis &hyp,
                                                    const SystemConfig &cfg, int i_max,
                                                    std::size_t max_branches = kDefaultMaxBranches);

    LocationEstimate localize_csi(const CsiMatrix &h, const EnvironmentMap &map, const SystemConfig &cfg,
                                  const PipelineParams &params);

    // Same pipeline with a prebuilt transform (shared across samples of one ADP size)
    LocationEstimate localize_csi(const CsiMatrix &h, const EnvironmentMap &map, const AdpTransform &transform,
                                  const PipelineParams &params);

    // Oracle baseline: exact AoD and ToA of the n_max strongest paths, no ambiguity unrolling
    LocationEstimate localize_mapat(std::span<const Mpc> mpcs, const EnvironmentMap &map,
                                    const PipelineParams &params);

} // namespace mapcsi

#endif
