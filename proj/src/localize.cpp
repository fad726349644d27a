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

#include "mapcsi/localize.hpp"

#include <algorithm>
#include <numeric>

namespace mapcsi
{
    namespace
    {
        constexpr double kCoincident = 1e-6; // meters
    } // namespace

    void validate(const PipelineParams &p)
    {
        if (p.n_max < 1 || p.i_max < 1 || p.k_max < 1)
            throw std::invalid_argument("n_max, i_max and k_max must be at least 1.");
        if (p.max_branches < 1)
            throw std::invalid_argument("max_branches must be at least 1.");
        if (!(p.d_th >= 0.0))
            throw std::invalid_argument("d_th cannot be negative.");
    }

    std::vector<CandidatePoint> candidates_from_ray(const EnvironmentMap &map, const RayHypothesis &hyp,
                                                    const SystemConfig &cfg, int i_max, std::size_t max_branches)
    {
        std::vector<CandidatePoint> out;
        for (int i = 1; i <= i_max; ++i)
        {
            const double budget = (hyp.toa_adp + (i - 1) * cfg.window()) * kSpeedOfLight;
            const std::size_t first = out.size();
            for (const auto &t : trace_path(map, hyp.aod, budget, max_branches))
            {
                // branches of one ray that end at the same place are a single candidate location
                const bool dup = std::any_of(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                                             [&](const CandidatePoint &o) { return distance(o.point, t.point) < kCoincident; });
                if (dup)
                    continue;
                CandidatePoint c;
                c.point = t.point;
                c.ambiguity_index = i;
                c.weight = hyp.magnitude;
                c.bounces = t.bounces;
                c.branch = t.attenuation_branch;
                c.kept = in_aoi(t.point, map.aoi);
                out.push_back(c);
            }
        }
        return out;
    }

    namespace
    {
        void cluster_kept(LocationEstimate &est, const PipelineParams &params)
        {
            std::vector<Point2> pts;
            std::vector<double> weights;
            for (const auto &c : est.candidates)
                if (c.kept)
                {
                    pts.push_back(c.point);
                    weights.push_back(c.weight);
                }
            if (pts.empty())
                throw UnlocalizableError("No candidate location falls inside the area of interest.");
            est.cluster = estimate_location(pts, params.d_th, params.k_max, params.seed, weights);
            est.estimate = est.cluster.estimate;
        }
    } // namespace

    LocationEstimate localize_csi(const CsiMatrix &h, const EnvironmentMap &map, const AdpTransform &transform,
                                  const PipelineParams &params)
    {
        validate(params);
        const SystemConfig &cfg = transform.config();
        const AdpMatrix a = transform.apply(h);
        const PeakParams pp = params.peaks.value_or(PeakParams::scaled_for(cfg));

        LocationEstimate est;
        est.peaks = extract_peaks(a, params.n_max, pp);
        if (est.peaks.empty())
            throw UnlocalizableError("The ADP has no peak above the detection threshold.");

        for (std::size_t n = 0; n < est.peaks.size(); ++n)
        {
            const auto &pk = est.peaks[n];
            RayHypothesis hyp{bin_to_aod(pk.angle_bin, cfg), bin_to_delay(pk.delay_bin, cfg), pk.magnitude};
            est.rays.push_back(hyp);
            for (auto c : candidates_from_ray(map, hyp, cfg, params.i_max, params.max_branches))
            {
                c.ray_index = static_cast<int>(n) + 1;
                est.candidates.push_back(c);
            }
        }
        cluster_kept(est, params);
        return est;
    }

    LocationEstimate localize_csi(const CsiMatrix &h, const EnvironmentMap &map, const SystemConfig &cfg,
                                  const PipelineParams &params)
    {
        return localize_csi(h, map, AdpTransform(cfg), params);
    }

    LocationEstimate localize_mapat(std::span<const Mpc> mpcs, const EnvironmentMap &map,
                                    const PipelineParams &params)
    {
        validate(params);
        if (mpcs.empty())
            throw std::invalid_argument("MAP-AT needs at least one path.");

        // strongest first (RSS ordering)
        std::vector<std::size_t> order(mpcs.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return std::abs(mpcs[a].gain) > std::abs(mpcs[b].gain); });
        order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(params.n_max)));

        LocationEstimate est;
        for (std::size_t n = 0; n < order.size(); ++n)
        {
            const Mpc &m = mpcs[order[n]];
            est.rays.push_back({m.aod, m.toa, std::abs(m.gain)});
            for (const auto &t : trace_path(map, m.aod, m.toa * kSpeedOfLight, params.max_branches))
            {
                CandidatePoint c;
                c.point = t.point;
                c.ray_index = static_cast<int>(n) + 1;
                c.ambiguity_index = 1;
                c.weight = std::abs(m.gain);
                c.bounces = t.bounces;
                c.branch = t.attenuation_branch;
                c.kept = in_aoi(t.point, map.aoi);
                est.candidates.push_back(c);
            }
        }
        cluster_kept(est, params);
        return est;
    }

} // namespace mapcsi
