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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace mapcsi
{
    namespace
    {
        // Street geometry (meters). The BS sits on the upper wall so every departure points into the street.
        constexpr double kWallY = 10.0;
        constexpr double kWallXMin = -50.0;
        constexpr double kWallXMax = 150.0;
        constexpr Aoi kStreetAoi{10.0, 100.0, -2.0, 2.0};
        constexpr double kBusY = 5.0;
        constexpr double kBusLength = 12.0;
        constexpr double kBusStarts[] = {4.0, 22.0};
    } // namespace

    std::string to_string(Method m)
    {
        return m == Method::Csi ? "MAP-CSI" : "MAP-AT";
    }

    std::string to_string(ScenarioKind k)
    {
        return k == ScenarioKind::Los ? "los" : "mixed";
    }

    ScenarioKind scenario_kind_from_string(const std::string &s)
    {
        if (s == "los")
            return ScenarioKind::Los;
        if (s == "mixed")
            return ScenarioKind::Mixed;
        throw std::invalid_argument("Unknown scenario kind '" + s + "' (expected los or mixed).");
    }

    EnvironmentMap street_map(ScenarioKind kind)
    {
        EnvironmentMap map;
        map.bs = {0.0, kWallY};
        map.aoi = kStreetAoi;
        map.surfaces.push_back({{kWallXMin, kWallY}, {kWallXMax, kWallY}, Material::Reflective});
        map.surfaces.push_back({{kWallXMin, -kWallY}, {kWallXMax, -kWallY}, Material::Reflective});
        if (kind == ScenarioKind::Mixed)
            for (const double x0 : kBusStarts)
                map.surfaces.push_back({{x0, kBusY}, {x0 + kBusLength, kBusY}, Material::SemiTransparent});
        return map;
    }

    std::vector<Point2> aoi_grid(const Aoi &aoi, int grid_h, int grid_v)
    {
        if (grid_h < 1 || grid_v < 1)
            throw std::invalid_argument("Grid dimensions must be at least 1.");
        // cell centres: equally spaced and strictly inside the AoI
        auto lin = [](double lo, double hi, int n, int i) { return lo + (hi - lo) * (i + 0.5) / n; };
        std::vector<Point2> g;
        g.reserve(static_cast<std::size_t>(grid_h) * grid_v);
        for (int v = 0; v < grid_v; ++v)
            for (int h = 0; h < grid_h; ++h)
                g.push_back({lin(aoi.x_min, aoi.x_max, grid_v, v), lin(aoi.y_min, aoi.y_max, grid_h, h)});
        return g;
    }

    Scenario scenario_from_map(EnvironmentMap map, int grid_h, int grid_v)
    {
        validate(map);
        Scenario s;
        s.grid = aoi_grid(map.aoi, grid_h, grid_v);
        s.grid_h = grid_h;
        s.grid_v = grid_v;
        s.los_mask.reserve(s.grid.size());
        for (const auto &p : s.grid)
            s.los_mask.push_back(line_of_sight(map, p));
        s.map = std::move(map);
        return s;
    }

    Scenario build_scenario(ScenarioKind kind, int grid_h, int grid_v)
    {
        return scenario_from_map(street_map(kind), grid_h, grid_v);
    }

    std::vector<std::size_t> stratified_sample(const Scenario &scenario, std::size_t limit)
    {
        const std::size_t n = scenario.grid.size();
        std::vector<std::size_t> idx;
        if (limit >= n)
        {
            for (std::size_t i = 0; i < n; ++i)
                idx.push_back(i);
            return idx;
        }
        const std::size_t gh = static_cast<std::size_t>(scenario.grid_h);
        const std::size_t gv = static_cast<std::size_t>(scenario.grid_v);
        if (gh * gv != n || limit > gv)
        {
            for (std::size_t j = 0; j < limit; ++j)
                idx.push_back(((2 * j + 1) * n) / (2 * limit));
            return idx;
        }
        // evenly spaced along the street, cycling through the cross-street rows
        for (std::size_t j = 0; j < limit; ++j)
            idx.push_back(((2 * j + 1) * gv) / (2 * limit) * gh + j % gh);
        return idx;
    }

    namespace
    {
        // Runs fn(i) for i in [0, n) on up to `threads` workers
        template <typename Fn>
        void parallel_for(std::size_t n, unsigned threads, Fn &&fn)
        {
            threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
            if (threads <= 1)
            {
                for (std::size_t i = 0; i < n; ++i)
                    fn(i);
                return;
            }
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < n; i = next++)
                        fn(i);
                });
            for (auto &th : pool)
                th.join();
        }

        bool has(const std::vector<Method> &ms, Method m)
        {
            return std::find(ms.begin(), ms.end(), m) != ms.end();
        }
    } // namespace

    std::vector<EvalRecord> evaluate(const Scenario &scenario, const SystemConfig &cfg, const PipelineParams &params,
                                     const EvalOptions &options)
    {
        validate(cfg);
        validate(params);
        if (options.methods.empty())
            throw std::invalid_argument("No localization method selected.");
        if (options.sample_limit > scenario.grid.size())
            throw std::invalid_argument("sample_limit exceeds the grid size.");

        const auto picks = stratified_sample(scenario, options.sample_limit);
        const bool do_csi = has(options.methods, Method::Csi);
        const bool do_at = has(options.methods, Method::At);
        const AdpTransform transform(cfg);

        PipelineParams p = params;
        p.seed = options.seed;

        std::vector<std::vector<EvalRecord>> per_sample(picks.size());
        parallel_for(picks.size(), options.threads, [&](std::size_t s) {
            const std::size_t gi = picks[s];
            const Point2 truth = scenario.grid[gi];
            const auto mpcs = enumerate_paths(scenario.map, truth, cfg, options.max_order);

            auto run = [&](Method m, auto &&localize) {
                EvalRecord r;
                r.grid_index = gi;
                r.position = truth;
                r.method = m;
                r.n_tt = cfg.n_tt;
                r.n_cc = cfg.n_cc;
                r.los = scenario.los_mask[gi];
                try
                {
                    r.estimate = localize();
                    r.error = distance(r.estimate, truth);
                }
                catch (const UnlocalizableError &)
                {
                    r.unlocalizable = true;
                }
                per_sample[s].push_back(r);
            };

            if (do_csi)
                run(Method::Csi, [&] {
                    if (mpcs.empty())
                        throw UnlocalizableError("No propagation path reaches the user.");
                    CsiMatrix h = synthesize_csi(mpcs, cfg);
                    if (options.snr_db)
                    {
                        std::mt19937_64 rng(options.seed ^ (0x9E3779B97F4A7C15ull * (gi + 1)));
                        add_noise(h, *options.snr_db, rng);
                    }
                    return localize_csi(h, scenario.map, transform, p).estimate;
                });
            if (do_at)
                run(Method::At, [&] {
                    if (mpcs.empty())
                        throw UnlocalizableError("No propagation path reaches the user.");
                    return localize_mapat(mpcs, scenario.map, p).estimate;
                });
        });

        std::vector<EvalRecord> out;
        for (auto &v : per_sample)
            out.insert(out.end(), v.begin(), v.end());
        return out;
    }

    namespace
    {
        // Linear interpolation between closest ranks on sorted data
        double percentile(const std::vector<double> &sorted, double q)
        {
            if (sorted.empty())
                return std::numeric_limits<double>::quiet_NaN();
            const double pos = q * static_cast<double>(sorted.size() - 1);
            const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
            const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
            return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
        }
    } // namespace

    SummaryRow summarize(const std::vector<EvalRecord> &records, Method method, int n_tt, int n_cc,
                         const std::string &region)
    {
        SummaryRow row{method, n_tt, n_cc, region, 0, 0, 0.0, 0.0, 0.0};
        std::vector<double> errs;
        for (const auto &r : records)
        {
            if (r.method != method || r.n_tt != n_tt || r.n_cc != n_cc)
                continue;
            if ((region == "los" && !r.los) || (region == "nlos" && r.los))
                continue;
            ++row.samples;
            if (r.unlocalizable)
                ++row.unlocalizable;
            else
                errs.push_back(r.error);
        }
        std::sort(errs.begin(), errs.end());
        double sum = 0.0;
        for (const double e : errs)
            sum += e;
        row.mean_error = errs.empty() ? std::numeric_limits<double>::quiet_NaN() : sum / errs.size();
        row.p50 = percentile(errs, 0.5);
        row.p90 = percentile(errs, 0.9);
        return row;
    }

    std::vector<SummaryRow> sweep(const Scenario &scenario, const SystemConfig &cfg_base, const PipelineParams &params,
                                  const std::vector<std::pair<int, int>> &sizes, const EvalOptions &options)
    {
        if (sizes.empty())
            throw std::invalid_argument("sweep needs at least one ADP size.");

        const auto picks = stratified_sample(scenario, options.sample_limit);
        bool any_los = false, any_nlos = false;
        for (const auto gi : picks)
            (scenario.los_mask[gi] ? any_los : any_nlos) = true;
        std::vector<std::string> regions{"all"};
        if (any_los && any_nlos)
        {
            regions.push_back("los");
            regions.push_back("nlos");
        }

        // MAP-AT never looks at the ADP, so it runs once and its summary is repeated for every size
        std::vector<EvalRecord> at_records;
        if (has(options.methods, Method::At))
        {
            EvalOptions o = options;
            o.methods = {Method::At};
            at_records = evaluate(scenario, cfg_base, params, o);
        }

        std::vector<SummaryRow> rows;
        for (const Method m : {Method::Csi, Method::At})
        {
            if (!has(options.methods, m))
                continue;
            for (const auto &[tt, cc] : sizes)
            {
                const SystemConfig cfg = cfg_base.with_adp_size(tt, cc);
                std::vector<EvalRecord> recs;
                if (m == Method::Csi)
                {
                    EvalOptions o = options;
                    o.methods = {Method::Csi};
                    recs = evaluate(scenario, cfg, params, o);
                }
                else
                {
                    recs = at_records;
                    for (auto &r : recs)
                    {
                        r.n_tt = tt;
                        r.n_cc = cc;
                    }
                }
                for (const auto &region : regions)
                    rows.push_back(summarize(recs, m, tt, cc, region));
            }
        }
        return rows;
    }

    namespace
    {
        std::string fmt(double v)
        {
            if (std::isnan(v))
                return "nan";
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f", v);
            return std::string(buf) == "-0.000000" ? "0.000000" : buf;
        }
    } // namespace

    void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &rows)
    {
        os << "method,n_tt,n_cc,region,samples,unlocalizable,mean_error_m,p50_m,p90_m\n";
        for (const auto &r : rows)
            os << to_string(r.method) << ',' << r.n_tt << ',' << r.n_cc << ',' << r.region << ',' << r.samples << ','
               << r.unlocalizable << ',' << fmt(r.mean_error) << ',' << fmt(r.p50) << ',' << fmt(r.p90) << '\n';
    }

    void write_records_csv(std::ostream &os, const std::vector<EvalRecord> &records)
    {
        os << "grid_index,x,y,method,n_tt,n_cc,los,unlocalizable,est_x,est_y,error_m\n";
        for (const auto &r : records)
            os << r.grid_index << ',' << fmt(r.position.x) << ',' << fmt(r.position.y) << ',' << to_string(r.method)
               << ',' << r.n_tt << ',' << r.n_cc << ',' << (r.los ? 1 : 0) << ',' << (r.unlocalizable ? 1 : 0) << ','
               << (r.unlocalizable ? "nan" : fmt(r.estimate.x)) << ',' << (r.unlocalizable ? "nan" : fmt(r.estimate.y))
               << ',' << (r.unlocalizable ? "nan" : fmt(r.error)) << '\n';
    }

} // namespace mapcsi
