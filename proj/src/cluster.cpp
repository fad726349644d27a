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

#include "mapcsi/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace mapcsi
{
    namespace
    {
        constexpr int kRestarts = 10;
        constexpr int kMaxIterations = 100;
        constexpr double kConvergence = 1e-9;
        constexpr double kTieTolerance = 1e-12;

        double sq_dist(const Point2 &a, const Point2 &b)
        {
            const Point2 d = a - b;
            return dot(d, d);
        }

        int nearest(const Point2 &p, const std::vector<Point2> &centroids)
        {
            int best = 0;
            double best_d = sq_dist(p, centroids[0]);
            for (int c = 1; c < static_cast<int>(centroids.size()); ++c)
            {
                const double d = sq_dist(p, centroids[c]);
                if (d < best_d)
                {
                    best_d = d;
                    best = c;
                }
            }
            return best;
        }

        double cost_of(std::span<const Point2> pts, const std::vector<int> &labels, const std::vector<Point2> &cent)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i)
                s += sq_dist(pts[i], cent[labels[i]]);
            return s;
        }

        std::vector<Point2> farthest_point_seeds(std::span<const Point2> pts, int k, std::size_t first)
        {
            std::vector<Point2> seeds{pts[first]};
            std::vector<double> dmin(pts.size());
            for (std::size_t i = 0; i < pts.size(); ++i)
                dmin[i] = sq_dist(pts[i], pts[first]);
            while (static_cast<int>(seeds.size()) < k)
            {
                const auto it = std::max_element(dmin.begin(), dmin.end());
                const Point2 next = pts[static_cast<std::size_t>(it - dmin.begin())];
                seeds.push_back(next);
                for (std::size_t i = 0; i < pts.size(); ++i)
                    dmin[i] = std::min(dmin[i], sq_dist(pts[i], next));
            }
            return seeds;
        }

        // Gives every empty cluster the point farthest from its centroid among clusters with more than one member
        void fill_empty(std::span<const Point2> pts, std::vector<int> &labels, const std::vector<Point2> &cent, int k)
        {
            for (int c = 0; c < k; ++c)
            {
                std::vector<int> counts(k, 0);
                for (const int l : labels)
                    ++counts[l];
                if (counts[c] > 0)
                    continue;
                int pick = -1;
                double far = -1.0;
                for (std::size_t i = 0; i < pts.size(); ++i)
                {
                    if (counts[labels[i]] < 2)
                        continue;
                    const double d = sq_dist(pts[i], cent[labels[i]]);
                    if (d > far)
                    {
                        far = d;
                        pick = static_cast<int>(i);
                    }
                }
                if (pick >= 0)
                    labels[pick] = c;
            }
        }

        std::vector<Point2> centroids_of(std::span<const Point2> pts, const std::vector<int> &labels,
                                         const std::vector<Point2> &previous, int k)
        {
            std::vector<Point2> sum(k);
            std::vector<int> count(k, 0);
            for (std::size_t i = 0; i < pts.size(); ++i)
            {
                sum[labels[i]] += pts[i];
                ++count[labels[i]];
            }
            std::vector<Point2> out(k);
            for (int c = 0; c < k; ++c)
                out[c] = count[c] > 0 ? sum[c] / count[c] : previous[c];
            return out;
        }

        KMeansResult lloyd(std::span<const Point2> pts, int k, std::vector<Point2> cent)
        {
            KMeansResult r;
            r.labels.assign(pts.size(), 0);
            for (int it = 0; it < kMaxIterations; ++it)
            {
                for (std::size_t i = 0; i < pts.size(); ++i)
                    r.labels[i] = nearest(pts[i], cent);
                fill_empty(pts, r.labels, cent, k);
                auto next = centroids_of(pts, r.labels, cent, k);

                double moved = 0.0;
                for (int c = 0; c < k; ++c)
                    moved = std::max(moved, distance(next[c], cent[c]));
                cent = std::move(next);
                r.cost_trace.push_back(cost_of(pts, r.labels, cent));
                if (moved < kConvergence)
                    break;
            }
            r.centroids = std::move(cent);
            r.cost = r.cost_trace.back();
            return r;
        }
    } // namespace

    KMeansResult kmeans(std::span<const Point2> points, int k, std::uint64_t seed)
    {
        if (k < 1)
            throw std::invalid_argument("k must be at least 1.");
        if (static_cast<std::size_t>(k) > points.size())
            throw std::invalid_argument("k exceeds the number of points.");

        std::mt19937_64 rng(seed);
        KMeansResult best;
        bool have = false;
        for (int restart = 0; restart < kRestarts; ++restart)
        {
            const std::size_t first = static_cast<std::size_t>(rng() % points.size());
            auto r = lloyd(points, k, farthest_point_seeds(points, k, first));
            if (!have || r.cost < best.cost)
            {
                best = std::move(r);
                have = true;
            }
        }
        return best;
    }

    double silhouette_mean(std::span<const Point2> points, std::span<const int> labels, int k)
    {
        if (labels.size() != points.size())
            throw std::invalid_argument("labels and points differ in length.");
        if (points.empty())
            throw std::invalid_argument("Silhouette of an empty set is undefined.");
        std::vector<int> count(k, 0);
        for (const int l : labels)
        {
            if (l < 0 || l >= k)
                throw std::invalid_argument("Label out of range.");
            ++count[l];
        }
        if (std::any_of(count.begin(), count.end(), [](int c) { return c == 0; }))
            throw std::invalid_argument("Silhouette requires every cluster to be non-empty.");

        double total = 0.0;
        std::vector<double> sum(k);
        for (std::size_t i = 0; i < points.size(); ++i)
        {
            const int own = labels[i];
            if (count[own] == 1)
                continue; // s = 0
            std::fill(sum.begin(), sum.end(), 0.0);
            for (std::size_t j = 0; j < points.size(); ++j)
                if (j != i)
                    sum[labels[j]] += distance(points[i], points[j]);
            const double a = sum[own] / (count[own] - 1);
            double b = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c)
                if (c != own)
                    b = std::min(b, sum[c] / count[c]);
            const double m = std::max(a, b);
            if (m > 0.0 && std::isfinite(b))
                total += (b - a) / m;
        }
        return total / static_cast<double>(points.size());
    }

    SelectKResult select_k(std::span<const Point2> points, int k_max, std::uint64_t seed)
    {
        if (points.size() < 2)
            throw std::invalid_argument("select_k needs at least two points.");
        if (k_max < 2)
            throw std::invalid_argument("k_max must be at least 2.");

        SelectKResult out;
        double best = -std::numeric_limits<double>::infinity();
        const int upper = std::min<int>(k_max, static_cast<int>(points.size()));
        for (int k = 2; k <= upper; ++k)
        {
            auto km = kmeans(points, k, seed);
            const double s = silhouette_mean(points, km.labels, k);
            out.scores.emplace_back(k, s);
            if (s > best + kTieTolerance)
            {
                best = s;
                out.k_e = k;
                out.clustering = std::move(km);
            }
        }
        return out;
    }

    ClusterResult estimate_location(std::span<const Point2> points, double d_th, int k_max, std::uint64_t seed,
                                    std::span<const double> weights)
    {
        if (points.empty())
            throw std::invalid_argument("Cannot estimate a location from an empty candidate set.");
        if (!weights.empty() && weights.size() != points.size())
            throw std::invalid_argument("weights and points differ in length.");

        ClusterResult r;
        if (points.size() == 1)
        {
            r.k_e = 1;
            r.labels = {0};
            r.estimate = points[0];
            r.centroids = {points[0]};
            return r;
        }

        Point2 mean;
        for (const auto &p : points)
            mean += p;
        mean = mean / static_cast<double>(points.size());
        double max_d = 0.0;
        for (const auto &p : points)
            max_d = std::max(max_d, distance(p, mean));

        if (max_d < d_th || k_max < 2)
        {
            r.k_e = 1;
            r.labels.assign(points.size(), 0);
            r.estimate = mean;
            r.centroids = {mean};
            return r;
        }

        auto sel = select_k(points, k_max, seed);
        r.k_e = sel.k_e;
        r.labels = sel.clustering.labels;
        r.centroids = sel.clustering.centroids;
        r.mean_silhouette = std::move(sel.scores);

        std::vector<int> count(r.k_e, 0);
        std::vector<double> weight(r.k_e, 0.0);
        for (std::size_t i = 0; i < points.size(); ++i)
        {
            ++count[r.labels[i]];
            if (!weights.empty())
                weight[r.labels[i]] += weights[i];
        }
        int chosen = 0;
        for (int c = 1; c < r.k_e; ++c)
        {
            if (count[c] > count[chosen] || (count[c] == count[chosen] && weight[c] > weight[chosen]))
                chosen = c;
        }

        // Report the exact member mean rather than the last Lloyd centroid
        Point2 sum;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (r.labels[i] == chosen)
                sum += points[i];
        r.estimate = sum / static_cast<double>(count[chosen]);
        return r;
    }

} // namespace mapcsi
