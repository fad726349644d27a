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

#ifndef MAPCSI_CLUSTER_HPP
#define MAPCSI_CLUSTER_HPP

#include "mapcsi/geometry.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mapcsi
{
    struct KMeansResult
    {
        std::vector<int> labels;
        std::vector<Point2> centroids;
        double cost = 0.0;              // within-cluster sum of squared distances
        std::vector<double> cost_trace; // cost after every Lloyd iteration of the kept restart
    };

    // Lloyd's algorithm with greedy farthest-point seeding (first centre drawn from the seeded generator),
    // 10 restarts, keeping the lowest cost. Stops when no centroid moves by 1e-9 m or after 100 iterations.
    KMeansResult kmeans(std::span<const Point2> points, int k, std::uint64_t seed);

    // Mean silhouette over all points; singleton-cluster points contribute 0.
    double silhouette_mean(std::span<const Point2> points, std::span<const int> labels, int k);

    struct SelectKResult
    {
        int k_e = 0;
        KMeansResult clustering;
        std::vector<std::pair<int, double>> scores; // (k, mean silhouette)
    };

    // k_e = argmax over k = 2..min(k_max, |points|) of the mean silhouette; ties go to the smaller k
    SelectKResult select_k(std::span<const Point2> points, int k_max, std::uint64_t seed);

    struct ClusterResult
    {
        int k_e = 1;
        std::vector<int> labels;
        Point2 estimate;
        std::vector<std::pair<int, double>> mean_silhouette; // empty unless the silhouette branch ran
        std::vector<Point2> centroids;
    };

    // Clustering and classification of candidate locations:
    //   one point             -> that point
    //   all within d_th of the centroid -> the centroid
    //   otherwise             -> silhouette-selected k-means, centroid of the most populated cluster
    // Equal-size clusters are resolved by the larger summed weight (when weights are given), then by lower index.
    ClusterResult estimate_location(std::span<const Point2> points, double d_th, int k_max, std::uint64_t seed,
                                    std::span<const double> weights = {});

} // namespace mapcsi

#endif
