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

#ifndef MAPCSI_ADP_HPP
#define MAPCSI_ADP_HPP

#include "mapcsi/channel.hpp"
#include "mapcsi/matrix.hpp"

#include <iosfwd>
#include <vector>

namespace mapcsi
{
    using AdpMatrix = RMatrix; // n_tt rows (angle) x n_cc columns (delay), entries >= 0

    struct AdpPeak
    {
        int angle_bin = 0;
        int delay_bin = 0;
        double magnitude = 0.0;

        bool operator==(const AdpPeak &) const = default;
    };

    // Peak-picking window and threshold. Window half-widths are in bins.
    struct PeakParams
    {
        int suppress_a = 6;
        int suppress_d = 6;
        double rel_threshold = 0.1;

        // Defaults (6 bins at 180) scaled proportionally to the ADP size, at least one bin
        static PeakParams scaled_for(const SystemConfig &cfg);
    };

    // Oversampled angle DFT: column q is the array response at theta = q pi / N_tt, q = 0..N_tt-1,
    // [V]_{z,q} = exp(-j pi z cos(q pi / N_tt)) with 0-based antenna index z.
    CMatrix dft_v(const SystemConfig &cfg);

    // Oversampled delay DFT: [F]_{l,q} = exp(j 2 pi l q / N_cc), l = 0..N_c-1, q = 0..N_cc-1.
    CMatrix dft_f(const SystemConfig &cfg);

    // Precomputed V^H and F for one SystemConfig; immutable and shareable across threads.
    class AdpTransform
    {
    public:
        explicit AdpTransform(const SystemConfig &cfg);

        const SystemConfig &config() const { return cfg_; }

        // A = |V^H H F|
        AdpMatrix apply(const CsiMatrix &h) const;

    private:
        SystemConfig cfg_;
        PlanarMatrix vh_; // n_tt x n_t
        PlanarMatrix f_;  // n_c x n_cc
    };

    AdpMatrix compute_adp(const CsiMatrix &h, const SystemConfig &cfg);

    // Up to n_max strict local maxima over a (2 sa + 1) x (2 sd + 1) window (exact ties go to the first cell in
    // row-major order), strongest first, with greedy window
    // suppression around each accepted peak. Peaks below rel_threshold * global max are discarded.
    std::vector<AdpPeak> extract_peaks(const AdpMatrix &a, int n_max, int suppress_a, int suppress_d,
                                       double rel_threshold);

    std::vector<AdpPeak> extract_peaks(const AdpMatrix &a, int n_max, const PeakParams &params);

    double bin_to_aod(int q_a, const SystemConfig &cfg);   // q_a pi / N_tt
    double bin_to_delay(int q_d, const SystemConfig &cfg); // q_d N_c T_s / N_cc

    // One row per angle bin, comma-separated magnitudes
    void write_adp_csv(std::ostream &os, const AdpMatrix &a);

} // namespace mapcsi

#endif
