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

#ifndef MAPCSI_CHANNEL_HPP
#define MAPCSI_CHANNEL_HPP

#include "mapcsi/envmap.hpp"
#include "mapcsi/matrix.hpp"

#include <complex>
#include <random>
#include <span>
#include <vector>

namespace mapcsi
{
    inline constexpr double kSpeedOfLight = 299792458.0; // m/s

    inline constexpr double kReflectionAmplitude = 0.7;   // per bounce
    inline constexpr double kTransmissionAmplitude = 0.3; // per SemiTransparent pass-through

    // ULA at the BS with half-wavelength spacing, OFDM with n_c sub-carriers.
    // Defaults: 60 GHz carrier, 0.5 GHz bandwidth (T_s = 2 ns), 60 antennas, 60 sub-carriers, 180 x 180 ADP.
    struct SystemConfig
    {
        int n_t = 60;
        int n_c = 60;
        int n_tt = 180;
        int n_cc = 180;
        double t_s = 2e-9;
        double wavelength = kSpeedOfLight / 60e9;
        double spacing = kSpeedOfLight / 60e9 / 2.0;

        // Delay span of one ADP window, N_c * T_s
        double window() const { return n_c * t_s; }

        // Same array and OFDM settings with a different ADP size
        SystemConfig with_adp_size(int tt, int cc) const;

        bool operator==(const SystemConfig &) const = default;
    };

    // Throws std::invalid_argument if a constraint of SystemConfig is violated
    void validate(const SystemConfig &cfg);

    struct Mpc
    {
        double aod = 0.0;            // radians, departure angle at the BS
        double toa = 0.0;            // seconds
        std::complex<double> gain;   // complex path amplitude
        double sampled_delay = 0.0;  // toa / T_s, kept real-valued
        int bounces = 0;
        int crossings = 0;           // SemiTransparent pass-throughs
        double length = 0.0;         // meters
    };

    using CsiMatrix = CMatrix; // n_t rows x n_c columns, column l is h[l]

    // Amplitude Gamma^bounces * T^crossings / length with propagation phase -2 pi length / lambda
    std::complex<double> path_gain(double length, int bounces, int crossings, double wavelength);

    // Image-method enumeration of LOS and reflected paths up to max_order bounces. Legs blocked by a Reflective
    // surface are dropped, SemiTransparent crossings attenuate the path.
    std::vector<Mpc> enumerate_paths(const EnvironmentMap &map, const Point2 &user, const SystemConfig &cfg,
                                     int max_order = 2);

    // e(theta): element z = exp(-j 2 pi z d cos(theta) / lambda)
    std::vector<std::complex<double>> array_response(double aod, const SystemConfig &cfg);

    // h[l] = sum_paths gain * e(aod) * exp(-j 2 pi l n / N_c), l = 0..N_c-1
    CsiMatrix synthesize_csi(std::span<const Mpc> mpcs, const SystemConfig &cfg);

    // Adds circular white Gaussian noise at the given SNR relative to the mean entry power of h
    void add_noise(CsiMatrix &h, double snr_db, std::mt19937_64 &rng);

} // namespace mapcsi

#endif
