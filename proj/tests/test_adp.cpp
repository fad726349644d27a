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


#include "mapcsi/adp.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

using namespace mapcsi;
using cd = std::complex<double>;

namespace
{
    constexpr double kPi = std::numbers::pi;

    CsiMatrix one_path(const SystemConfig &cfg, double aod, double toa, cd gain = 1.0)
    {
        Mpc m;
        m.aod = aod;
        m.toa = toa;
        m.sampled_delay = toa / cfg.t_s;
        m.gain = gain;
        const std::vector<Mpc> v{m};
        return synthesize_csi(v, cfg);
    }

    // |V^H H F| by direct summation
    AdpMatrix direct_adp(const CsiMatrix &h, const SystemConfig &cfg)
    {
        AdpMatrix a(cfg.n_tt, cfg.n_cc);
        for (int q = 0; q < cfg.n_tt; ++q)
            for (int p = 0; p < cfg.n_cc; ++p)
            {
                cd s = 0.0;
                for (int z = 0; z < cfg.n_t; ++z)
                    for (int l = 0; l < cfg.n_c; ++l)
                    {
                        const cd v = std::exp(cd(0.0, -kPi * z * std::cos(q * kPi / cfg.n_tt)));
                        const cd f = std::exp(cd(0.0, 2.0 * kPi * l * p / cfg.n_cc));
                        s += std::conj(v) * h(z, l) * f;
                    }
                a(q, p) = std::abs(s);
            }
        return a;
    }
} // namespace

TEST_SUITE("adp")
{
    TEST_CASE("angle DFT entries")
    {
        const SystemConfig cfg;
        const auto v = dft_v(cfg);
        REQUIRE(v.rows() == 60);
        REQUIRE(v.cols() == 180);
        for (int q = 0; q < 180; ++q)
            CHECK(std::abs(v(0, q) - cd(1.0, 0.0)) < 1e-15);
        for (int z = 0; z < 60; ++z)
            CHECK(std::abs(v(z, 90) - cd(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(v(1, 60) - cd(0.0, -1.0)) < 1e-12);
    }

    TEST_CASE("delay DFT entries")
    {
        const SystemConfig cfg;
        const auto f = dft_f(cfg);
        REQUIRE(f.rows() == 60);
        REQUIRE(f.cols() == 180);
        CHECK(std::abs(f(1, 45) - cd(0.0, 1.0)) < 1e-12);
        CHECK(std::abs(f(0, 17) - cd(1.0, 0.0)) < 1e-15);
        CHECK(std::abs(f(7, 100) - std::exp(cd(0.0, 2.0 * kPi * 700 / 180))) < 1e-12);
    }

    TEST_CASE("broadside zero-delay path peaks at the coherent sum")
    {
        const SystemConfig cfg;
        const auto a = compute_adp(one_path(cfg, kPi / 2, 0.0), cfg);
        const auto d = a.data();
        const auto it = std::max_element(d.begin(), d.end());
        const auto idx = static_cast<std::size_t>(it - d.begin());
        CHECK(idx / a.cols() == 90);
        CHECK(idx % a.cols() == 0);
        CHECK(*it == doctest::Approx(3600.0));
    }

    TEST_CASE("transform matches direct summation")
    {
        SystemConfig cfg;
        cfg.n_t = 8;
        cfg.n_c = 8;
        cfg.n_tt = 20;
        cfg.n_cc = 27;
        std::mt19937_64 rng(1);
        std::normal_distribution<double> g;
        CsiMatrix h(cfg.n_t, cfg.n_c);
        for (auto &x : h.data())
            x = {g(rng), g(rng)};
        const auto a = compute_adp(h, cfg);
        const auto want = direct_adp(h, cfg);
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            CHECK(a.data()[i] >= 0.0);
            CHECK(a.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-10));
        }
        CHECK_THROWS(AdpTransform(cfg).apply(CsiMatrix(cfg.n_t + 1, cfg.n_c)));
    }

    TEST_CASE("two separated paths give two peaks at their bins")
    {
        const SystemConfig cfg;
        Mpc a, b;
        a.aod = kPi / 3;
        a.toa = 20e-9;
        a.gain = 1.0;
        b.aod = 2 * kPi / 3;
        b.toa = 60e-9;
        b.gain = 0.8;
        for (auto *m : {&a, &b})
            m->sampled_delay = m->toa / cfg.t_s;
        const std::vector<Mpc> v{a, b};
        const auto peaks = extract_peaks(compute_adp(synthesize_csi(v, cfg), cfg), 5, PeakParams::scaled_for(cfg));
        REQUIRE(peaks.size() >= 2);
        CHECK(std::abs(peaks[0].angle_bin - 60) <= 1);
        CHECK(std::abs(peaks[0].delay_bin - 30) <= 1);
        CHECK(std::abs(peaks[1].angle_bin - 120) <= 1);
        CHECK(std::abs(peaks[1].delay_bin - 90) <= 1);
    }

    TEST_CASE("delays beyond one window fold back")
    {
        const SystemConfig cfg;
        const auto peaks = extract_peaks(compute_adp(one_path(cfg, 23.0 * kPi / 180, 137e-9), cfg), 1,
                                         PeakParams::scaled_for(cfg));
        REQUIRE(peaks.size() == 1);
        CHECK(std::abs(bin_to_delay(peaks[0].delay_bin, cfg) - 17e-9) <= cfg.window() / cfg.n_cc);
        CHECK(std::abs(bin_to_aod(peaks[0].angle_bin, cfg) - 23.0 * kPi / 180) <= kPi / cfg.n_tt);
    }

    TEST_CASE("bin conversions")
    {
        const SystemConfig cfg;
        CHECK(bin_to_aod(23, cfg) * 180 / kPi == doctest::Approx(23.0));
        CHECK(bin_to_delay(30, cfg) == doctest::Approx(20e-9));
        CHECK(bin_to_aod(0, cfg) == 0.0);
        CHECK_THROWS_AS(bin_to_aod(180, cfg), std::out_of_range);
        CHECK_THROWS_AS(bin_to_delay(-1, cfg), std::out_of_range);
    }

    TEST_CASE("peak picking contract")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        AdpMatrix a(40, 50);
        for (auto &x : a.data())
            x = u(rng);
        const int sa = 2, sd = 3;
        const auto peaks = extract_peaks(a, 6, sa, sd, 0.5);
        CHECK(peaks.size() <= 6);
        CHECK_FALSE(peaks.empty());
        for (std::size_t i = 0; i < peaks.size(); ++i)
        {
            const auto &p = peaks[i];
            if (i > 0)
                CHECK(peaks[i - 1].magnitude >= p.magnitude);
            CHECK(p.magnitude >= 0.5);
            for (int r = std::max(0, p.angle_bin - sa); r <= std::min(39, p.angle_bin + sa); ++r)
                for (int c = std::max(0, p.delay_bin - sd); c <= std::min(49, p.delay_bin + sd); ++c)
                    if (r != p.angle_bin || c != p.delay_bin)
                        CHECK(a(r, c) < p.magnitude);
            for (std::size_t j = 0; j < i; ++j)
                CHECK((std::abs(peaks[j].angle_bin - p.angle_bin) > sa || std::abs(peaks[j].delay_bin - p.delay_bin) > sd));
        }
    }

    TEST_CASE("empty and zero profiles have no peaks; bad arguments throw")
    {
        CHECK(extract_peaks(AdpMatrix(10, 10, 0.0), 3, 1, 1, 0.1).empty());
        CHECK(extract_peaks(AdpMatrix(10, 10, 1.0), 3, 3, 3, 0.1).size() == 1);
        CHECK(extract_peaks(AdpMatrix(), 3, 1, 1, 0.1).empty());
        CHECK_THROWS(extract_peaks(AdpMatrix(4, 4, 1.0), 0, 1, 1, 0.1));
        CHECK_THROWS(extract_peaks(AdpMatrix(4, 4, 1.0), 1, 1, 1, 1.0));
    }

    TEST_CASE("a flat-topped peak is reported once")
    {
        AdpMatrix a(9, 9, 0.1);
        a(4, 4) = 2.0;
        a(4, 5) = 2.0;
        const auto p = extract_peaks(a, 3, 1, 1, 0.5);
        REQUIRE(p.size() == 1);
        CHECK(p[0].angle_bin == 4);
        CHECK(p[0].delay_bin == 4);
    }

    TEST_CASE("suppression window scales with the ADP size")
    {
        CHECK(PeakParams::scaled_for(SystemConfig{}).suppress_a == 6);
        CHECK(PeakParams::scaled_for(SystemConfig{}.with_adp_size(60, 120)).suppress_a == 2);
        CHECK(PeakParams::scaled_for(SystemConfig{}.with_adp_size(60, 120)).suppress_d == 4);
    }

    TEST_CASE("single-path round trip recovers angle and delay to one bin")
    {
        const SystemConfig cfg = SystemConfig{}.with_adp_size(120, 120);
        const AdpTransform t(cfg);
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> aod(0.0, kPi), toa(0.0, cfg.window());
        int ok = 0;
        const int n = 100;
        for (int i = 0; i < n; ++i)
        {
            const double th = aod(rng), tau = toa(rng);
            const auto peaks = extract_peaks(t.apply(one_path(cfg, th, tau)), 1, PeakParams::scaled_for(cfg));
            if (peaks.empty())
                continue;
            const double da = std::abs(bin_to_aod(peaks[0].angle_bin, cfg) - th);
            double dd = std::abs(bin_to_delay(peaks[0].delay_bin, cfg) - tau);
            dd = std::min(dd, cfg.window() - dd);
            ok += da <= kPi / cfg.n_tt && dd <= cfg.window() / cfg.n_cc;
        }
        CHECK(ok >= 99);
    }

    TEST_CASE("CSV export has one line per angle bin")
    {
        AdpMatrix a(3, 2, 1.5);
        std::ostringstream os;
        write_adp_csv(os, a);
        const std::string s = os.str();
        CHECK(std::count(s.begin(), s.end(), '\n') == 3);
    }
}
