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
#include "mapcsi/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace mapcsi
{
    PeakParams PeakParams::scaled_for(const SystemConfig &cfg)
    {
        PeakParams p;
        p.suppress_a = std::max(1, static_cast<int>(std::lround(6.0 * cfg.n_tt / 180.0)));
        p.suppress_d = std::max(1, static_cast<int>(std::lround(6.0 * cfg.n_cc / 180.0)));
        return p;
    }

    CMatrix dft_v(const SystemConfig &cfg)
    {
        if (cfg.n_tt < cfg.n_t)
            throw std::invalid_argument("n_tt must be at least n_t.");
        CMatrix v(cfg.n_t, cfg.n_tt);
        for (int q = 0; q < cfg.n_tt; ++q)
        {
            const double c = std::cos(q * std::numbers::pi / cfg.n_tt);
            for (int z = 0; z < cfg.n_t; ++z)
                v(z, q) = std::polar(1.0, -std::numbers::pi * z * c);
        }
        return v;
    }

    CMatrix dft_f(const SystemConfig &cfg)
    {
        if (cfg.n_cc < cfg.n_c)
            throw std::invalid_argument("n_cc must be at least n_c.");
        CMatrix f(cfg.n_c, cfg.n_cc);
        for (int l = 0; l < cfg.n_c; ++l)
            for (int q = 0; q < cfg.n_cc; ++q)
            {
                // l q mod N_cc keeps the argument small
                const long long r = (static_cast<long long>(l) * q) % cfg.n_cc;
                f(l, q) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / cfg.n_cc);
            }
        return f;
    }

    AdpTransform::AdpTransform(const SystemConfig &cfg) : cfg_(cfg)
    {
        validate(cfg);
        const CMatrix v = dft_v(cfg);
        vh_ = PlanarMatrix(cfg.n_tt, cfg.n_t);
        for (int q = 0; q < cfg.n_tt; ++q)
            for (int z = 0; z < cfg.n_t; ++z)
            {
                const auto c = std::conj(v(z, q));
                vh_.re[q * cfg.n_t + z] = c.real();
                vh_.im[q * cfg.n_t + z] = c.imag();
            }
        f_ = PlanarMatrix::from(dft_f(cfg));
    }

    AdpMatrix AdpTransform::apply(const CsiMatrix &h) const
    {
        if (h.rows() != static_cast<std::size_t>(cfg_.n_t) || h.cols() != static_cast<std::size_t>(cfg_.n_c))
            throw std::invalid_argument("CSI matrix dimensions do not match the system configuration.");

        const auto &k = simd::kernels();
        const std::size_t ntt = cfg_.n_tt, ncc = cfg_.n_cc, nt = cfg_.n_t, nc = cfg_.n_c;
        const PlanarMatrix hp = PlanarMatrix::from(h);

        PlanarMatrix tmp(ntt, nc);
        k.cgemm(ntt, nc, nt, vh_.re.data(), vh_.im.data(), hp.re.data(), hp.im.data(), tmp.re.data(), tmp.im.data());
        PlanarMatrix prod(ntt, ncc);
        k.cgemm(ntt, ncc, nc, tmp.re.data(), tmp.im.data(), f_.re.data(), f_.im.data(), prod.re.data(),
                prod.im.data());

        AdpMatrix a(ntt, ncc);
        k.magnitude(a.size(), prod.re.data(), prod.im.data(), a.data().data());
        return a;
    }

    AdpMatrix compute_adp(const CsiMatrix &h, const SystemConfig &cfg)
    {
        return AdpTransform(cfg).apply(h);
    }

    std::vector<AdpPeak> extract_peaks(const AdpMatrix &a, int n_max, int suppress_a, int suppress_d,
                                       double rel_threshold)
    {
        if (n_max < 1)
            throw std::invalid_argument("n_max must be at least 1.");
        if (!(rel_threshold > 0.0 && rel_threshold < 1.0))
            throw std::invalid_argument("rel_threshold must lie in (0, 1).");
        if (suppress_a < 0 || suppress_d < 0)
            throw std::invalid_argument("Suppression windows cannot be negative.");

        const int rows = static_cast<int>(a.rows());
        const int cols = static_cast<int>(a.cols());
        if (rows == 0 || cols == 0)
            return {};
        const auto data = a.data();
        const double global = *std::max_element(data.begin(), data.end());
        if (!(global > 0.0))
            return {};
        const double floor = rel_threshold * global;

        // Strict maximum, except that exact ties go to the first cell in row-major order so a flat-topped
        // peak (e.g. a delay halfway between two bins) still yields one peak.
        auto strict_max = [&](int r, int c) {
            const double v = a(r, c);
            for (int rr = std::max(0, r - suppress_a); rr <= std::min(rows - 1, r + suppress_a); ++rr)
                for (int cc = std::max(0, c - suppress_d); cc <= std::min(cols - 1, c + suppress_d); ++cc)
                {
                    if (rr == r && cc == c)
                        continue;
                    const bool earlier = rr < r || (rr == r && cc < c);
                    if (earlier ? !(a(rr, cc) < v) : !(a(rr, cc) <= v))
                        return false;
                }
            return true;
        };

        std::vector<AdpPeak> cands;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                if (a(r, c) >= floor && strict_max(r, c))
                    cands.push_back({r, c, a(r, c)});

        std::stable_sort(cands.begin(), cands.end(),
                         [](const AdpPeak &x, const AdpPeak &y) { return x.magnitude > y.magnitude; });

        std::vector<AdpPeak> out;
        for (const auto &p : cands)
        {
            if (static_cast<int>(out.size()) >= n_max)
                break;
            const bool suppressed = std::any_of(out.begin(), out.end(), [&](const AdpPeak &s) {
                return std::abs(s.angle_bin - p.angle_bin) <= suppress_a && std::abs(s.delay_bin - p.delay_bin) <= suppress_d;
            });
            if (!suppressed)
                out.push_back(p);
        }
        return out;
    }

    std::vector<AdpPeak> extract_peaks(const AdpMatrix &a, int n_max, const PeakParams &params)
    {
        return extract_peaks(a, n_max, params.suppress_a, params.suppress_d, params.rel_threshold);
    }

    double bin_to_aod(int q_a, const SystemConfig &cfg)
    {
        if (q_a < 0 || q_a >= cfg.n_tt)
            throw std::out_of_range("Angle bin out of range.");
        return q_a * std::numbers::pi / cfg.n_tt;
    }

    double bin_to_delay(int q_d, const SystemConfig &cfg)
    {
        if (q_d < 0 || q_d >= cfg.n_cc)
            throw std::out_of_range("Delay bin out of range.");
        return static_cast<double>(q_d) * cfg.n_c * cfg.t_s / cfg.n_cc;
    }

    void write_adp_csv(std::ostream &os, const AdpMatrix &a)
    {
        os << std::setprecision(17);
        for (std::size_t r = 0; r < a.rows(); ++r)
        {
            for (std::size_t c = 0; c < a.cols(); ++c)
                os << (c ? "," : "") << a(r, c);
            os << '\n';
        }
    }

} // namespace mapcsi
