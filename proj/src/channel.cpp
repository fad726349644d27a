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

#include "mapcsi/channel.hpp"
#include "mapcsi/simd/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mapcsi
{
    SystemConfig SystemConfig::with_adp_size(int tt, int cc) const
    {
        SystemConfig c = *this;
        c.n_tt = tt;
        c.n_cc = cc;
        return c;
    }

    void validate(const SystemConfig &cfg)
    {
        if (cfg.n_t < 1 || cfg.n_c < 1)
            throw std::invalid_argument("Antenna and sub-carrier counts must be positive.");
        if (cfg.n_tt < cfg.n_t)
            throw std::invalid_argument("n_tt must be at least n_t.");
        if (cfg.n_cc < cfg.n_c)
            throw std::invalid_argument("n_cc must be at least n_c.");
        if (!(cfg.t_s > 0.0))
            throw std::invalid_argument("Sample interval must be positive.");
        if (!(cfg.wavelength > 0.0))
            throw std::invalid_argument("Wavelength must be positive.");
        if (std::abs(cfg.spacing - cfg.wavelength / 2.0) > 1e-12 * cfg.wavelength)
            throw std::invalid_argument("Antenna spacing must be half a wavelength.");
    }

    std::complex<double> path_gain(double length, int bounces, int crossings, double wavelength)
    {
        if (!(length > 0.0))
            throw std::invalid_argument("Path length must be positive.");
        if (bounces < 0 || crossings < 0)
            throw std::invalid_argument("Bounce and crossing counts cannot be negative.");
        const double amp = std::pow(kReflectionAmplitude, bounces) * std::pow(kTransmissionAmplitude, crossings) / length;
        return std::polar(amp, -2.0 * std::numbers::pi * length / wavelength);
    }

    namespace
    {
        // Intersection parameter of segment p->q with the surface line, if it lands on the surface extent
        std::optional<Point2> hit_surface(const Point2 &p, const Point2 &q, const Surface &s)
        {
            const Point2 d = q - p;
            const Point2 seg = s.b - s.a;
            const double denom = cross(d, seg);
            if (std::abs(denom) <= 1e-15 * norm(seg) * norm(d))
                return std::nullopt;
            const Point2 ao = s.a - p;
            const double t = cross(ao, seg) / denom;
            const double u = cross(ao, d) / denom;
            const double len = norm(d);
            if (t * len < kHitEpsilon || (1.0 - t) * len < kHitEpsilon || u < 0.0 || u > 1.0)
                return std::nullopt;
            return p + t * d;
        }

        struct Unfolded
        {
            std::vector<Point2> vertices; // bs, reflection points..., user
            int crossings = 0;
        };

        // Validates the reflection sequence and returns its vertices, or nullopt if unrealizable or blocked
        std::optional<Unfolded> unfold(const EnvironmentMap &map, const Point2 &user, std::span<const std::size_t> seq)
        {
            // images[j] = user mirrored through seq[k-1], ..., seq[j]
            const std::size_t k = seq.size();
            std::vector<Point2> images(k + 1);
            images[k] = user;
            for (std::size_t j = k; j-- > 0;)
                images[j] = reflect_point(images[j + 1], map.surfaces[seq[j]]);

            Unfolded u;
            u.vertices.push_back(map.bs);
            for (std::size_t j = 0; j < k; ++j)
            {
                const auto p = hit_surface(u.vertices.back(), images[j], map.surfaces[seq[j]]);
                if (!p)
                    return std::nullopt;
                u.vertices.push_back(*p);
            }
            u.vertices.push_back(user);

            for (std::size_t leg = 0; leg + 1 < u.vertices.size(); ++leg)
            {
                for (const std::size_t s : segment_crossings(u.vertices[leg], u.vertices[leg + 1], map.surfaces))
                {
                    // The surfaces a leg starts or ends on are touched at the endpoints only
                    if ((leg > 0 && s == seq[leg - 1]) || (leg < k && s == seq[leg]))
                        continue;
                    if (map.surfaces[s].material == Material::Reflective)
                        return std::nullopt;
                    ++u.crossings;
                }
            }
            return u;
        }

        void enumerate_sequences(const EnvironmentMap &map, const Point2 &user, const SystemConfig &cfg, int max_order,
                                 std::vector<std::size_t> &seq, std::vector<Mpc> &out)
        {
            if (const auto u = unfold(map, user, seq))
            {
                double length = 0.0;
                for (std::size_t i = 1; i < u->vertices.size(); ++i)
                    length += distance(u->vertices[i - 1], u->vertices[i]);

                Mpc m;
                m.aod = direction_aod(u->vertices[1] - u->vertices[0]);
                m.length = length;
                m.toa = length / kSpeedOfLight;
                m.sampled_delay = m.toa / cfg.t_s;
                m.bounces = static_cast<int>(seq.size());
                m.crossings = u->crossings;
                m.gain = path_gain(length, m.bounces, m.crossings, cfg.wavelength);
                out.push_back(m);
            }
            if (static_cast<int>(seq.size()) >= max_order)
                return;
            for (std::size_t s = 0; s < map.surfaces.size(); ++s)
            {
                if (!seq.empty() && seq.back() == s)
                    continue;
                seq.push_back(s);
                enumerate_sequences(map, user, cfg, max_order, seq, out);
                seq.pop_back();
            }
        }
    } // namespace

    std::vector<Mpc> enumerate_paths(const EnvironmentMap &map, const Point2 &user, const SystemConfig &cfg,
                                     int max_order)
    {
        if (!in_aoi(user, map.aoi))
            throw std::invalid_argument("User position lies outside the area of interest.");
        if (max_order < 0)
            throw std::invalid_argument("max_order cannot be negative.");
        if (distance(user, map.bs) <= kHitEpsilon)
            throw std::invalid_argument("User coincides with the BS.");

        std::vector<Mpc> out;
        std::vector<std::size_t> seq;
        enumerate_sequences(map, user, cfg, max_order, seq, out);
        return out;
    }

    std::vector<std::complex<double>> array_response(double aod, const SystemConfig &cfg)
    {
        std::vector<std::complex<double>> e(static_cast<std::size_t>(cfg.n_t));
        const double k = -2.0 * std::numbers::pi * cfg.spacing * std::cos(aod) / cfg.wavelength;
        for (int z = 0; z < cfg.n_t; ++z)
            e[z] = std::polar(1.0, k * z);
        return e;
    }

    CsiMatrix synthesize_csi(std::span<const Mpc> mpcs, const SystemConfig &cfg)
    {
        validate(cfg);
        if (mpcs.empty())
            throw std::invalid_argument("Cannot synthesize CSI from an empty path list.");

        // H = U * W with U[:, p] = gain_p e(aod_p) and W[p, l] = exp(-j 2 pi l n_p / N_c)
        const std::size_t P = mpcs.size();
        const std::size_t nt = static_cast<std::size_t>(cfg.n_t);
        const std::size_t nc = static_cast<std::size_t>(cfg.n_c);
        PlanarMatrix u(nt, P), w(P, nc);
        for (std::size_t p = 0; p < P; ++p)
        {
            const auto e = array_response(mpcs[p].aod, cfg);
            for (std::size_t z = 0; z < nt; ++z)
            {
                const auto v = mpcs[p].gain * e[z];
                u.re[z * P + p] = v.real();
                u.im[z * P + p] = v.imag();
            }
            for (std::size_t l = 0; l < nc; ++l)
            {
                // reduce the phase before evaluating to keep precision for large delays
                const double cycles = std::fmod(static_cast<double>(l) * mpcs[p].sampled_delay, static_cast<double>(nc));
                const auto v = std::polar(1.0, -2.0 * std::numbers::pi * cycles / cfg.n_c);
                w.re[p * nc + l] = v.real();
                w.im[p * nc + l] = v.imag();
            }
        }

        PlanarMatrix h(nt, nc);
        simd::kernels().cgemm(nt, nc, P, u.re.data(), u.im.data(), w.re.data(), w.im.data(), h.re.data(), h.im.data());
        return h.to_complex();
    }

    void add_noise(CsiMatrix &h, double snr_db, std::mt19937_64 &rng)
    {
        double power = 0.0;
        for (const auto &v : h.data())
            power += std::norm(v);
        if (h.size() == 0 || power == 0.0)
            return;
        power /= static_cast<double>(h.size());
        const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0) / 2.0);
        std::normal_distribution<double> nd(0.0, sigma);
        for (auto &v : h.data())
            v += std::complex<double>(nd(rng), nd(rng));
    }

} // namespace mapcsi
