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

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace mapcsi;

namespace
{
    std::vector<double> random_vec(std::size_t n, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> g;
        std::vector<double> v(n);
        for (auto &x : v)
            x = g(rng);
        return v;
    }
} // namespace

TEST_SUITE("simd")
{
    TEST_CASE("scalar kernels are always available")
    {
        CHECK(simd::isa_available(simd::Isa::Scalar));
        CHECK(simd::kernels_for(simd::Isa::Scalar).isa == simd::Isa::Scalar);
    }

    TEST_CASE("scalar cgemm matches a naive complex product")
    {
        std::mt19937_64 rng(2);
        const std::size_t m = 5, n = 7, k = 3;
        const auto ar = random_vec(m * k, rng), ai = random_vec(m * k, rng);
        const auto br = random_vec(k * n, rng), bi = random_vec(k * n, rng);
        std::vector<double> cr(m * n, 99.0), ci(m * n, 99.0);
        simd::scalar::cgemm(m, n, k, ar.data(), ai.data(), br.data(), bi.data(), cr.data(), ci.data());
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
            {
                std::complex<double> s = 0.0;
                for (std::size_t p = 0; p < k; ++p)
                    s += std::complex<double>(ar[i * k + p], ai[i * k + p]) * std::complex<double>(br[p * n + j], bi[p * n + j]);
                CHECK(cr[i * n + j] == doctest::Approx(s.real()).epsilon(1e-14));
                CHECK(ci[i * n + j] == doctest::Approx(s.imag()).epsilon(1e-14));
            }
    }

#if defined(MAPCSI_HAVE_AVX2)
    TEST_CASE("AVX2 kernels agree with the scalar reference")
    {
        if (!simd::isa_available(simd::Isa::Avx2))
        {
            MESSAGE("CPU lacks AVX2/FMA; skipping");
            return;
        }
        const auto &s = simd::kernels_for(simd::Isa::Scalar);
        const auto &v = simd::kernels_for(simd::Isa::Avx2);
        std::mt19937_64 rng(8);
        // shapes exercise the 8- and 4-wide blocks and every tail length
        for (std::size_t m : {1u, 3u, 60u})
            for (std::size_t n : {1u, 3u, 4u, 5u, 8u, 13u, 180u})
                for (std::size_t k : {1u, 7u, 60u})
                {
                    const auto ar = random_vec(m * k, rng), ai = random_vec(m * k, rng);
                    const auto br = random_vec(k * n, rng), bi = random_vec(k * n, rng);
                    std::vector<double> sr(m * n), si(m * n), vr(m * n, 1.0), vi(m * n, 1.0);
                    s.cgemm(m, n, k, ar.data(), ai.data(), br.data(), bi.data(), sr.data(), si.data());
                    v.cgemm(m, n, k, ar.data(), ai.data(), br.data(), bi.data(), vr.data(), vi.data());
                    double worst = 0.0;
                    for (std::size_t i = 0; i < m * n; ++i)
                        worst = std::max({worst, std::abs(sr[i] - vr[i]), std::abs(si[i] - vi[i])});
                    CHECK(worst <= 1e-12 * std::max<double>(1.0, static_cast<double>(k)));
                }
        for (std::size_t n : {0u, 1u, 3u, 4u, 9u, 1000u})
        {
            const auto re = random_vec(n, rng), im = random_vec(n, rng);
            std::vector<double> a(n), b(n);
            s.magnitude(n, re.data(), im.data(), a.data());
            v.magnitude(n, re.data(), im.data(), b.data());
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::abs(a[i] - b[i]) <= 1e-12);
        }
    }
#endif

    TEST_CASE("dispatch picks a usable table")
    {
        const auto &k = simd::kernels();
        CHECK(simd::isa_available(k.isa));
        CHECK_FALSE(simd::to_string(k.isa).empty());
    }
}
