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

// Compiled with -mavx2 -mfma; only reached after a CPUID check in dispatch.cpp.

#include "mapcsi/simd/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace mapcsi::simd::avx2
{
    void cgemm(std::size_t m, std::size_t n, std::size_t k, const double *a_re, const double *a_im,
               const double *b_re, const double *b_im, double *c_re, double *c_im)
    {
        const std::size_t n8 = n - n % 8;
        const std::size_t n4 = n - n % 4;
        for (std::size_t i = 0; i < m; ++i)
        {
            const double *ar_row = a_re + i * k;
            const double *ai_row = a_im + i * k;
            double *cr = c_re + i * n;
            double *ci = c_im + i * n;

            // Two 4-wide column blocks kept in registers across the whole k loop
            std::size_t j = 0;
            for (; j < n8; j += 8)
            {
                __m256d acc_r0 = _mm256_setzero_pd(), acc_i0 = _mm256_setzero_pd();
                __m256d acc_r1 = _mm256_setzero_pd(), acc_i1 = _mm256_setzero_pd();
                for (std::size_t p = 0; p < k; ++p)
                {
                    const __m256d ar = _mm256_broadcast_sd(ar_row + p);
                    const __m256d ai = _mm256_broadcast_sd(ai_row + p);
                    const double *br = b_re + p * n + j;
                    const double *bi = b_im + p * n + j;
                    const __m256d br0 = _mm256_loadu_pd(br), bi0 = _mm256_loadu_pd(bi);
                    const __m256d br1 = _mm256_loadu_pd(br + 4), bi1 = _mm256_loadu_pd(bi + 4);
                    acc_r0 = _mm256_fmadd_pd(ar, br0, acc_r0);
                    acc_r0 = _mm256_fnmadd_pd(ai, bi0, acc_r0);
                    acc_i0 = _mm256_fmadd_pd(ar, bi0, acc_i0);
                    acc_i0 = _mm256_fmadd_pd(ai, br0, acc_i0);
                    acc_r1 = _mm256_fmadd_pd(ar, br1, acc_r1);
                    acc_r1 = _mm256_fnmadd_pd(ai, bi1, acc_r1);
                    acc_i1 = _mm256_fmadd_pd(ar, bi1, acc_i1);
                    acc_i1 = _mm256_fmadd_pd(ai, br1, acc_i1);
                }
                _mm256_storeu_pd(cr + j, acc_r0);
                _mm256_storeu_pd(ci + j, acc_i0);
                _mm256_storeu_pd(cr + j + 4, acc_r1);
                _mm256_storeu_pd(ci + j + 4, acc_i1);
            }
            for (; j < n4; j += 4)
            {
                __m256d acc_r = _mm256_setzero_pd(), acc_i = _mm256_setzero_pd();
                for (std::size_t p = 0; p < k; ++p)
                {
                    const __m256d ar = _mm256_broadcast_sd(ar_row + p);
                    const __m256d ai = _mm256_broadcast_sd(ai_row + p);
                    const __m256d br = _mm256_loadu_pd(b_re + p * n + j);
                    const __m256d bi = _mm256_loadu_pd(b_im + p * n + j);
                    acc_r = _mm256_fmadd_pd(ar, br, acc_r);
                    acc_r = _mm256_fnmadd_pd(ai, bi, acc_r);
                    acc_i = _mm256_fmadd_pd(ar, bi, acc_i);
                    acc_i = _mm256_fmadd_pd(ai, br, acc_i);
                }
                _mm256_storeu_pd(cr + j, acc_r);
                _mm256_storeu_pd(ci + j, acc_i);
            }
            for (; j < n; ++j)
            {
                double sr = 0.0, si = 0.0;
                for (std::size_t p = 0; p < k; ++p)
                {
                    const double br = b_re[p * n + j];
                    const double bi = b_im[p * n + j];
                    sr += ar_row[p] * br - ai_row[p] * bi;
                    si += ar_row[p] * bi + ai_row[p] * br;
                }
                cr[j] = sr;
                ci[j] = si;
            }
        }
    }

    void magnitude(std::size_t n, const double *re, const double *im, double *out)
    {
        const std::size_t n4 = n - n % 4;
        std::size_t i = 0;
        for (; i < n4; i += 4)
        {
            const __m256d r = _mm256_loadu_pd(re + i);
            const __m256d q = _mm256_loadu_pd(im + i);
            const __m256d sq = _mm256_fmadd_pd(r, r, _mm256_mul_pd(q, q));
            _mm256_storeu_pd(out + i, _mm256_sqrt_pd(sq));
        }
        for (; i < n; ++i)
            out[i] = std::sqrt(re[i] * re[i] + im[i] * im[i]);
    }

} // namespace mapcsi::simd::avx2
