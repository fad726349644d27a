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

#include "mapcsi/simd/kernels.hpp"

#include <cmath>

namespace mapcsi::simd::scalar
{
    void cgemm(std::size_t m, std::size_t n, std::size_t k, const double *a_re, const double *a_im,
               const double *b_re, const double *b_im, double *c_re, double *c_im)
    {
        for (std::size_t i = 0; i < m; ++i)
        {
            double *cr = c_re + i * n;
            double *ci = c_im + i * n;
            for (std::size_t j = 0; j < n; ++j)
            {
                cr[j] = 0.0;
                ci[j] = 0.0;
            }
            for (std::size_t p = 0; p < k; ++p)
            {
                const double ar = a_re[i * k + p];
                const double ai = a_im[i * k + p];
                const double *br = b_re + p * n;
                const double *bi = b_im + p * n;
                for (std::size_t j = 0; j < n; ++j)
                {
                    cr[j] += ar * br[j] - ai * bi[j];
                    ci[j] += ar * bi[j] + ai * br[j];
                }
            }
        }
    }

    void magnitude(std::size_t n, const double *re, const double *im, double *out)
    {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = std::sqrt(re[i] * re[i] + im[i] * im[i]);
    }

} // namespace mapcsi::simd::scalar
