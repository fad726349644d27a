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

#ifndef MAPCSI_SIMD_KERNELS_HPP
#define MAPCSI_SIMD_KERNELS_HPP

// Data-parallel inner loops of the channel synthesis and ADP transform.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds with MAPCSI_HAVE_AVX2, an AVX2/FMA
// variant. The variant is chosen once at runtime from CPUID; the environment variable MAPCSI_FORCE_SCALAR=1 pins
// the reference path. All matrices are row-major with split real/imaginary planes.

#include <cstddef>
#include <string_view>

namespace mapcsi::simd
{
    enum class Isa
    {
        Scalar,
        Avx2
    };

    std::string_view to_string(Isa isa);

    struct KernelTable
    {
        Isa isa;

        // C (m x n) = A (m x k) * B (k x n), complex, planar storage; C is overwritten
        void (*cgemm)(std::size_t m, std::size_t n, std::size_t k,
                      const double *a_re, const double *a_im,
                      const double *b_re, const double *b_im,
                      double *c_re, double *c_im);

        // out[i] = |re[i] + j im[i]|
        void (*magnitude)(std::size_t n, const double *re, const double *im, double *out);
    };

    // True if the ISA variant was compiled in and the running CPU supports it
    bool isa_available(Isa isa);

    // Kernel table for a specific ISA; throws std::invalid_argument if unavailable
    const KernelTable &kernels_for(Isa isa);

    // Best available table (cached after the first call)
    const KernelTable &kernels();

    namespace scalar
    {
        void cgemm(std::size_t m, std::size_t n, std::size_t k, const double *a_re, const double *a_im,
                   const double *b_re, const double *b_im, double *c_re, double *c_im);
        void magnitude(std::size_t n, const double *re, const double *im, double *out);
    } // namespace scalar

#if defined(MAPCSI_HAVE_AVX2)
    namespace avx2
    {
        void cgemm(std::size_t m, std::size_t n, std::size_t k, const double *a_re, const double *a_im,
                   const double *b_re, const double *b_im, double *c_re, double *c_im);
        void magnitude(std::size_t n, const double *re, const double *im, double *out);
    } // namespace avx2
#endif

} // namespace mapcsi::simd

#endif
