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

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace mapcsi::simd
{
    namespace
    {
        const KernelTable scalar_table{Isa::Scalar, &scalar::cgemm, &scalar::magnitude};
#if defined(MAPCSI_HAVE_AVX2)
        const KernelTable avx2_table{Isa::Avx2, &avx2::cgemm, &avx2::magnitude};
#endif

        bool force_scalar()
        {
            const char *v = std::getenv("MAPCSI_FORCE_SCALAR");
            return v != nullptr && std::strcmp(v, "") != 0 && std::strcmp(v, "0") != 0;
        }
    } // namespace

    std::string_view to_string(Isa isa)
    {
        switch (isa)
        {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
        }
        return "unknown";
    }

    bool isa_available(Isa isa)
    {
        switch (isa)
        {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(MAPCSI_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        }
        return false;
    }

    const KernelTable &kernels_for(Isa isa)
    {
        if (!isa_available(isa))
            throw std::invalid_argument("Kernel variant '" + std::string(to_string(isa)) + "' is not available.");
#if defined(MAPCSI_HAVE_AVX2)
        if (isa == Isa::Avx2)
            return avx2_table;
#endif
        return scalar_table;
    }

    const KernelTable &kernels()
    {
        static const KernelTable &active = [] () -> const KernelTable & {
            if (!force_scalar() && isa_available(Isa::Avx2))
                return kernels_for(Isa::Avx2);
            return scalar_table;
        }();
        return active;
    }

} // namespace mapcsi::simd
