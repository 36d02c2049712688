#pragma once

#include "metaspec/simd.hpp"

namespace metaspec::simd::detail {

const KernelTable& scalar_table();
#if defined(METASPEC_HAS_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace metaspec::simd::detail
