#include <cstdlib>
#include <string_view>

#include "kernels.hpp"
#include "metaspec/error.hpp"

namespace metaspec::simd {

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(METASPEC_HAS_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) throw DomainError("simd: instruction set not available: " + std::string(name(isa)));
#if defined(METASPEC_HAS_AVX2)
  if (isa == Isa::avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("METASPEC_SIMD"); env && std::string_view(env) == "scalar")
    return detail::scalar_table();
  if (available(Isa::avx2)) return table(Isa::avx2);
  return detail::scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& t = select();
  return t;
}

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace metaspec::simd
