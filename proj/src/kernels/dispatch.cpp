#include <cstdlib>
#include <string>

#include "nmrsearch/kernels.hpp"

namespace nmrsearch::kernels {

bool cpu_has_avx2() {
#if defined(NMRSEARCH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::Scalar, &scalar::matmul, &scalar::rows_2x2,
                                 &scalar::outer_phase, &scalar::phasor_accumulate};
  return table;
}

#if defined(NMRSEARCH_HAVE_AVX2)
const KernelTable& avx2_table() {
  static const KernelTable table{Isa::Avx2, &avx2::matmul, &avx2::rows_2x2, &avx2::outer_phase,
                                 &avx2::phasor_accumulate};
  return table;
}
#endif

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* forced = std::getenv("NMRSEARCH_ISA");
    if (forced != nullptr && std::string(forced) == "scalar") return scalar_table();
#if defined(NMRSEARCH_HAVE_AVX2)
    if (cpu_has_avx2()) return avx2_table();
#endif
    return scalar_table();
  }();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace nmrsearch::kernels
