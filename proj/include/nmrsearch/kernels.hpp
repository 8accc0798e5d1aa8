#pragma once

// Data-parallel inner loops of the simulator.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is picked once at first use from CPUID; the
// environment variable NMRSEARCH_ISA=scalar forces the reference path.
// Complex values are stored interleaved (re, im), matrices row-major.

#include <complex>
#include <cstddef>
#include <string_view>

namespace nmrsearch::kernels {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  // c = a * b for square n x n matrices. c must not alias a or b.
  void (*matmul)(const cplx* a, const cplx* b, cplx* c, std::size_t n);
  // For every row pair (r, r + stride) with (r & stride) == 0:
  //   [row_r; row_{r+stride}] <- u * [row_r; row_{r+stride}]
  // u is a row-major 2x2 matrix. stride is a power of two below dim.
  void (*rows_2x2)(cplx* data, std::size_t dim, std::size_t stride, const cplx* u);
  // data[i][j] *= phase[i] * conj(phase[j])
  void (*outer_phase)(cplx* data, const cplx* phase, std::size_t dim);
  // out[m] = sum_c phasor[c], then phasor[c] *= step[c]; for m in [0, count).
  void (*phasor_accumulate)(cplx* phasor, const cplx* step, std::size_t terms,
                            cplx* out, std::size_t count);
};

namespace scalar {
void matmul(const cplx* a, const cplx* b, cplx* c, std::size_t n);
void rows_2x2(cplx* data, std::size_t dim, std::size_t stride, const cplx* u);
void outer_phase(cplx* data, const cplx* phase, std::size_t dim);
void phasor_accumulate(cplx* phasor, const cplx* step, std::size_t terms, cplx* out,
                       std::size_t count);
}  // namespace scalar

#if defined(NMRSEARCH_HAVE_AVX2)
namespace avx2 {
void matmul(const cplx* a, const cplx* b, cplx* c, std::size_t n);
void rows_2x2(cplx* data, std::size_t dim, std::size_t stride, const cplx* u);
void outer_phase(cplx* data, const cplx* phase, std::size_t dim);
void phasor_accumulate(cplx* phasor, const cplx* step, std::size_t terms, cplx* out,
                       std::size_t count);
}  // namespace avx2
#endif

// True when the running CPU can execute the AVX2 table.
bool cpu_has_avx2();

const KernelTable& scalar_table();
#if defined(NMRSEARCH_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

// The table selected for this process.
const KernelTable& active();

std::string_view isa_name(Isa isa);

}  // namespace nmrsearch::kernels
