#include "nmrsearch/kernels.hpp"

#include <immintrin.h>

#include <algorithm>

// Two complex doubles per __m256d, laid out [re0 im0 re1 im1].

namespace nmrsearch::kernels::avx2 {
namespace {

inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// Packed complex product a * b.
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

// Broadcast scalar s times packed b.
inline __m256d cmul_bcast(__m256d s_re, __m256d s_im, __m256d b) {
  const __m256d b_sw = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(b, s_re, _mm256_mul_pd(b_sw, s_im));
}

}  // namespace

void matmul(const cplx* a, const cplx* b, cplx* c, std::size_t n) {
  std::fill(c, c + n * n, cplx{});
  const std::size_t vec_end = n & ~std::size_t{1};
  for (std::size_t i = 0; i < n; ++i) {
    cplx* crow = c + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a[i * n + k];
      if (aik == cplx{}) continue;
      const __m256d s_re = _mm256_set1_pd(aik.real());
      const __m256d s_im = _mm256_set1_pd(aik.imag());
      const cplx* brow = b + k * n;
      std::size_t j = 0;
      for (; j < vec_end; j += 2) {
        store2(crow + j, _mm256_add_pd(load2(crow + j), cmul_bcast(s_re, s_im, load2(brow + j))));
      }
      for (; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void rows_2x2(cplx* data, std::size_t dim, std::size_t stride, const cplx* u) {
  const __m256d u00r = _mm256_set1_pd(u[0].real()), u00i = _mm256_set1_pd(u[0].imag());
  const __m256d u01r = _mm256_set1_pd(u[1].real()), u01i = _mm256_set1_pd(u[1].imag());
  const __m256d u10r = _mm256_set1_pd(u[2].real()), u10i = _mm256_set1_pd(u[2].imag());
  const __m256d u11r = _mm256_set1_pd(u[3].real()), u11i = _mm256_set1_pd(u[3].imag());
  const std::size_t vec_end = dim & ~std::size_t{1};
  for (std::size_t r = 0; r < dim; ++r) {
    if (r & stride) continue;
    cplx* row0 = data + r * dim;
    cplx* row1 = data + (r + stride) * dim;
    std::size_t j = 0;
    for (; j < vec_end; j += 2) {
      const __m256d x0 = load2(row0 + j);
      const __m256d x1 = load2(row1 + j);
      store2(row0 + j, _mm256_add_pd(cmul_bcast(u00r, u00i, x0), cmul_bcast(u01r, u01i, x1)));
      store2(row1 + j, _mm256_add_pd(cmul_bcast(u10r, u10i, x0), cmul_bcast(u11r, u11i, x1)));
    }
    for (; j < dim; ++j) {
      const cplx x0 = row0[j];
      const cplx x1 = row1[j];
      row0[j] = u[0] * x0 + u[1] * x1;
      row1[j] = u[2] * x0 + u[3] * x1;
    }
  }
}

void outer_phase(cplx* data, const cplx* phase, std::size_t dim) {
  const std::size_t vec_end = dim & ~std::size_t{1};
  // conj(phase[j]) flips the sign of the odd lanes.
  const __m256d conj_mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    const cplx pi = phase[i];
    const __m256d s_re = _mm256_set1_pd(pi.real());
    const __m256d s_im = _mm256_set1_pd(pi.imag());
    cplx* row = data + i * dim;
    std::size_t j = 0;
    for (; j < vec_end; j += 2) {
      const __m256d q = _mm256_xor_pd(load2(phase + j), conj_mask);
      const __m256d w = cmul_bcast(s_re, s_im, q);
      store2(row + j, cmul(load2(row + j), w));
    }
    for (; j < dim; ++j) row[j] *= pi * std::conj(phase[j]);
  }
}

void phasor_accumulate(cplx* phasor, const cplx* step, std::size_t terms, cplx* out,
                       std::size_t count) {
  const std::size_t vec_end = terms & ~std::size_t{1};
  for (std::size_t m = 0; m < count; ++m) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c < vec_end; c += 2) {
      const __m256d p = load2(phasor + c);
      acc = _mm256_add_pd(acc, p);
      store2(phasor + c, cmul(p, load2(step + c)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    cplx sum{lanes[0] + lanes[2], lanes[1] + lanes[3]};
    for (; c < terms; ++c) {
      sum += phasor[c];
      phasor[c] *= step[c];
    }
    out[m] = sum;
  }
}

}  // namespace nmrsearch::kernels::avx2
