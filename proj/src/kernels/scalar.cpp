#include "nmrsearch/kernels.hpp"

#include <algorithm>

namespace nmrsearch::kernels::scalar {

void matmul(const cplx* a, const cplx* b, cplx* c, std::size_t n) {
  std::fill(c, c + n * n, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    cplx* crow = c + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a[i * n + k];
      if (aik == cplx{}) continue;
      const cplx* brow = b + k * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void rows_2x2(cplx* data, std::size_t dim, std::size_t stride, const cplx* u) {
  const cplx u00 = u[0], u01 = u[1], u10 = u[2], u11 = u[3];
  for (std::size_t r = 0; r < dim; ++r) {
    if (r & stride) continue;
    cplx* row0 = data + r * dim;
    cplx* row1 = data + (r + stride) * dim;
    for (std::size_t j = 0; j < dim; ++j) {
      const cplx x0 = row0[j];
      const cplx x1 = row1[j];
      row0[j] = u00 * x0 + u01 * x1;
      row1[j] = u10 * x0 + u11 * x1;
    }
  }
}

void outer_phase(cplx* data, const cplx* phase, std::size_t dim) {
  for (std::size_t i = 0; i < dim; ++i) {
    const cplx pi = phase[i];
    cplx* row = data + i * dim;
    for (std::size_t j = 0; j < dim; ++j) row[j] *= pi * std::conj(phase[j]);
  }
}

void phasor_accumulate(cplx* phasor, const cplx* step, std::size_t terms, cplx* out,
                       std::size_t count) {
  for (std::size_t m = 0; m < count; ++m) {
    cplx sum{};
    for (std::size_t c = 0; c < terms; ++c) {
      sum += phasor[c];
      phasor[c] *= step[c];
    }
    out[m] = sum;
  }
}

}  // namespace nmrsearch::kernels::scalar
