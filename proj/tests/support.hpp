#pragma once

// Shared helpers for the unit tests: Eigen conversions used as independent
// reference implementations, and seeded random generators.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "nmrsearch/operator_matrix.hpp"
#include "nmrsearch/pulse_engine.hpp"

namespace testing {

using nmrsearch::cplx;
using nmrsearch::OperatorMatrix;
using EMat = Eigen::MatrixXcd;

inline EMat to_eigen(const OperatorMatrix& m) {
  EMat e(m.dim(), m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) e(r, c) = m(r, c);
  return e;
}

inline OperatorMatrix from_eigen(const EMat& e) {
  OperatorMatrix m(static_cast<std::size_t>(e.rows()));
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) m(r, c) = e(r, c);
  return m;
}

inline double max_diff(const EMat& a, const OperatorMatrix& b) {
  return (a - to_eigen(b)).cwiseAbs().maxCoeff();
}

// Pauli-based single-spin operators, built by hand.
inline EMat spin_op(char axis) {
  EMat m(2, 2);
  const cplx i(0.0, 1.0);
  switch (axis) {
    case 'x': m << 0.0, 0.5, 0.5, 0.0; break;
    case 'y': m << 0.0, -0.5 * i, 0.5 * i, 0.0; break;
    case 'z': m << 0.5, 0.0, 0.0, -0.5; break;
    default: m = EMat::Identity(2, 2);
  }
  return m;
}

inline EMat kron(const EMat& a, const EMat& b) {
  EMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// op on `spin` of `total`, spin 0 leftmost in the Kronecker chain.
inline EMat on_spin(const EMat& op, std::size_t spin, std::size_t total) {
  EMat out = EMat::Identity(1, 1);
  for (std::size_t s = 0; s < total; ++s) out = kron(out, s == spin ? op : EMat::Identity(2, 2));
  return out;
}

inline OperatorMatrix random_hermitian(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  OperatorMatrix m(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    m(r, r) = g(rng);
    for (std::size_t c = r + 1; c < dim; ++c) {
      m(r, c) = cplx(g(rng), g(rng));
      m(c, r) = std::conj(m(r, c));
    }
  }
  return m;
}

inline OperatorMatrix random_matrix(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  OperatorMatrix m(dim);
  for (auto& v : m.data()) v = cplx(g(rng), g(rng));
  return m;
}

// Random system on `total` spins with a mix of couplings, including zeros.
inline nmrsearch::SpinSystem random_system(std::mt19937_64& rng, std::size_t total) {
  std::uniform_real_distribution<double> off(-500.0, 500.0), j(5.0, 80.0);
  nmrsearch::SpinSystem s(total);
  for (std::size_t k = 0; k < total; ++k) s.set_offset(k, off(rng));
  for (std::size_t a = 0; a < total; ++a)
    for (std::size_t b = a + 1; b < total; ++b) s.set_coupling(a, b, (rng() % 4 == 0) ? 0.0 : j(rng));
  // Every spin must couple to spin 0 so J-referenced delays resolve.
  for (std::size_t b = 1; b < total; ++b)
    if (s.coupling(0, b) == 0.0) s.set_coupling(0, b, j(rng));
  return s;
}

// Random gradient-free (when allow_grad is false) event list.
inline std::vector<nmrsearch::PulseEvent> random_sequence(std::mt19937_64& rng,
                                                          const nmrsearch::SpinSystem& s,
                                                          std::size_t length, bool allow_grad) {
  using namespace nmrsearch;
  std::uniform_real_distribution<double> ang(-6.5, 6.5), dt(0.0, 0.05);
  std::vector<PulseEvent> out;
  const std::size_t total = s.total();
  auto subset = [&](bool non_empty) {
    std::vector<std::size_t> v;
    for (std::size_t k = 0; k < total; ++k)
      if (rng() % 2) v.push_back(k);
    if (non_empty && v.empty()) v.push_back(rng() % total);
    return v;
  };
  for (std::size_t e = 0; e < length; ++e) {
    const auto kind = rng() % (allow_grad ? 5 : 4);
    if (kind < 2) {
      out.push_back(Pulse{subset(true), ang(rng), static_cast<Axis>(rng() % 4)});
    } else if (kind == 2) {
      out.push_back(Delay{DelayTime::seconds(dt(rng)), subset(false)});
    } else if (kind == 3) {
      const std::size_t k = 1 + rng() % (total - 1);
      out.push_back(Delay{DelayTime::inverse_coupling(1.0 + rng() % 8, 0, k), subset(false)});
    } else {
      out.push_back(Gradient{});
    }
  }
  return out;
}

}  // namespace testing
