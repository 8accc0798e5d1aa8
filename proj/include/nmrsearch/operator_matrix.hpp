#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nmrsearch {

using cplx = std::complex<double>;

// Dense square complex matrix over a Zeeman product basis. The dimension is
// always a power of two, at least 2. Storage is row-major.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(std::size_t dim);
  // Row-major literal, used for fixtures: {{1, 0}, {0, 1}}.
  OperatorMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static OperatorMatrix identity(std::size_t dim);
  static OperatorMatrix diagonal(std::span<const cplx> values);
  static OperatorMatrix diagonal(std::span<const double> values);

  std::size_t dim() const { return dim_; }
  // Number of spins-1/2 spanned, log2(dim).
  std::size_t spins() const;
  bool empty() const { return dim_ == 0; }

  cplx& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
  const cplx& operator()(std::size_t row, std::size_t col) const { return data_[row * dim_ + col]; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  OperatorMatrix adjoint() const;
  cplx trace() const;
  std::vector<cplx> diagonal_values() const;

  bool is_hermitian(double tol) const;
  bool all_finite() const;

  OperatorMatrix& operator+=(const OperatorMatrix& other);
  OperatorMatrix& operator-=(const OperatorMatrix& other);
  OperatorMatrix& operator*=(cplx scale);

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }
  friend OperatorMatrix operator*(OperatorMatrix a, cplx s) { return a *= s; }
  friend OperatorMatrix operator*(cplx s, OperatorMatrix a) { return a *= s; }
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);

  friend bool operator==(const OperatorMatrix&, const OperatorMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

// Largest entrywise modulus of a - b. Dimensions must match.
double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b);
bool approx_equal(const OperatorMatrix& a, const OperatorMatrix& b, double tol);

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);

// u * rho * u^dagger
OperatorMatrix conjugate(const OperatorMatrix& u, const OperatorMatrix& rho);

// Largest |(u^dagger u - 1)_ij|.
double unitarity_defect(const OperatorMatrix& u);

bool is_power_of_two(std::size_t value);

}  // namespace nmrsearch
