#include "nmrsearch/operator_matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "nmrsearch/errors.hpp"
#include "nmrsearch/kernels.hpp"

namespace nmrsearch {
namespace {

void require_same_dim(const OperatorMatrix& a, const OperatorMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw SimulationError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                          " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

bool is_power_of_two(std::size_t value) { return value != 0 && std::has_single_bit(value); }

OperatorMatrix::OperatorMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
  if (dim < 2 || !is_power_of_two(dim)) {
    throw SimulationError("operator dimension must be a power of two >= 2, got " +
                          std::to_string(dim));
  }
}

OperatorMatrix::OperatorMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : OperatorMatrix(rows.size()) {
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != dim_) throw SimulationError("operator literal is not square");
    std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * dim_));
    ++r;
  }
}

OperatorMatrix OperatorMatrix::identity(std::size_t dim) {
  OperatorMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

OperatorMatrix OperatorMatrix::diagonal(std::span<const cplx> values) {
  OperatorMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

OperatorMatrix OperatorMatrix::diagonal(std::span<const double> values) {
  OperatorMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

std::size_t OperatorMatrix::spins() const {
  return dim_ == 0 ? 0 : static_cast<std::size_t>(std::countr_zero(dim_));
}

OperatorMatrix OperatorMatrix::adjoint() const {
  OperatorMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

cplx OperatorMatrix::trace() const {
  cplx t{};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

std::vector<cplx> OperatorMatrix::diagonal_values() const {
  std::vector<cplx> d(dim_);
  for (std::size_t i = 0; i < dim_; ++i) d[i] = (*this)(i, i);
  return d;
}

bool OperatorMatrix::is_hermitian(double tol) const {
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r; c < dim_; ++c)
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
  return true;
}

bool OperatorMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& other) {
  require_same_dim(*this, other, "operator +");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& other) {
  require_same_dim(*this, other, "operator -");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(cplx scale) {
  for (auto& z : data_) z *= scale;
  return *this;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b, "operator *");
  OperatorMatrix c(a.dim());
  kernels::active().matmul(a.data().data(), b.data().data(), c.data().data(), a.dim());
  return c;
}

double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b, "max_abs_diff");
  double worst = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) worst = std::max(worst, std::abs(da[i] - db[i]));
  return worst;
}

bool approx_equal(const OperatorMatrix& a, const OperatorMatrix& b, double tol) {
  return a.dim() == b.dim() && max_abs_diff(a, b) <= tol;
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  OperatorMatrix out(na * nb);
  for (std::size_t ra = 0; ra < na; ++ra)
    for (std::size_t ca = 0; ca < na; ++ca) {
      const cplx s = a(ra, ca);
      if (s == cplx{}) continue;
      for (std::size_t rb = 0; rb < nb; ++rb)
        for (std::size_t cb = 0; cb < nb; ++cb) out(ra * nb + rb, ca * nb + cb) = s * b(rb, cb);
    }
  return out;
}

OperatorMatrix conjugate(const OperatorMatrix& u, const OperatorMatrix& rho) {
  return (u * rho) * u.adjoint();
}

double unitarity_defect(const OperatorMatrix& u) {
  return max_abs_diff(u.adjoint() * u, OperatorMatrix::identity(u.dim()));
}

}  // namespace nmrsearch
