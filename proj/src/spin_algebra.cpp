#include "nmrsearch/spin_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmrsearch/errors.hpp"

namespace nmrsearch {
namespace {

// Entry (row, col) of a single-spin factor without building a matrix.
cplx factor_entry(SpinFactor f, std::size_t row, std::size_t col) {
  switch (f) {
    case SpinFactor::Unit: return row == col ? 1.0 : 0.0;
    case SpinFactor::ProjAlpha: return (row == 0 && col == 0) ? 1.0 : 0.0;
    case SpinFactor::ProjBeta: return (row == 1 && col == 1) ? 1.0 : 0.0;
    case SpinFactor::Ix: return row != col ? 0.5 : 0.0;
    case SpinFactor::Iy:
      if (row == 0 && col == 1) return cplx{0.0, -0.5};
      if (row == 1 && col == 0) return cplx{0.0, 0.5};
      return 0.0;
    case SpinFactor::Iz:
      if (row != col) return 0.0;
      return row == 0 ? 0.5 : -0.5;
    case SpinFactor::Plus: return (row == 0 && col == 1) ? 1.0 : 0.0;
    case SpinFactor::Minus: return (row == 1 && col == 0) ? 1.0 : 0.0;
  }
  return 0.0;
}

bool is_diagonal_factor(SpinFactor f) {
  return f == SpinFactor::Unit || f == SpinFactor::ProjAlpha || f == SpinFactor::ProjBeta ||
         f == SpinFactor::Iz;
}

}  // namespace

OperatorMatrix spin_factor_matrix(SpinFactor factor) {
  OperatorMatrix m(2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) m(r, c) = factor_entry(factor, r, c);
  return m;
}

OperatorMatrix projector(Projection kind) {
  return spin_factor_matrix(kind == Projection::Alpha ? SpinFactor::ProjAlpha
                                                      : SpinFactor::ProjBeta);
}

std::size_t BasisLabel::index() const {
  std::size_t idx = 0;
  for (auto b : bits) idx = (idx << 1) | (b & 1U);
  return idx;
}

BasisLabel BasisLabel::from_index(std::size_t index, std::size_t total) {
  BasisLabel label;
  label.bits.resize(total);
  for (std::size_t k = 0; k < total; ++k)
    label.bits[k] = static_cast<std::uint8_t>(spin_bit(index, k, total));
  return label;
}

void check_spin_count(std::size_t total, std::size_t max_spins) {
  if (total == 0) throw SimulationError("spin count must be at least 1");
  if (total > max_spins) {
    throw SimulationError("spin count " + std::to_string(total) + " exceeds the configured maximum " +
                          std::to_string(max_spins));
  }
}

OperatorMatrix embed(const OperatorMatrix& local, std::size_t spin, std::size_t total,
                     std::size_t max_spins) {
  check_spin_count(total, max_spins);
  if (local.dim() != 2) throw SimulationError("embed: local operator must be 2x2");
  if (spin >= total) {
    throw SimulationError("embed: spin index " + std::to_string(spin) + " out of range for " +
                          std::to_string(total) + " spins");
  }
  const std::size_t dim = std::size_t{1} << total;
  const std::size_t mask = spin_mask(spin, total);
  OperatorMatrix out(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t br = (r & mask) ? 1 : 0;
    const std::size_t rest = r & ~mask;
    for (std::size_t bc = 0; bc < 2; ++bc) {
      const std::size_t c = rest | (bc ? mask : 0);
      out(r, c) = local(br, bc);
    }
  }
  return out;
}

OperatorMatrix product_operator(std::span<const ProductOperatorTerm> terms, std::size_t total,
                                std::size_t max_spins) {
  check_spin_count(total, max_spins);
  const std::size_t dim = std::size_t{1} << total;
  OperatorMatrix out(dim);

  for (const auto& term : terms) {
    std::vector<SpinFactor> per_spin(total, SpinFactor::Unit);
    std::vector<bool> seen(total, false);
    for (const auto& [spin, factor] : term.factors) {
      if (spin >= total) {
        throw SimulationError("product_operator: spin index " + std::to_string(spin) +
                              " out of range for " + std::to_string(total) + " spins");
      }
      if (seen[spin]) {
        throw SimulationError("product_operator: spin " + std::to_string(spin) +
                              " listed twice in one term");
      }
      seen[spin] = true;
      per_spin[spin] = factor;
    }

    // Off-diagonal factors flip a fixed bit pattern; each row has at most one
    // nonzero column per term: col = row XOR flip_mask.
    std::size_t flip_mask = 0;
    for (std::size_t k = 0; k < total; ++k)
      if (!is_diagonal_factor(per_spin[k])) flip_mask |= spin_mask(k, total);

    for (std::size_t r = 0; r < dim; ++r) {
      const std::size_t c = r ^ flip_mask;
      cplx value = term.coefficient;
      for (std::size_t k = 0; k < total && value != cplx{}; ++k) {
        value *= factor_entry(per_spin[k], spin_bit(r, k, total), spin_bit(c, k, total));
      }
      out(r, c) += value;
    }
  }
  return out;
}

OperatorMatrix product_operator(const ProductOperatorTerm& term, std::size_t total,
                                std::size_t max_spins) {
  return product_operator(std::span<const ProductOperatorTerm>(&term, 1), total, max_spins);
}

OperatorMatrix basis_projector(const BasisLabel& label) {
  check_spin_count(label.bits.size());
  OperatorMatrix out(std::size_t{1} << label.bits.size());
  const std::size_t idx = label.index();
  out(idx, idx) = 1.0;
  return out;
}

OperatorMatrix thermal_state(std::size_t total, std::size_t max_spins) {
  check_spin_count(total, max_spins);
  const std::size_t dim = std::size_t{1} << total;
  OperatorMatrix out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double z = 0.0;
    for (std::size_t k = 0; k < total; ++k) z += spin_bit(i, k, total) ? -0.5 : 0.5;
    out(i, i) = z;
  }
  return out;
}

OperatorMatrix effective_pure_state(std::size_t total, double epsilon, std::size_t max_spins) {
  check_spin_count(total, max_spins);
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw SimulationError("effective_pure_state: epsilon must lie in [0, 1]");
  }
  const std::size_t dim = std::size_t{1} << total;
  OperatorMatrix out(dim);
  const double mixed = (1.0 - epsilon) / static_cast<double>(dim);
  for (std::size_t i = 0; i < dim; ++i) out(i, i) = mixed;
  out(0, 0) += epsilon;
  return out;
}

double polarization_epsilon(std::size_t qubits, double frequency_hz, double temperature_k) {
  if (qubits == 0) throw SimulationError("polarization_epsilon: qubit count must be positive");
  if (!(frequency_hz > 0.0) || !(temperature_k > 0.0)) {
    throw SimulationError("polarization_epsilon: frequency and temperature must be positive");
  }
  const double n = static_cast<double>(qubits);
  return n * kPlanck * frequency_hz / (std::ldexp(1.0, static_cast<int>(qubits)) * kBoltzmann *
                                       temperature_k);
}

double expectation(const OperatorMatrix& rho, const OperatorMatrix& observable) {
  if (rho.dim() != observable.dim()) {
    throw SimulationError("expectation: dimension mismatch (" + std::to_string(rho.dim()) + " vs " +
                          std::to_string(observable.dim()) + ")");
  }
  const std::size_t dim = rho.dim();
  cplx tr{};
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) tr += rho(i, j) * observable(j, i);
  if (std::abs(tr.imag()) > 1e-9 * std::max(1.0, std::abs(tr.real()))) {
    throw SimulationError("expectation: trace has a non-negligible imaginary part");
  }
  return tr.real();
}

}  // namespace nmrsearch
