#pragma once

// Product-operator constructors for a register of spins-1/2.
//
// Basis ordering: spin 0 (the ancilla) is the most significant tensor
// factor, so the basis index of |b_0 b_1 ... b_{m-1}> is
// sum_k b_k * 2^(m-1-k). Bit value 0 is alpha (spin up), 1 is beta.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "nmrsearch/operator_matrix.hpp"

namespace nmrsearch {

inline constexpr std::size_t kDefaultMaxSpins = 14;
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K

enum class SpinFactor { Unit, ProjAlpha, ProjBeta, Ix, Iy, Iz, Plus, Minus };

enum class Projection { Alpha, Beta };

// Single-spin 2x2 matrix of a factor.
OperatorMatrix spin_factor_matrix(SpinFactor factor);

OperatorMatrix projector(Projection kind);

// Zeeman basis label, bits[0] is the ancilla.
struct BasisLabel {
  std::vector<std::uint8_t> bits;

  std::size_t index() const;
  static BasisLabel from_index(std::size_t index, std::size_t total);
  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

// Bit of `spin` in basis index `index` for a `total`-spin register.
inline std::size_t spin_bit(std::size_t index, std::size_t spin, std::size_t total) {
  return (index >> (total - 1 - spin)) & 1U;
}
inline std::size_t spin_mask(std::size_t spin, std::size_t total) {
  return std::size_t{1} << (total - 1 - spin);
}

// Throws when total is zero or exceeds max_spins.
void check_spin_count(std::size_t total, std::size_t max_spins = kDefaultMaxSpins);

// local (2x2) acting on `spin`, identity elsewhere.
OperatorMatrix embed(const OperatorMatrix& local, std::size_t spin, std::size_t total,
                     std::size_t max_spins = kDefaultMaxSpins);

struct ProductOperatorTerm {
  cplx coefficient{1.0};
  // Spins not listed are the unit operator.
  std::vector<std::pair<std::size_t, SpinFactor>> factors;
};

OperatorMatrix product_operator(std::span<const ProductOperatorTerm> terms, std::size_t total,
                                std::size_t max_spins = kDefaultMaxSpins);
OperatorMatrix product_operator(const ProductOperatorTerm& term, std::size_t total,
                                std::size_t max_spins = kDefaultMaxSpins);

// |label><label|
OperatorMatrix basis_projector(const BasisLabel& label);

// sum_k I_kz, the high-temperature equilibrium deviation operator.
OperatorMatrix thermal_state(std::size_t total, std::size_t max_spins = kDefaultMaxSpins);

// (1 - epsilon) 2^-total 1 + epsilon |0...0><0...0|
OperatorMatrix effective_pure_state(std::size_t total, double epsilon,
                                    std::size_t max_spins = kDefaultMaxSpins);

// n h nu / (2^n k_B T)
double polarization_epsilon(std::size_t qubits, double frequency_hz, double temperature_k);

// Re Tr(rho * observable). Throws if the trace has an imaginary part above 1e-9.
double expectation(const OperatorMatrix& rho, const OperatorMatrix& observable);

}  // namespace nmrsearch
