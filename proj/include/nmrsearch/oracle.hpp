#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nmrsearch/operator_matrix.hpp"
#include "nmrsearch/pulse_engine.hpp"
#include "nmrsearch/spin_algebra.hpp"

namespace nmrsearch {

// Register bit string; bits[0] belongs to spin 1.
struct MarkedItem {
  std::vector<std::uint8_t> bits;

  // Parses "0101". Throws on empty input or characters other than 0/1.
  static MarkedItem parse(std::string_view text);
  std::string to_string() const;
  std::size_t size() const { return bits.size(); }
  // Register basis index, bits[0] most significant.
  std::size_t value() const;
  friend bool operator==(const MarkedItem&, const MarkedItem&) = default;
};

// rho -> P rho P^T for the permutation P|i> = |perm[i]>.
OperatorMatrix permute(const OperatorMatrix& rho, std::span<const std::size_t> perm);

// Dense 0/1 matrix of a basis permutation.
OperatorMatrix permutation_matrix(std::span<const std::size_t> perm);

// Flips the ancilla exactly on the register value z: |a, x> -> |a xor [x = z], x>.
class OracleUnitary {
 public:
  explicit OracleUnitary(MarkedItem marked, std::size_t max_spins = kDefaultMaxSpins);

  const MarkedItem& marked() const { return marked_; }
  std::size_t register_size() const { return marked_.size(); }
  std::size_t dim() const { return perm_.size(); }
  std::span<const std::size_t> permutation() const { return perm_; }

  OperatorMatrix matrix() const { return permutation_matrix(perm_); }
  // U rho U^dagger, computed as a permutation of rows and columns.
  OperatorMatrix apply(const OperatorMatrix& rho) const;

 private:
  MarkedItem marked_;
  std::vector<std::size_t> perm_;
};

OracleUnitary synthesize_oracle(const MarkedItem& z, std::size_t register_size,
                                std::size_t max_spins = kDefaultMaxSpins);

struct NotGate {
  std::size_t target;
  friend bool operator==(const NotGate&, const NotGate&) = default;
};
struct ControlledNot {
  std::size_t control;
  std::size_t target;
  friend bool operator==(const ControlledNot&, const ControlledNot&) = default;
};
struct MultiControlledNot {
  std::vector<std::size_t> controls;
  std::size_t target;
  friend bool operator==(const MultiControlledNot&, const MultiControlledNot&) = default;
};
using Gate = std::variant<NotGate, ControlledNot, MultiControlledNot>;

// Basis permutation of one gate on a `total`-spin register.
std::vector<std::size_t> gate_permutation(const Gate& gate, std::size_t total);

struct GateNetwork {
  std::size_t total = 0;
  std::vector<Gate> gates;

  // Product of the dense gate matrices, last gate leftmost.
  OperatorMatrix matrix() const;
  OperatorMatrix apply(const OperatorMatrix& rho) const;
};

// X on every register spin whose bit in z is 0, the n-controlled NOT onto the
// ancilla, then the same X gates again.
GateNetwork oracle_network(const MarkedItem& z);

// Single-control pulse shortcut: flip the ancilla when `control` is in the
// `flip_on` state. It coincides with U_f on every query subspace (bit k = 0,
// k = 1..n) only for some marked items.
struct PulseOracleShortcut {
  std::size_t control = 1;
  Projection flip_on = Projection::Beta;
};

std::optional<PulseOracleShortcut> find_pulse_shortcut(const MarkedItem& z);

// (pi/2)_y^0 - 1/(2 J_0c) - (pi/2)_{+-x}^0. Spins other than 0 and the
// control are decoupled during the delay.
std::vector<PulseEvent> oracle_pulse_sequence(const SpinSystem& system,
                                              const PulseOracleShortcut& shortcut = {});

// 1/2 - Tr(U (I_0^alpha x sigma_in) U^+ I_0z); sigma_in lives on the register.
double evaluate_f(const OracleUnitary& oracle, const OperatorMatrix& sigma_in);

// F(sum_j I_0^alpha sigma_j) + (N - 1)/2
double evaluate_f_mixture(const OracleUnitary& oracle, std::span<const OperatorMatrix> sigmas);

}  // namespace nmrsearch
