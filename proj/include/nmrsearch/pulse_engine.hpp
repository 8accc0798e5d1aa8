#pragma once

// Ideal pulse-sequence simulation on deviation density operators.
//
// Rotation convention: a pulse of angle theta about axis a on spins S
// applies exp(-i theta sum_{k in S} I_{k,a}), with I_{k,-a} = -I_{k,a}.
// Free evolution uses the weak-coupling Hamiltonian
//   H = sum_k 2 pi nu_k I_kz + sum_{i<j} 2 pi J_ij I_iz I_jz   (rad/s)
// which is diagonal in the Zeeman basis.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "nmrsearch/operator_matrix.hpp"
#include "nmrsearch/spin_algebra.hpp"

namespace nmrsearch {

class SpinSystem {
 public:
  explicit SpinSystem(std::size_t total);

  std::size_t total() const { return total_; }
  // Register size n = total - 1 (spin 0 is the ancilla).
  std::size_t register_size() const { return total_ - 1; }

  double offset(std::size_t spin) const { return offsets_.at(spin); }
  void set_offset(std::size_t spin, double hz);

  double coupling(std::size_t i, std::size_t j) const;
  // Sets J_ij and J_ji. J_ii must stay zero.
  void set_coupling(std::size_t i, std::size_t j, double hz);

  double linewidth() const { return linewidth_; }
  void set_linewidth(double hz);

  // 13C-labelled alanine: J01 = 35.1 Hz, J02 = 54.2 Hz, J12 = 1.7 Hz.
  // Spin 0 on resonance; spins 1 and 2 at their display offsets.
  static SpinSystem alanine();

  // total = n + 1 spins with J_0k = base_hz * 2^(k-1), distinct spin-0 lines
  // for every spectator configuration, register couplings zero.
  static SpinSystem synthetic(std::size_t register_size, double base_hz = 10.0);

  friend bool operator==(const SpinSystem&, const SpinSystem&) = default;

 private:
  void check_spin(std::size_t spin) const;

  std::size_t total_;
  std::vector<double> offsets_;
  std::vector<double> couplings_;  // total x total, symmetric
  double linewidth_ = 1.0;
};

enum class Axis { PlusX, MinusX, PlusY, MinusY };

struct Pulse {
  std::vector<std::size_t> targets;
  double angle = 0.0;  // radians
  Axis axis = Axis::PlusX;
  friend bool operator==(const Pulse&, const Pulse&) = default;
};

// 1 / (factor * J[i][j]), resolved against a SpinSystem.
struct CouplingTime {
  double factor = 2.0;
  std::size_t i = 0;
  std::size_t j = 1;
  friend bool operator==(const CouplingTime&, const CouplingTime&) = default;
};

struct DelayTime {
  std::variant<double, CouplingTime> value = 0.0;

  static DelayTime seconds(double s) { return DelayTime{s}; }
  static DelayTime inverse_coupling(double factor, std::size_t i, std::size_t j) {
    return DelayTime{CouplingTime{factor, i, j}};
  }
  // Throws SimulationError on a zero or out-of-range coupling reference.
  double resolve(const SpinSystem& system) const;
  friend bool operator==(const DelayTime&, const DelayTime&) = default;
};

struct Delay {
  DelayTime time;
  std::vector<std::size_t> decoupled;
  friend bool operator==(const Delay&, const Delay&) = default;
};

struct Gradient {
  friend bool operator==(const Gradient&, const Gradient&) = default;
};

using PulseEvent = std::variant<Pulse, Delay, Gradient>;

struct RotatingFrameFlags {
  bool include_offsets = false;
};

// Single-spin exp(-i angle I_axis).
OperatorMatrix single_spin_rotation(double angle, Axis axis);

OperatorMatrix rotation_unitary(const SpinSystem& system, std::span<const std::size_t> targets,
                                double angle, Axis axis);

// Diagonal of H in rad/s. Terms touching a decoupled spin are dropped.
std::vector<double> hamiltonian_diagonal(const SpinSystem& system,
                                         std::span<const std::size_t> decoupled,
                                         const RotatingFrameFlags& flags);

OperatorMatrix free_hamiltonian(const SpinSystem& system, std::span<const std::size_t> decoupled,
                                const RotatingFrameFlags& flags);

// exp(-i H t) as an explicit diagonal matrix.
OperatorMatrix evolution_unitary(const SpinSystem& system, double duration,
                                 std::span<const std::size_t> decoupled,
                                 const RotatingFrameFlags& flags);

// Conjugates rho by a pulse in place, one spin at a time.
void apply_pulse(OperatorMatrix& rho, const Pulse& pulse);

OperatorMatrix evolve(const OperatorMatrix& rho, const SpinSystem& system, double duration,
                      std::span<const std::size_t> decoupled, const RotatingFrameFlags& flags);

// Idealised crusher: every off-diagonal element is zeroed.
OperatorMatrix gradient(const OperatorMatrix& rho);

OperatorMatrix apply_sequence(const OperatorMatrix& rho, std::span<const PulseEvent> events,
                              const SpinSystem& system, const RotatingFrameFlags& flags = {});

// Total propagator of a sequence without gradients.
OperatorMatrix sequence_unitary(std::span<const PulseEvent> events, const SpinSystem& system,
                                const RotatingFrameFlags& flags = {});

// (pi/2)_y^{i,j} - tau - (pi/2)_x^{i,j} - tau - (pi/2)_{-y}^{i,j}, tau = 1/(2 J_ij),
// all other spins decoupled during both delays.
std::vector<PulseEvent> swap_sequence(std::size_t i, std::size_t j, const SpinSystem& system);

// Exact permutation unitary exchanging spins i and j.
OperatorMatrix swap_permutation(std::size_t i, std::size_t j, std::size_t total);

// Validates targets/decoupled sets against the system; throws on error.
void validate_event(const PulseEvent& event, const SpinSystem& system);

}  // namespace nmrsearch
