#include "nmrsearch/pulse_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nmrsearch/errors.hpp"
#include "nmrsearch/kernels.hpp"

namespace nmrsearch {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_spin_set(std::span<const std::size_t> spins, std::size_t total, const char* what) {
  for (std::size_t s : spins) {
    if (s >= total) {
      throw SimulationError(std::string(what) + ": spin index " + std::to_string(s) +
                            " out of range for " + std::to_string(total) + " spins");
    }
  }
}

bool contains(std::span<const std::size_t> set, std::size_t value) {
  return std::find(set.begin(), set.end(), value) != set.end();
}

double magnetic_quantum(std::size_t index, std::size_t spin, std::size_t total) {
  return spin_bit(index, spin, total) ? -0.5 : 0.5;
}

// Left-multiplies by the local 2x2 on every target, in place.
void left_apply(OperatorMatrix& rho, std::span<const std::size_t> targets, const OperatorMatrix& u) {
  const std::size_t total = rho.spins();
  const cplx coeffs[4] = {u(0, 0), u(0, 1), u(1, 0), u(1, 1)};
  for (std::size_t spin : targets) {
    kernels::active().rows_2x2(rho.data().data(), rho.dim(), spin_mask(spin, total), coeffs);
  }
}

}  // namespace

SpinSystem::SpinSystem(std::size_t total)
    : total_(total), offsets_(total, 0.0), couplings_(total * total, 0.0) {
  if (total < 2) throw SimulationError("a spin system needs at least 2 spins (ancilla + register)");
  if (total > 30) throw SimulationError("spin system too large");
}

void SpinSystem::check_spin(std::size_t spin) const {
  if (spin >= total_) {
    throw SimulationError("spin index " + std::to_string(spin) + " out of range for " +
                          std::to_string(total_) + " spins");
  }
}

void SpinSystem::set_offset(std::size_t spin, double hz) {
  check_spin(spin);
  if (!std::isfinite(hz)) throw SimulationError("offset must be finite");
  offsets_[spin] = hz;
}

double SpinSystem::coupling(std::size_t i, std::size_t j) const {
  check_spin(i);
  check_spin(j);
  return couplings_[i * total_ + j];
}

void SpinSystem::set_coupling(std::size_t i, std::size_t j, double hz) {
  check_spin(i);
  check_spin(j);
  if (i == j) throw SimulationError("a spin cannot couple to itself");
  if (!std::isfinite(hz)) throw SimulationError("coupling must be finite");
  couplings_[i * total_ + j] = hz;
  couplings_[j * total_ + i] = hz;
}

void SpinSystem::set_linewidth(double hz) {
  if (!(hz > 0.0) || !std::isfinite(hz)) throw SimulationError("linewidth must be positive");
  linewidth_ = hz;
}

SpinSystem SpinSystem::alanine() {
  SpinSystem s(3);
  s.set_coupling(0, 1, 35.1);
  s.set_coupling(0, 2, 54.2);
  s.set_coupling(1, 2, 1.7);
  // Chemical shifts relative to C0 at 125.7 MHz.
  s.set_offset(1, -4311.0);
  s.set_offset(2, 15738.0);
  s.set_linewidth(1.0);
  return s;
}

SpinSystem SpinSystem::synthetic(std::size_t register_size, double base_hz) {
  SpinSystem s(register_size + 1);
  for (std::size_t k = 1; k <= register_size; ++k) {
    s.set_coupling(0, k, base_hz * std::ldexp(1.0, static_cast<int>(k) - 1));
  }
  return s;
}

double DelayTime::resolve(const SpinSystem& system) const {
  return std::visit(
      overloaded{
          [](double s) {
            if (!(s >= 0.0) || !std::isfinite(s)) throw SimulationError("delay must be >= 0");
            return s;
          },
          [&](const CouplingTime& ct) {
            if (ct.i >= system.total() || ct.j >= system.total()) {
              throw SimulationError("delay references J[" + std::to_string(ct.i) + "][" +
                                    std::to_string(ct.j) + "] outside the spin system");
            }
            const double j = ct.i == ct.j ? 0.0 : system.coupling(ct.i, ct.j);
            if (j == 0.0) {
              throw SimulationError("delay references zero coupling J[" + std::to_string(ct.i) +
                                    "][" + std::to_string(ct.j) + "]");
            }
            const double s = 1.0 / (ct.factor * j);
            if (!(s >= 0.0) || !std::isfinite(s)) {
              throw SimulationError("delay 1/(" + std::to_string(ct.factor) + "*J) is negative");
            }
            return s;
          },
      },
      value);
}

OperatorMatrix single_spin_rotation(double angle, Axis axis) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const double sign = (axis == Axis::MinusX || axis == Axis::MinusY) ? -1.0 : 1.0;
  OperatorMatrix u(2);
  u(0, 0) = c;
  u(1, 1) = c;
  if (axis == Axis::PlusX || axis == Axis::MinusX) {
    // -i s sigma_x
    u(0, 1) = cplx{0.0, -sign * s};
    u(1, 0) = cplx{0.0, -sign * s};
  } else {
    // -i s sigma_y, sigma_y = [[0, -i], [i, 0]]
    u(0, 1) = -sign * s;
    u(1, 0) = sign * s;
  }
  return u;
}

OperatorMatrix rotation_unitary(const SpinSystem& system, std::span<const std::size_t> targets,
                                double angle, Axis axis) {
  check_spin_set(targets, system.total(), "rotation_unitary");
  const OperatorMatrix local = single_spin_rotation(angle, axis);
  const OperatorMatrix unit = OperatorMatrix::identity(2);
  OperatorMatrix u = contains(targets, 0) ? local : unit;
  for (std::size_t k = 1; k < system.total(); ++k) u = kron(u, contains(targets, k) ? local : unit);
  return u;
}

std::vector<double> hamiltonian_diagonal(const SpinSystem& system,
                                         std::span<const std::size_t> decoupled,
                                         const RotatingFrameFlags& flags) {
  check_spin_set(decoupled, system.total(), "hamiltonian");
  const std::size_t total = system.total();
  const std::size_t dim = std::size_t{1} << total;
  std::vector<bool> active(total);
  for (std::size_t k = 0; k < total; ++k) active[k] = !contains(decoupled, k);

  std::vector<double> energy(dim, 0.0);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    double e = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
      if (!active[i]) continue;
      const double mi = magnetic_quantum(idx, i, total);
      if (flags.include_offsets) e += kTwoPi * system.offset(i) * mi;
      for (std::size_t j = i + 1; j < total; ++j) {
        if (!active[j]) continue;
        const double jij = system.coupling(i, j);
        if (jij != 0.0) e += kTwoPi * jij * mi * magnetic_quantum(idx, j, total);
      }
    }
    energy[idx] = e;
  }
  return energy;
}

OperatorMatrix free_hamiltonian(const SpinSystem& system, std::span<const std::size_t> decoupled,
                                const RotatingFrameFlags& flags) {
  const auto diag = hamiltonian_diagonal(system, decoupled, flags);
  return OperatorMatrix::diagonal(std::span<const double>(diag));
}

OperatorMatrix evolution_unitary(const SpinSystem& system, double duration,
                                 std::span<const std::size_t> decoupled,
                                 const RotatingFrameFlags& flags) {
  const auto diag = hamiltonian_diagonal(system, decoupled, flags);
  std::vector<cplx> phases(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) phases[i] = std::polar(1.0, -diag[i] * duration);
  return OperatorMatrix::diagonal(std::span<const cplx>(phases));
}

void apply_pulse(OperatorMatrix& rho, const Pulse& pulse) {
  check_spin_set(pulse.targets, rho.spins(), "pulse");
  if (pulse.targets.empty()) throw SimulationError("pulse has no target spins");
  const OperatorMatrix u = single_spin_rotation(pulse.angle, pulse.axis);
  // U rho U^+ = (U (U rho)^+)^+
  left_apply(rho, pulse.targets, u);
  rho = rho.adjoint();
  left_apply(rho, pulse.targets, u);
  rho = rho.adjoint();
}

OperatorMatrix evolve(const OperatorMatrix& rho, const SpinSystem& system, double duration,
                      std::span<const std::size_t> decoupled, const RotatingFrameFlags& flags) {
  if (rho.dim() != (std::size_t{1} << system.total())) {
    throw SimulationError("evolve: state dimension does not match the spin system");
  }
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw SimulationError("evolve: duration must be >= 0");
  }
  OperatorMatrix out = rho;
  if (duration == 0.0) return out;
  const auto diag = hamiltonian_diagonal(system, decoupled, flags);
  std::vector<cplx> phases(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) phases[i] = std::polar(1.0, -diag[i] * duration);
  kernels::active().outer_phase(out.data().data(), phases.data(), out.dim());
  return out;
}

OperatorMatrix gradient(const OperatorMatrix& rho) {
  OperatorMatrix out(rho.dim());
  for (std::size_t i = 0; i < rho.dim(); ++i) out(i, i) = rho(i, i);
  return out;
}

void validate_event(const PulseEvent& event, const SpinSystem& system) {
  std::visit(overloaded{
                 [&](const Pulse& p) {
                   if (p.targets.empty()) throw SimulationError("pulse has no target spins");
                   check_spin_set(p.targets, system.total(), "pulse");
                   if (!std::isfinite(p.angle)) throw SimulationError("pulse angle must be finite");
                 },
                 [&](const Delay& d) {
                   check_spin_set(d.decoupled, system.total(), "delay");
                   (void)d.time.resolve(system);
                 },
                 [](const Gradient&) {},
             },
             event);
}

OperatorMatrix apply_sequence(const OperatorMatrix& rho, std::span<const PulseEvent> events,
                              const SpinSystem& system, const RotatingFrameFlags& flags) {
  if (rho.dim() != (std::size_t{1} << system.total())) {
    throw SimulationError("apply_sequence: state dimension does not match the spin system");
  }
  for (const auto& e : events) validate_event(e, system);
  OperatorMatrix state = rho;
  for (const auto& e : events) {
    std::visit(overloaded{
                   [&](const Pulse& p) { apply_pulse(state, p); },
                   [&](const Delay& d) {
                     state = evolve(state, system, d.time.resolve(system), d.decoupled, flags);
                   },
                   [&](const Gradient&) { state = gradient(state); },
               },
               e);
  }
  return state;
}

OperatorMatrix sequence_unitary(std::span<const PulseEvent> events, const SpinSystem& system,
                                const RotatingFrameFlags& flags) {
  OperatorMatrix u = OperatorMatrix::identity(std::size_t{1} << system.total());
  for (const auto& e : events) {
    validate_event(e, system);
    std::visit(overloaded{
                   [&](const Pulse& p) { u = rotation_unitary(system, p.targets, p.angle, p.axis) * u; },
                   [&](const Delay& d) {
                     u = evolution_unitary(system, d.time.resolve(system), d.decoupled, flags) * u;
                   },
                   [](const Gradient&) {
                     throw SimulationError("a gradient is not a unitary operation");
                   },
               },
               e);
  }
  return u;
}

std::vector<PulseEvent> swap_sequence(std::size_t i, std::size_t j, const SpinSystem& system) {
  if (i >= system.total() || j >= system.total()) throw SimulationError("swap: spin index out of range");
  if (i == j) throw SimulationError("swap: spins must differ");
  if (system.coupling(i, j) == 0.0) {
    throw SimulationError("swap: spins " + std::to_string(i) + " and " + std::to_string(j) +
                          " are not coupled");
  }
  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < system.total(); ++k)
    if (k != i && k != j) others.push_back(k);
  const std::vector<std::size_t> pair{std::min(i, j), std::max(i, j)};
  const auto tau = DelayTime::inverse_coupling(2.0, std::min(i, j), std::max(i, j));
  const double half_pi = std::numbers::pi / 2.0;
  return {
      Pulse{pair, half_pi, Axis::PlusY},
      Delay{tau, others},
      Pulse{pair, half_pi, Axis::PlusX},
      Delay{tau, others},
      Pulse{pair, half_pi, Axis::MinusY},
  };
}

OperatorMatrix swap_permutation(std::size_t i, std::size_t j, std::size_t total) {
  check_spin_count(total);
  if (i >= total || j >= total) throw SimulationError("swap: spin index out of range");
  const std::size_t dim = std::size_t{1} << total;
  OperatorMatrix p(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::size_t out = idx;
    const std::size_t bi = spin_bit(idx, i, total), bj = spin_bit(idx, j, total);
    if (bi != bj) out ^= spin_mask(i, total) | spin_mask(j, total);
    p(out, idx) = 1.0;
  }
  return p;
}

}  // namespace nmrsearch
