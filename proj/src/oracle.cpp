#include "nmrsearch/oracle.hpp"

#include <algorithm>
#include <numbers>

#include "nmrsearch/errors.hpp"

namespace nmrsearch {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_index(std::size_t spin, std::size_t total) {
  if (spin >= total) {
    throw SimulationError("gate spin index " + std::to_string(spin) + " out of range for " +
                          std::to_string(total) + " spins");
  }
}

// I_0^alpha x sigma on n + 1 spins.
OperatorMatrix adjoin_ancilla_alpha(const OperatorMatrix& sigma) {
  return kron(projector(Projection::Alpha), sigma);
}

double ancilla_z(const OperatorMatrix& rho) {
  const std::size_t total = rho.spins();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    sum += (spin_bit(i, 0, total) ? -0.5 : 0.5) * rho(i, i).real();
  }
  return sum;
}

}  // namespace

MarkedItem MarkedItem::parse(std::string_view text) {
  if (text.empty()) throw SimulationError("marked item must not be empty");
  MarkedItem z;
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw SimulationError("marked item must be a string of 0/1, got '" + std::string(text) + "'");
    }
    z.bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return z;
}

std::string MarkedItem::to_string() const {
  std::string s;
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

std::size_t MarkedItem::value() const {
  std::size_t v = 0;
  for (auto b : bits) v = (v << 1) | (b & 1U);
  return v;
}

OperatorMatrix permute(const OperatorMatrix& rho, std::span<const std::size_t> perm) {
  if (perm.size() != rho.dim()) throw SimulationError("permutation size does not match the state");
  OperatorMatrix out(rho.dim());
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j) out(perm[i], perm[j]) = rho(i, j);
  return out;
}

OperatorMatrix permutation_matrix(std::span<const std::size_t> perm) {
  OperatorMatrix p(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) p(perm[i], i) = 1.0;
  return p;
}

OracleUnitary::OracleUnitary(MarkedItem marked, std::size_t max_spins)
    : marked_(std::move(marked)) {
  const std::size_t n = marked_.size();
  if (n == 0) throw SimulationError("marked item must have at least one bit");
  check_spin_count(n + 1, max_spins);
  const std::size_t reg_dim = std::size_t{1} << n;
  const std::size_t z = marked_.value();
  perm_.resize(2 * reg_dim);
  for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = i;
  // Ancilla is the most significant bit.
  std::swap(perm_[z], perm_[z + reg_dim]);
}

OperatorMatrix OracleUnitary::apply(const OperatorMatrix& rho) const {
  if (rho.dim() != dim()) throw SimulationError("oracle: state dimension mismatch");
  return permute(rho, perm_);
}

OracleUnitary synthesize_oracle(const MarkedItem& z, std::size_t register_size,
                                std::size_t max_spins) {
  if (z.size() != register_size) {
    throw SimulationError("marked item has " + std::to_string(z.size()) + " bits, register has " +
                          std::to_string(register_size));
  }
  return OracleUnitary(z, max_spins);
}

std::vector<std::size_t> gate_permutation(const Gate& gate, std::size_t total) {
  if (total == 0 || total > 30) throw SimulationError("gate network spin count out of range");
  const std::size_t dim = std::size_t{1} << total;
  std::vector<std::size_t> controls;
  std::size_t target = 0;
  std::visit(overloaded{
                 [&](const NotGate& g) { target = g.target; },
                 [&](const ControlledNot& g) {
                   controls = {g.control};
                   target = g.target;
                 },
                 [&](const MultiControlledNot& g) {
                   controls = g.controls;
                   target = g.target;
                 },
             },
             gate);
  check_index(target, total);
  for (std::size_t c : controls) {
    check_index(c, total);
    if (c == target) throw SimulationError("gate control equals its target");
  }
  std::vector<std::size_t> perm(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const bool fire = std::all_of(controls.begin(), controls.end(),
                                  [&](std::size_t c) { return spin_bit(i, c, total) == 1; });
    perm[i] = fire ? (i ^ spin_mask(target, total)) : i;
  }
  return perm;
}

OperatorMatrix GateNetwork::matrix() const {
  OperatorMatrix u = OperatorMatrix::identity(std::size_t{1} << total);
  for (const auto& g : gates) u = permutation_matrix(gate_permutation(g, total)) * u;
  return u;
}

OperatorMatrix GateNetwork::apply(const OperatorMatrix& rho) const {
  if (rho.dim() != (std::size_t{1} << total)) throw SimulationError("network: state dimension mismatch");
  OperatorMatrix state = rho;
  for (const auto& g : gates) state = permute(state, gate_permutation(g, total));
  return state;
}

GateNetwork oracle_network(const MarkedItem& z) {
  const std::size_t n = z.size();
  if (n == 0) throw SimulationError("marked item must have at least one bit");
  GateNetwork net;
  net.total = n + 1;
  std::vector<Gate> flips;
  for (std::size_t k = 1; k <= n; ++k)
    if (z.bits[k - 1] == 0) flips.emplace_back(NotGate{k});
  net.gates = flips;
  if (n == 1) {
    net.gates.emplace_back(ControlledNot{1, 0});
  } else {
    std::vector<std::size_t> controls(n);
    for (std::size_t k = 1; k <= n; ++k) controls[k - 1] = k;
    net.gates.emplace_back(MultiControlledNot{controls, 0});
  }
  net.gates.insert(net.gates.end(), flips.begin(), flips.end());
  return net;
}

std::optional<PulseOracleShortcut> find_pulse_shortcut(const MarkedItem& z) {
  const std::size_t n = z.size();
  const std::size_t target = z.value();
  for (std::size_t c = 1; c <= n; ++c) {
    for (Projection flip_on : {Projection::Beta, Projection::Alpha}) {
      const std::size_t flip_bit = flip_on == Projection::Beta ? 1 : 0;
      bool agrees = true;
      for (std::size_t x = 0; x < (std::size_t{1} << n) && agrees; ++x) {
        bool in_some_query = false;
        for (std::size_t k = 1; k <= n; ++k) in_some_query |= spin_bit(x, k - 1, n) == 0;
        if (!in_some_query) continue;
        const bool shortcut_flips = spin_bit(x, c - 1, n) == flip_bit;
        agrees = shortcut_flips == (x == target);
      }
      if (agrees) return PulseOracleShortcut{c, flip_on};
    }
  }
  return std::nullopt;
}

std::vector<PulseEvent> oracle_pulse_sequence(const SpinSystem& system,
                                              const PulseOracleShortcut& shortcut) {
  const std::size_t c = shortcut.control;
  if (c == 0 || c >= system.total()) throw SimulationError("pulse oracle: control spin out of range");
  if (system.coupling(0, c) == 0.0) {
    throw SimulationError("pulse oracle: J[0][" + std::to_string(c) + "] is zero");
  }
  std::vector<std::size_t> decoupled;
  for (std::size_t k = 1; k < system.total(); ++k)
    if (k != c) decoupled.push_back(k);
  const double half_pi = std::numbers::pi / 2.0;
  const Axis last = shortcut.flip_on == Projection::Beta ? Axis::PlusX : Axis::MinusX;
  return {
      Pulse{{0}, half_pi, Axis::PlusY},
      Delay{DelayTime::inverse_coupling(2.0, 0, c), decoupled},
      Pulse{{0}, half_pi, last},
  };
}

double evaluate_f(const OracleUnitary& oracle, const OperatorMatrix& sigma_in) {
  if (sigma_in.dim() * 2 != oracle.dim()) throw SimulationError("evaluate_f: dimension mismatch");
  return 0.5 - ancilla_z(oracle.apply(adjoin_ancilla_alpha(sigma_in)));
}

double evaluate_f_mixture(const OracleUnitary& oracle, std::span<const OperatorMatrix> sigmas) {
  if (sigmas.empty()) throw SimulationError("evaluate_f_mixture: empty mixture");
  OperatorMatrix sum(sigmas.front().dim());
  for (const auto& s : sigmas) sum += s;
  const double n = static_cast<double>(sigmas.size());
  return evaluate_f(oracle, sum) + (n - 1.0) / 2.0;
}

}  // namespace nmrsearch
