#include "nmrsearch/search.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nmrsearch/errors.hpp"

namespace nmrsearch {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_plan(const QueryPlan& plan, const SpinSystem& system) {
  if (plan.n == 0) throw SimulationError("register size must be at least 1");
  if (system.total() != plan.n + 1) {
    throw SimulationError("spin system has " + std::to_string(system.register_size()) +
                          " register spins, plan expects " + std::to_string(plan.n));
  }
  check_spin_count(plan.n + 1, plan.max_spins);
  if (plan.swap_seed == PrepMode::Swap) throw SimulationError("swap mode needs an exact or pulse seed");
}

double ancilla_z(const OperatorMatrix& rho) {
  return expectation(rho, embed(spin_factor_matrix(SpinFactor::Iz), 0, rho.spins()));
}

OperatorMatrix apply_oracle(const QueryPlan& plan, const SpinSystem& system,
                            const OracleUnitary& oracle, const OperatorMatrix& rho) {
  switch (plan.oracle) {
    case OracleMode::Matrix: return oracle.apply(rho);
    case OracleMode::Network: return oracle_network(oracle.marked()).apply(rho);
    case OracleMode::Pulse: {
      const auto shortcut = find_pulse_shortcut(oracle.marked());
      if (!shortcut) {
        throw SimulationError("the single-control pulse oracle cannot realise marked item " +
                              oracle.marked().to_string() + "; use the matrix or network oracle");
      }
      const auto seq = oracle_pulse_sequence(system, *shortcut);
      return apply_sequence(rho, seq, system);
    }
  }
  throw SimulationError("unknown oracle mode");
}

}  // namespace

std::vector<PulseEvent> preparation_sequence(const SpinSystem& system, std::size_t k) {
  if (k == 0 || k >= system.total()) throw SimulationError("query index k out of range");
  if (system.coupling(0, k) == 0.0) {
    throw SimulationError("pulse preparation needs a nonzero J[0][" + std::to_string(k) + "]");
  }
  std::vector<std::size_t> decoupled;
  for (std::size_t s = 1; s < system.total(); ++s)
    if (s != k) decoupled.push_back(s);
  return {
      Pulse{{0}, kHalfPi, Axis::PlusY},
      Delay{DelayTime::inverse_coupling(4.0, 0, k), decoupled},
      Pulse{{0}, kHalfPi, Axis::PlusX},
      Pulse{{0}, std::numbers::pi / 4.0, Axis::MinusY},
      Gradient{},
  };
}

std::vector<PulseEvent> full_preparation_sequence(const SpinSystem& system) {
  if (system.total() < 3) throw SimulationError("the full preparation needs at least three spins");
  if (system.coupling(0, 1) == 0.0) throw SimulationError("full preparation needs a nonzero J[0][1]");
  std::vector<std::size_t> decoupled;
  for (std::size_t s = 2; s < system.total(); ++s) decoupled.push_back(s);
  return {
      Pulse{{2}, kHalfPi, Axis::PlusY},
      Gradient{},
      Pulse{{0, 1}, std::numbers::pi / 4.0, Axis::PlusX},
      Delay{DelayTime::inverse_coupling(2.0, 0, 1), decoupled},
      Pulse{{0, 1}, std::numbers::pi / 6.0, Axis::MinusY},
      Gradient{},
  };
}

OperatorMatrix apply_read_pulse(const OperatorMatrix& rho, std::size_t detect) {
  OperatorMatrix out = rho;
  apply_pulse(out, Pulse{{detect}, kHalfPi, Axis::PlusY});
  return out;
}

OperatorMatrix query_projector(std::size_t k, std::size_t total, std::size_t max_spins) {
  if (k == 0 || k >= total) throw SimulationError("query index k out of range");
  ProductOperatorTerm term{1.0, {{0, SpinFactor::ProjAlpha}, {k, SpinFactor::ProjAlpha}}};
  return product_operator(term, total, max_spins);
}

OperatorMatrix prepare_query_state(const QueryPlan& plan, const SpinSystem& system, std::size_t k) {
  check_plan(plan, system);
  if (k == 0 || k > plan.n) throw SimulationError("query index k must lie in 1..n");
  switch (plan.prep) {
    case PrepMode::Exact: return query_projector(k, plan.n + 1, plan.max_spins);
    case PrepMode::Pulse:
      return apply_sequence(thermal_state(plan.n + 1, plan.max_spins), preparation_sequence(system, k),
                            system);
    case PrepMode::Swap: {
      QueryPlan seed_plan = plan;
      seed_plan.prep = plan.swap_seed;
      const OperatorMatrix seed = prepare_query_state(seed_plan, system, 1);
      if (k == 1) return seed;
      return conjugate(swap_permutation(1, k, plan.n + 1), seed);
    }
  }
  throw SimulationError("unknown preparation mode");
}

int decide_bit_expectation(double value, std::size_t n) {
  const double quarter = std::ldexp(1.0, static_cast<int>(n)) / 4.0;
  return value < quarter - 0.5 ? 0 : 1;
}

double query_f_value(const OracleUnitary& oracle, std::size_t k) {
  const std::size_t n = oracle.register_size();
  if (k == 0 || k > n) throw SimulationError("query index k must lie in 1..n");
  std::vector<OperatorMatrix> sigmas;
  for (std::size_t x = 0; x < (std::size_t{1} << n); ++x) {
    if (spin_bit(x, k - 1, n) != 0) continue;
    sigmas.push_back(basis_projector(BasisLabel::from_index(x, n)));
  }
  return evaluate_f_mixture(oracle, sigmas);
}

SearchResult run_search(const QueryPlan& plan, const SpinSystem& system, const OracleUnitary& oracle) {
  check_plan(plan, system);
  if (oracle.register_size() != plan.n) {
    throw SimulationError("marked item has " + std::to_string(oracle.register_size()) +
                          " bits, register has " + std::to_string(plan.n));
  }

  SearchResult result;
  result.bits.bits.assign(plan.n, 0);

  const bool spectral = plan.readout == ReadoutMode::Spectrum;
  AcquisitionParams acq = plan.acquisition.value_or(default_acquisition(system, 0));
  acq.detect = 0;
  std::vector<ExpectedLine> lines;
  if (spectral) {
    lines = expected_lines(system, 0);
    // Reference experiment: the k = 1 query state, read without an oracle.
    const OperatorMatrix ref_state = apply_read_pulse(prepare_query_state(plan, system, 1));
    Spectrum ref = fft_spectrum(acquire_fid(ref_state, system, acq));
    result.phase0 = calibrate_phase(ref, lines, plan.window_hz);
    ref = ref.phased(result.phase0);
    result.reference = classify_peaks(ref, lines, plan.window_hz, plan.threshold);
    result.reference_spectrum = std::move(ref);
  }

  for (std::size_t k = 1; k <= plan.n; ++k) {
    QueryRecord rec;
    rec.k = k;
    OperatorMatrix state = prepare_query_state(plan, system, k);
    state = apply_oracle(plan, system, oracle, state);
    ++result.oracle_calls;

    if (!spectral) {
      rec.value = ancilla_z(state);
      rec.bit = decide_bit_expectation(*rec.value, plan.n);
    } else {
      Spectrum s = fft_spectrum(acquire_fid(apply_read_pulse(state), system, acq)).phased(result.phase0);
      rec.report = classify_peaks(s, lines, plan.window_hz, plan.threshold);
      // I_0^a I_k^a is I_0^a I_1^a with spectators 1 and k exchanged.
      const PeakReport reference = result.reference->with_spectators_swapped(1, k);
      rec.bit = read_bit_from_report(reference, *rec.report);
      rec.spectrum = std::move(s);
    }
    result.bits.bits[k - 1] = static_cast<std::uint8_t>(rec.bit);
    result.per_query.push_back(std::move(rec));
  }
  return result;
}

SearchResult run_search(const QueryPlan& plan, const SpinSystem& system, const MarkedItem& marked) {
  if (marked.size() != plan.n) {
    throw SimulationError("marked item has " + std::to_string(marked.size()) + " bits, register has " +
                          std::to_string(plan.n));
  }
  return run_search(plan, system, OracleUnitary(marked, plan.max_spins));
}

const char* prep_mode_name(PrepMode m) {
  switch (m) {
    case PrepMode::Exact: return "exact";
    case PrepMode::Pulse: return "pulse";
    case PrepMode::Swap: return "swap";
  }
  return "?";
}

const char* oracle_mode_name(OracleMode m) {
  switch (m) {
    case OracleMode::Matrix: return "matrix";
    case OracleMode::Network: return "network";
    case OracleMode::Pulse: return "pulse";
  }
  return "?";
}

const char* readout_mode_name(ReadoutMode m) {
  switch (m) {
    case ReadoutMode::Expectation: return "expectation";
    case ReadoutMode::Spectrum: return "spectrum";
  }
  return "?";
}

}  // namespace nmrsearch
