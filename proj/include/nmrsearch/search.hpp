#pragma once

// Bit-by-bit ensemble search: for k = 1..n prepare I_0^alpha I_k^alpha, apply
// the oracle once, and read bit k of the marked item from the ancilla.

#include <cstddef>
#include <optional>
#include <vector>

#include "nmrsearch/operator_matrix.hpp"
#include "nmrsearch/oracle.hpp"
#include "nmrsearch/pulse_engine.hpp"
#include "nmrsearch/spectrometer.hpp"

namespace nmrsearch {

enum class PrepMode { Exact, Pulse, Swap };
enum class OracleMode { Matrix, Network, Pulse };
enum class ReadoutMode { Expectation, Spectrum };

struct QueryPlan {
  std::size_t n = 2;
  PrepMode prep = PrepMode::Exact;
  OracleMode oracle = OracleMode::Matrix;
  ReadoutMode readout = ReadoutMode::Expectation;
  // Seed used for the k = 1 state in swap mode (Exact or Pulse).
  PrepMode swap_seed = PrepMode::Exact;
  // Defaults to default_acquisition(system) when unset.
  std::optional<AcquisitionParams> acquisition;
  double window_hz = 3.0;
  double threshold = 0.2;
  std::size_t max_spins = kDefaultMaxSpins;
};

struct QueryRecord {
  std::size_t k = 0;
  std::optional<double> value;        // ancilla I_0z, expectation mode
  std::optional<PeakReport> report;   // spectrum mode
  std::optional<Spectrum> spectrum;   // spectrum mode
  int bit = 0;
};

struct SearchResult {
  MarkedItem bits;
  std::vector<QueryRecord> per_query;
  std::size_t oracle_calls = 0;
  // Spectrum mode only: the k = 1 reference experiment and its phase.
  std::optional<PeakReport> reference;
  std::optional<Spectrum> reference_spectrum;
  double phase0 = 0.0;
};

// (pi/2)_y^0 - 1/(4 J_0k) - (pi/2)_x^0 - (pi/4)_{-y}^0 - Grad, with every
// spin other than 0 and k decoupled during the delay.
std::vector<PulseEvent> preparation_sequence(const SpinSystem& system, std::size_t k);

// (pi/2)_y^2 - Grad - (pi/4)_x^{0,1} - 1/(2 J_01) - (pi/6)_{-y}^{0,1} - Grad,
// spin 2 decoupled during the delay. Needs at least three spins.
std::vector<PulseEvent> full_preparation_sequence(const SpinSystem& system);

// (pi/2)_y on the detected spin, turning populations into observable coherence.
OperatorMatrix apply_read_pulse(const OperatorMatrix& rho, std::size_t detect = 0);

// I_0^alpha I_k^alpha on n + 1 spins.
OperatorMatrix query_projector(std::size_t k, std::size_t total,
                               std::size_t max_spins = kDefaultMaxSpins);

OperatorMatrix prepare_query_state(const QueryPlan& plan, const SpinSystem& system, std::size_t k);

// 0 when value < N/4 - 1/2, else 1 (N = 2^n).
int decide_bit_expectation(double value, std::size_t n);

// F-value of the query mixture: evaluate_f_mixture over every register basis
// projector with bit k equal to 0.
double query_f_value(const OracleUnitary& oracle, std::size_t k);

// Throws SimulationError on an inconsistent plan and AmbiguousReadout when a
// spectral bit cannot be decided.
SearchResult run_search(const QueryPlan& plan, const SpinSystem& system, const OracleUnitary& oracle);
SearchResult run_search(const QueryPlan& plan, const SpinSystem& system, const MarkedItem& marked);

const char* prep_mode_name(PrepMode m);
const char* oracle_mode_name(OracleMode m);
const char* readout_mode_name(ReadoutMode m);

}  // namespace nmrsearch
