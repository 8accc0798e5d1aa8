#pragma once

// Spectral readout of the detected spin: FID synthesis, DFT, zeroth-order
// phasing and peak-sign classification.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "nmrsearch/operator_matrix.hpp"
#include "nmrsearch/pulse_engine.hpp"

namespace nmrsearch {

struct AcquisitionParams {
  std::size_t detect = 0;
  double spectral_width = 200.0;  // Hz
  std::size_t points = 4096;      // power of two, >= 256
  double linewidth = 1.0;         // Hz, Lorentzian FWHM
  double phase0 = 0.0;            // receiver phase, radians

  void validate() const;
};

// Defaults for `system`: its linewidth, and a spectral width of at least
// 200 Hz that keeps every detect-spin line well inside the window.
AcquisitionParams default_acquisition(const SpinSystem& system, std::size_t detect = 0);

struct Fid {
  std::vector<cplx> samples;
  double dwell = 0.0;         // seconds
  double reference_hz = 0.0;  // receiver frequency (offset of the detected spin)
};

struct Spectrum {
  std::vector<double> freq;  // Hz, descending
  std::vector<cplx> values;

  double bin_width() const;
  Spectrum phased(double phase) const;
};

enum class Orientation { Up, Down, Absent };

// Spin-state assignment of the non-detected spins. spectators[k] is the bit
// of spin k (0 = alpha); the entry of the detected spin itself is unused (0).
struct ExpectedLine {
  double center = 0.0;  // Hz
  std::vector<std::uint8_t> spectators;
};

struct PeakLine {
  double center = 0.0;
  std::vector<std::uint8_t> spectators;
  double integral = 0.0;
  Orientation orientation = Orientation::Absent;
};

struct PeakReport {
  std::size_t detect = 0;
  std::vector<PeakLine> lines;

  // Same report with the spectator roles of spins i and j exchanged; line
  // centers follow the relabelled spectators of the target line set.
  PeakReport with_spectators_swapped(std::size_t i, std::size_t j) const;
};

// samples[m] = Tr(rho(t_m) (I_x + i I_y)_detect) exp(-pi lw t_m), rho(t) under
// the full Hamiltonian (offsets on, no decoupling), demodulated at the offset
// of the detected spin.
Fid acquire_fid(const OperatorMatrix& rho, const SpinSystem& system, const AcquisitionParams& params);

// DFT, shifted so the axis is centred on the receiver frequency, highest
// frequency first.
Spectrum fft_spectrum(const Fid& fid);

// One line per spectator configuration: offset_d + sum_j m_j J_dj, m = +-1/2.
std::vector<ExpectedLine> expected_lines(const SpinSystem& system, std::size_t detect = 0);

// Zeroth-order phase that puts the summed signal in the line windows on the
// positive real axis. Throws SimulationError if the windows hold no signal.
double calibrate_phase(const Spectrum& reference, std::span<const ExpectedLine> lines,
                       double window_hz = 3.0);

// Integrates Re(spectrum) over +-window around each line centre.
PeakReport classify_peaks(const Spectrum& spectrum, std::span<const ExpectedLine> lines,
                          double window_hz = 3.0, double threshold = 0.2);

// 1 if every line populated in the reference keeps its orientation, 0 if one
// is inverted. Throws AmbiguousReadout when a populated line is absent.
int read_bit_from_report(const PeakReport& reference, const PeakReport& query);

// Frequency of the largest real value within +-window of `center`.
double locate_peak(const Spectrum& spectrum, double center, double window_hz);

// Header `freq_hz,real,imag`, then one row per point, 9 significant digits.
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);

const char* orientation_name(Orientation o);

}  // namespace nmrsearch
