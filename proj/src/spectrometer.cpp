#include "nmrsearch/spectrometer.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>

#include "nmrsearch/errors.hpp"
#include "nmrsearch/kernels.hpp"
#include "nmrsearch/spin_algebra.hpp"

namespace nmrsearch {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Phasors are re-seeded from closed form every this many samples.
constexpr std::size_t kReseedInterval = 64;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void AcquisitionParams::validate() const {
  if (!(spectral_width > 0.0)) throw SimulationError("spectral width must be positive");
  if (points < 256 || !is_power_of_two(points)) {
    throw SimulationError("point count must be a power of two >= 256");
  }
  if (!(linewidth > 0.0)) throw SimulationError("linewidth must be positive");
  if (!std::isfinite(phase0)) throw SimulationError("receiver phase must be finite");
}

AcquisitionParams default_acquisition(const SpinSystem& system, std::size_t detect) {
  AcquisitionParams p;
  p.detect = detect;
  p.linewidth = system.linewidth();
  double widest = 0.0;
  for (const auto& line : expected_lines(system, detect)) {
    widest = std::max(widest, std::abs(line.center - system.offset(detect)));
  }
  p.spectral_width = std::max(200.0, 4.0 * std::ceil(widest));
  return p;
}

double Spectrum::bin_width() const {
  if (freq.size() < 2) return 0.0;
  return std::abs(freq[0] - freq[1]);
}

Spectrum Spectrum::phased(double phase) const {
  Spectrum out = *this;
  const cplx rot = std::polar(1.0, phase);
  for (auto& v : out.values) v *= rot;
  return out;
}

PeakReport PeakReport::with_spectators_swapped(std::size_t i, std::size_t j) const {
  PeakReport out = *this;
  if (i == j) return out;
  std::map<std::vector<std::uint8_t>, std::size_t> index;
  for (std::size_t l = 0; l < lines.size(); ++l) index[lines[l].spectators] = l;
  for (const auto& line : lines) {
    if (i >= line.spectators.size() || j >= line.spectators.size()) {
      throw SimulationError("spectator swap: spin index out of range");
    }
    auto swapped = line.spectators;
    std::swap(swapped[i], swapped[j]);
    auto it = index.find(swapped);
    if (it == index.end()) throw SimulationError("spectator swap: report is not a complete line set");
    out.lines[it->second].integral = line.integral;
    out.lines[it->second].orientation = line.orientation;
  }
  return out;
}

Fid acquire_fid(const OperatorMatrix& rho, const SpinSystem& system, const AcquisitionParams& params) {
  params.validate();
  const std::size_t total = system.total();
  if (rho.dim() != (std::size_t{1} << total)) {
    throw SimulationError("acquire_fid: state dimension does not match the spin system");
  }
  if (params.detect >= total) throw SimulationError("acquire_fid: detect spin out of range");

  const auto energy = hamiltonian_diagonal(system, {}, RotatingFrameFlags{true});
  const std::size_t mask = spin_mask(params.detect, total);
  const double demod = kTwoPi * system.offset(params.detect);

  // Tr(rho D) with D = I_+ picks rho(i, i ^ mask) for i with the detect bit
  // set; that element oscillates at E_j - E_i. Group equal frequencies.
  std::map<double, cplx> by_frequency;
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    if ((i & mask) == 0) continue;
    const std::size_t j = i ^ mask;
    const cplx amp = rho(i, j);
    if (amp == cplx{}) continue;
    const double omega = energy[j] - energy[i] - demod;
    // Merge within a micro-radian per second so rounding noise cannot split a line.
    const double key = std::round(omega * 1e6) / 1e6;
    by_frequency[key] += amp;
  }

  Fid fid;
  fid.dwell = 1.0 / params.spectral_width;
  fid.reference_hz = system.offset(params.detect);
  fid.samples.assign(params.points, cplx{});
  if (by_frequency.empty()) return fid;

  std::vector<cplx> amps, rates, steps;
  for (const auto& [omega, amp] : by_frequency) {
    amps.push_back(amp * std::polar(1.0, params.phase0));
    const cplx rate{-std::numbers::pi * params.linewidth, omega};
    rates.push_back(rate);
    steps.push_back(std::exp(rate * fid.dwell));
  }
  std::vector<cplx> phasor(amps.size());
  const auto& k = kernels::active();
  for (std::size_t m0 = 0; m0 < params.points; m0 += kReseedInterval) {
    const double t0 = static_cast<double>(m0) * fid.dwell;
    for (std::size_t c = 0; c < amps.size(); ++c) phasor[c] = amps[c] * std::exp(rates[c] * t0);
    const std::size_t count = std::min(kReseedInterval, params.points - m0);
    k.phasor_accumulate(phasor.data(), steps.data(), phasor.size(), fid.samples.data() + m0, count);
  }
  return fid;
}

Spectrum fft_spectrum(const Fid& fid) {
  const std::size_t n = fid.samples.size();
  if (n == 0 || !(fid.dwell > 0.0)) throw SimulationError("fft_spectrum: empty FID");
  std::vector<cplx> in = fid.samples;
  std::vector<cplx> out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum s;
  s.freq.resize(n);
  s.values.resize(n);
  const double df = 1.0 / (static_cast<double>(n) * fid.dwell);
  const std::size_t half = n / 2;
  for (std::size_t a = 0; a < n; ++a) {
    // Ascending bin a holds frequency (a - n/2) df; displayed in reverse.
    const std::size_t src = (a + half) % n;
    const std::size_t dst = n - 1 - a;
    s.freq[dst] = fid.reference_hz + (static_cast<double>(a) - static_cast<double>(half)) * df;
    s.values[dst] = out[src];
  }
  return s;
}

std::vector<ExpectedLine> expected_lines(const SpinSystem& system, std::size_t detect) {
  const std::size_t total = system.total();
  if (detect >= total) throw SimulationError("expected_lines: detect spin out of range");
  std::vector<std::size_t> spectators;
  for (std::size_t k = 0; k < total; ++k)
    if (k != detect) spectators.push_back(k);

  const std::size_t configs = std::size_t{1} << spectators.size();
  std::vector<ExpectedLine> lines;
  lines.reserve(configs);
  for (std::size_t cfg = 0; cfg < configs; ++cfg) {
    ExpectedLine line;
    line.spectators.assign(total, 0);
    line.center = system.offset(detect);
    for (std::size_t s = 0; s < spectators.size(); ++s) {
      const std::size_t spin = spectators[s];
      const auto bit = static_cast<std::uint8_t>((cfg >> (spectators.size() - 1 - s)) & 1U);
      line.spectators[spin] = bit;
      line.center += (bit ? -0.5 : 0.5) * system.coupling(detect, spin);
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

namespace {

template <class Fn>
void for_each_in_window(const Spectrum& spectrum, double center, double window, Fn&& fn) {
  for (std::size_t i = 0; i < spectrum.freq.size(); ++i) {
    if (std::abs(spectrum.freq[i] - center) <= window) fn(i);
  }
}

void check_windows(std::span<const ExpectedLine> lines, double window) {
  if (!(window > 0.0)) throw SimulationError("integration window must be positive");
  std::vector<double> centers;
  for (const auto& l : lines) centers.push_back(l.center);
  std::sort(centers.begin(), centers.end());
  for (std::size_t i = 1; i < centers.size(); ++i) {
    if (centers[i] - centers[i - 1] < 2.0 * window) {
      throw SimulationError("integration windows overlap: lines at " + std::to_string(centers[i - 1]) +
                            " and " + std::to_string(centers[i]) + " Hz");
    }
  }
}

}  // namespace

double calibrate_phase(const Spectrum& reference, std::span<const ExpectedLine> lines,
                       double window_hz) {
  check_windows(lines, window_hz);
  cplx sum{};
  double magnitude = 0.0;
  for (const auto& line : lines) {
    for_each_in_window(reference, line.center, window_hz, [&](std::size_t i) {
      sum += reference.values[i];
      magnitude += std::abs(reference.values[i]);
    });
  }
  if (magnitude == 0.0 || std::abs(sum) <= 1e-9 * magnitude) {
    throw SimulationError("calibrate_phase: no detectable peaks in the reference spectrum");
  }
  return -std::arg(sum);
}

PeakReport classify_peaks(const Spectrum& spectrum, std::span<const ExpectedLine> lines,
                          double window_hz, double threshold) {
  check_windows(lines, window_hz);
  if (!(threshold > 0.0 && threshold < 1.0)) throw SimulationError("threshold must lie in (0, 1)");
  const double df = spectrum.bin_width();
  PeakReport report;
  double largest = 0.0;
  for (const auto& line : lines) {
    PeakLine p;
    p.center = line.center;
    p.spectators = line.spectators;
    for_each_in_window(spectrum, line.center, window_hz,
                       [&](std::size_t i) { p.integral += spectrum.values[i].real() * df; });
    largest = std::max(largest, std::abs(p.integral));
    report.lines.push_back(std::move(p));
  }
  for (auto& p : report.lines) {
    if (largest == 0.0 || std::abs(p.integral) < threshold * largest) {
      p.orientation = Orientation::Absent;
    } else {
      p.orientation = p.integral > 0.0 ? Orientation::Up : Orientation::Down;
    }
  }
  return report;
}

int read_bit_from_report(const PeakReport& reference, const PeakReport& query) {
  if (reference.lines.size() != query.lines.size()) {
    throw SimulationError("peak reports cover different line sets");
  }
  bool any_populated = false;
  bool inverted = false;
  for (std::size_t i = 0; i < reference.lines.size(); ++i) {
    const auto& ref = reference.lines[i];
    const auto& q = query.lines[i];
    if (ref.spectators != q.spectators) throw SimulationError("peak reports cover different line sets");
    if (ref.orientation == Orientation::Absent) continue;
    any_populated = true;
    if (q.orientation == Orientation::Absent) {
      throw AmbiguousReadout("line at " + std::to_string(q.center) +
                             " Hz is populated in the reference but absent in the query");
    }
    if (q.orientation != ref.orientation) inverted = true;
  }
  if (!any_populated) throw AmbiguousReadout("reference spectrum has no populated lines");
  return inverted ? 0 : 1;
}

double locate_peak(const Spectrum& spectrum, double center, double window_hz) {
  double best = -std::numeric_limits<double>::infinity();
  double where = center;
  for_each_in_window(spectrum, center, window_hz, [&](std::size_t i) {
    if (spectrum.values[i].real() > best) {
      best = spectrum.values[i].real();
      where = spectrum.freq[i];
    }
  });
  return where;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "freq_hz,real,imag\n";
  char buf[96];
  for (std::size_t i = 0; i < spectrum.freq.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", spectrum.freq[i],
                  spectrum.values[i].real(), spectrum.values[i].imag());
    out << buf;
  }
}

const char* orientation_name(Orientation o) {
  switch (o) {
    case Orientation::Up: return "up";
    case Orientation::Down: return "down";
    case Orientation::Absent: return "absent";
  }
  return "?";
}

}  // namespace nmrsearch
