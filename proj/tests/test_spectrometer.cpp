#include <doctest.h>

#include <numbers>
#include <sstream>

#include "fixtures.hpp"
#include "nmrsearch/errors.hpp"
#include "nmrsearch/search.hpp"
#include "nmrsearch/spectrometer.hpp"
#include "nmrsearch/spin_algebra.hpp"
#include "support.hpp"

using namespace nmrsearch;

namespace {

// O(N^2) DFT with the same shift and ordering contract as fft_spectrum.
Spectrum naive_dft(const Fid& fid) {
  const std::size_t n = fid.samples.size();
  Spectrum s;
  const double df = 1.0 / (static_cast<double>(n) * fid.dwell);
  for (std::size_t out = 0; out < n; ++out) {
    // Descending: index 0 holds the highest frequency bin.
    const long bin = static_cast<long>(n / 2) - 1 - static_cast<long>(out);
    cplx acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double arg = -2.0 * std::numbers::pi * static_cast<double>(bin) * static_cast<double>(m) /
                         static_cast<double>(n);
      acc += fid.samples[m] * std::polar(1.0, arg);
    }
    s.freq.push_back(fid.reference_hz + static_cast<double>(bin) * df);
    s.values.push_back(acc);
  }
  return s;
}

PeakReport report(const OperatorMatrix& rho, double phase) {
  const SpinSystem s = SpinSystem::alanine();
  const auto acq = default_acquisition(s);
  return classify_peaks(fft_spectrum(acquire_fid(rho, s, acq)).phased(phase), expected_lines(s));
}

std::vector<Orientation> shape(const PeakReport& r) {
  std::vector<Orientation> out;
  for (const auto& l : r.lines) out.push_back(l.orientation);
  return out;
}

}  // namespace

TEST_CASE("fft matches a naive DFT") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  Fid fid;
  fid.dwell = 1.0 / 200.0;
  fid.reference_hz = 12.5;
  for (int i = 0; i < 256; ++i) fid.samples.push_back(cplx(g(rng), g(rng)));
  const Spectrum a = fft_spectrum(fid), b = naive_dft(fid);
  REQUIRE(a.freq.size() == b.freq.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.freq.size(); ++i) {
    CHECK(a.freq[i] == doctest::Approx(b.freq[i]).epsilon(1e-12));
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  }
  CHECK(worst < 1e-9);
  CHECK(a.freq.front() > a.freq.back());
  CHECK(a.bin_width() == doctest::Approx(200.0 / 256.0));
}

TEST_CASE("expected alanine lines") {
  const auto lines = expected_lines(SpinSystem::alanine());
  REQUIRE(lines.size() == 4);
  const double want[] = {44.65, -9.55, 9.55, -44.65};
  for (std::size_t i = 0; i < 4; ++i) CHECK(lines[i].center == doctest::Approx(want[i]).epsilon(1e-12));
  CHECK(lines[1].spectators == std::vector<std::uint8_t>{0, 0, 1});
}

TEST_CASE("single coherence gives one Lorentzian at the predicted frequency") {
  SpinSystem s = SpinSystem::alanine();
  // Ancilla coherence with spectators (alpha, alpha): element (4, 0).
  OperatorMatrix rho(8);
  rho(0, 4) = rho(4, 0) = 0.5;
  auto acq = default_acquisition(s);
  const Fid fid = acquire_fid(rho, s, acq);
  CHECK(std::abs(fid.samples[0]) > 0.0);
  const Spectrum sp = fft_spectrum(fid);
  const double peak = locate_peak(sp, 44.65, 5.0);
  CHECK(std::abs(peak - 44.65) <= sp.bin_width());
  // Decay follows exp(-pi lw t).
  const double t = 100 * fid.dwell;
  CHECK(std::abs(fid.samples[100]) / std::abs(fid.samples[0]) ==
        doctest::Approx(std::exp(-std::numbers::pi * acq.linewidth * t)).epsilon(1e-9));
}

TEST_CASE("phase calibration undoes a receiver phase") {
  const SpinSystem s = SpinSystem::alanine();
  auto acq = default_acquisition(s);
  acq.phase0 = 0.9;
  const auto lines = expected_lines(s);
  const Spectrum sp = fft_spectrum(acquire_fid(fixtures::rho01_in(), s, acq));
  const double phi = calibrate_phase(sp, lines);
  const PeakReport r = classify_peaks(sp.phased(phi), lines);
  CHECK(r.lines[0].orientation == Orientation::Up);
  CHECK(r.lines[1].orientation == Orientation::Up);
  CHECK_THROWS_AS(calibrate_phase(fft_spectrum(acquire_fid(OperatorMatrix(8), s, acq)), lines), SimulationError);
}

TEST_CASE("reference acquisition states classify as in the experiment") {
  const SpinSystem s = SpinSystem::alanine();
  const auto acq = default_acquisition(s);
  const double phi = calibrate_phase(fft_spectrum(acquire_fid(fixtures::rho01_in(), s, acq)), expected_lines(s));
  using O = Orientation;
  CHECK(shape(report(fixtures::rho01_out(), phi)) == std::vector<O>{O::Up, O::Up, O::Absent, O::Absent});
  CHECK(shape(report(fixtures::rho02_out(), phi)) == std::vector<O>{O::Up, O::Absent, O::Down, O::Absent});
  CHECK(read_bit_from_report(report(fixtures::rho01_in(), phi), report(fixtures::rho01_out(), phi)) == 1);
  CHECK(read_bit_from_report(report(fixtures::rho02_in(), phi), report(fixtures::rho02_out(), phi)) == 0);
  // The ancilla polarisation of the last query state is zero.
  CHECK(std::abs(expectation(fixtures::rho02_out(), embed(spin_factor_matrix(SpinFactor::Iz), 0, 3))) < 1e-15);
}

TEST_CASE("diagonal states give all-absent reports") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 5; ++t) {
    auto rho = testing::random_hermitian(rng, 8);
    rho = gradient(rho);
    // No coherence at all: integrals are exactly zero.
    const auto r = report(rho, 0.0);
    for (const auto& l : r.lines) CHECK(l.orientation == Orientation::Absent);
  }
}

TEST_CASE("bit decision from two reports") {
  PeakReport ref{0, {{10, {0, 0}, 1.0, Orientation::Up}, {-10, {0, 1}, 1.0, Orientation::Up}}};
  PeakReport same = ref, flipped = ref, lost = ref;
  flipped.lines[1].orientation = Orientation::Down;
  lost.lines[0].orientation = Orientation::Absent;
  CHECK(read_bit_from_report(ref, same) == 1);
  CHECK(read_bit_from_report(ref, flipped) == 0);
  CHECK_THROWS_AS(read_bit_from_report(ref, lost), AmbiguousReadout);
  PeakReport other = ref;
  other.lines.pop_back();
  CHECK_THROWS_AS(read_bit_from_report(ref, other), SimulationError);
}

TEST_CASE("spectator swap relabels lines") {
  const SpinSystem s = SpinSystem::alanine();
  PeakReport r = report(fixtures::rho01_in(), 0.0);
  const PeakReport swapped = r.with_spectators_swapped(1, 2);
  // (alpha, beta) becomes (beta, alpha), so the populated lines move to 44.65 and 9.55.
  std::vector<double> up;
  for (const auto& l : swapped.lines)
    if (l.orientation != Orientation::Absent) up.push_back(l.center);
  std::sort(up.begin(), up.end());
  REQUIRE(up.size() == 2);
  CHECK(up[0] == doctest::Approx(9.55));
  CHECK(up[1] == doctest::Approx(44.65));
  (void)s;
}

TEST_CASE("classification guards") {
  const auto lines = expected_lines(SpinSystem::alanine());
  Spectrum sp;
  sp.freq = {1.0, 0.0};
  sp.values = {0.0, 0.0};
  CHECK_THROWS_AS(classify_peaks(sp, lines, 10.0), SimulationError);
  CHECK_THROWS_AS(classify_peaks(sp, lines, 3.0, 1.5), SimulationError);
  AcquisitionParams p;
  p.points = 1000;
  CHECK_THROWS_AS(p.validate(), SimulationError);
  p.points = 128;
  CHECK_THROWS_AS(p.validate(), SimulationError);
  p.points = 1024;
  p.spectral_width = -1;
  CHECK_THROWS_AS(p.validate(), SimulationError);
}

TEST_CASE("csv export format") {
  Spectrum sp;
  sp.freq = {1.5, 0.0, -1.5};
  sp.values = {cplx(1.0 / 3.0, 0.0), cplx(-2.0, 1e-20), cplx(123456789.123, 0.5)};
  std::ostringstream out;
  write_spectrum_csv(out, sp);
  CHECK(out.str() ==
        "freq_hz,real,imag\n"
        "1.5,0.333333333,0\n"
        "0,-2,1e-20\n"
        "-1.5,123456789,0.5\n");
}
