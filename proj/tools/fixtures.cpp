#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "nmrsearch/oracle.hpp"
#include "nmrsearch/pulse_engine.hpp"
#include "nmrsearch/search.hpp"
#include "nmrsearch/spectrometer.hpp"
#include "nmrsearch/spin_algebra.hpp"

namespace nmrsearch::fixtures {
namespace {

OperatorMatrix from_rows(const double (&rows)[8][8]) {
  OperatorMatrix m(8);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) m(r, c) = rows[r][c];
  return m;
}

// Two-line coherence block: populations at (a,a), (b,b), (a+4,a+4), (b+4,b+4)
// and ancilla coherences between them with signs sa, sb.
OperatorMatrix acquisition_state(std::size_t a, std::size_t b, double sa, double sb) {
  OperatorMatrix m(8);
  for (auto [i, s] : {std::pair{a, sa}, std::pair{b, sb}}) {
    m(i, i) = 0.5;
    m(i + 4, i + 4) = 0.5;
    m(i, i + 4) = 0.5 * s;
    m(i + 4, i) = 0.5 * s;
  }
  return m;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Result check_matrix(std::string name, const OperatorMatrix& got, const OperatorMatrix& want,
                    double tol) {
  if (got.dim() != want.dim()) return {std::move(name), false, "dimension mismatch"};
  const double d = max_abs_diff(got, want);
  return {std::move(name), d <= tol, "max |diff| = " + fmt("%.3g", d)};
}

Result uf_fixture(Fault fault) {
  MarkedItem z = MarkedItem::parse("10");
  if (fault == Fault::UfBitOrder) std::reverse(z.bits.begin(), z.bits.end());
  return check_matrix("uf_marked_10", synthesize_oracle(z, 2).matrix(), reference_uf(), 0.0);
}

Result prep_full_fixture() {
  const SpinSystem sys = SpinSystem::alanine();
  const OperatorMatrix rho = apply_sequence(thermal_state(3), full_preparation_sequence(sys), sys);
  const double c = std::sqrt(6.0) / 4.0;
  const ProductOperatorTerm terms[] = {
      {c, {{0, SpinFactor::Iz}}},
      {c, {{1, SpinFactor::Iz}}},
      {2.0 * c, {{0, SpinFactor::Iz}, {1, SpinFactor::Iz}}},
  };
  return check_matrix("prep_full", rho, product_operator(terms, 3), 1e-9);
}

Result prep_query_fixture() {
  const SpinSystem sys = SpinSystem::alanine();
  const OperatorMatrix rho = apply_sequence(thermal_state(3), preparation_sequence(sys, 1), sys);
  const ProductOperatorTerm terms[] = {
      {0.5, {{0, SpinFactor::Iz}}},
      {1.0, {{1, SpinFactor::Iz}}},
      {1.0, {{0, SpinFactor::Iz}, {1, SpinFactor::Iz}}},
      {1.0, {{2, SpinFactor::Iz}}},
  };
  return check_matrix("prep_query_k1", rho, product_operator(terms, 3), 1e-9);
}

struct SpectralContext {
  SpinSystem system = SpinSystem::alanine();
  AcquisitionParams acq;
  std::vector<ExpectedLine> lines;
  double phase = 0.0;
};

SpectralContext spectral_context() {
  SpectralContext ctx;
  ctx.acq = default_acquisition(ctx.system);
  ctx.lines = expected_lines(ctx.system);
  const Spectrum ref = fft_spectrum(acquire_fid(rho01_in(), ctx.system, ctx.acq));
  ctx.phase = calibrate_phase(ref, ctx.lines);
  return ctx;
}

PeakReport report_for(const SpectralContext& ctx, const OperatorMatrix& rho) {
  const Spectrum s = fft_spectrum(acquire_fid(rho, ctx.system, ctx.acq)).phased(ctx.phase);
  return classify_peaks(s, ctx.lines);
}

// Orientations of the non-absent lines, highest frequency first.
std::string shape(const PeakReport& r) {
  std::string out;
  for (const auto& l : r.lines) {
    if (l.orientation == Orientation::Absent) continue;
    if (!out.empty()) out += ',';
    out += orientation_name(l.orientation);
  }
  return out;
}

Result spectral_fixture(std::string name, const SpectralContext& ctx, const OperatorMatrix& rho,
                        const std::string& want) {
  const std::string got = shape(report_for(ctx, rho));
  return {std::move(name), got == want, "peaks (" + got + "), expected (" + want + ")"};
}

Result readout_fixture(const SpectralContext& ctx) {
  std::string bits;
  try {
    bits += char('0' + read_bit_from_report(report_for(ctx, rho01_in()), report_for(ctx, rho01_out())));
    bits += char('0' + read_bit_from_report(report_for(ctx, rho02_in()), report_for(ctx, rho02_out())));
  } catch (const std::exception& e) {
    return {"spectral_readout", false, e.what()};
  }
  return {"spectral_readout", bits == "10", "bits " + bits};
}

Result f_basis_fixture() {
  const OracleUnitary uf = synthesize_oracle(MarkedItem::parse("10"), 2);
  double worst = 0.0;
  std::string table;
  for (std::size_t x = 0; x < 4; ++x) {
    const OperatorMatrix sigma = basis_projector(BasisLabel::from_index(x, 2));
    const double f = evaluate_f(uf, sigma);
    const double want = x == 2 ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(f - want));
    if (!table.empty()) table += ' ';
    table += fmt("%.0f", f);
  }
  return {"f_basis_table", worst <= 1e-12, "f = [" + table + "]"};
}

Result f_mixture_fixture() {
  const OracleUnitary uf = synthesize_oracle(MarkedItem::parse("10"), 2);
  const double f1 = query_f_value(uf, 1), f2 = query_f_value(uf, 2);
  const bool ok = std::abs(f1) <= 1e-12 && std::abs(f2 - 1.0) <= 1e-12;
  return {"f_query_mixture", ok, "f(k=1) = " + fmt("%.3g", f1) + ", f(k=2) = " + fmt("%.3g", f2)};
}

}  // namespace

OperatorMatrix reference_uf() {
  static const double rows[8][8] = {
      {1, 0, 0, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 1, 0},
      {0, 0, 0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 0, 0, 0}, {0, 0, 0, 0, 0, 1, 0, 0},
      {0, 0, 1, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 1},
  };
  return from_rows(rows);
}

OperatorMatrix rho01_in() { return acquisition_state(0, 1, 1.0, 1.0); }
OperatorMatrix rho01_out() { return acquisition_state(0, 1, 1.0, 1.0); }
OperatorMatrix rho02_in() { return acquisition_state(0, 2, 1.0, 1.0); }
OperatorMatrix rho02_out() { return acquisition_state(0, 2, 1.0, -1.0); }

std::vector<std::string> names() {
  return {"uf_marked_10", "prep_full", "prep_query_k1", "rho01_in", "rho01_out", "rho02_in",
          "rho02_out", "spectral_readout", "f_basis_table", "f_query_mixture"};
}

std::vector<Result> run_all(Fault fault) {
  std::vector<Result> out;
  auto guarded = [&](const std::string& name, const std::function<Result()>& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  };
  guarded("uf_marked_10", [&] { return uf_fixture(fault); });
  guarded("prep_full", prep_full_fixture);
  guarded("prep_query_k1", prep_query_fixture);

  SpectralContext ctx;
  bool have_ctx = true;
  try {
    ctx = spectral_context();
  } catch (const std::exception& e) {
    have_ctx = false;
    for (const char* n : {"rho01_in", "rho01_out", "rho02_in", "rho02_out", "spectral_readout"})
      out.push_back({n, false, std::string("reference phasing failed: ") + e.what()});
  }
  if (have_ctx) {
    guarded("rho01_in", [&] { return spectral_fixture("rho01_in", ctx, rho01_in(), "up,up"); });
    guarded("rho01_out", [&] { return spectral_fixture("rho01_out", ctx, rho01_out(), "up,up"); });
    guarded("rho02_in", [&] { return spectral_fixture("rho02_in", ctx, rho02_in(), "up,up"); });
    guarded("rho02_out", [&] { return spectral_fixture("rho02_out", ctx, rho02_out(), "up,down"); });
    guarded("spectral_readout", [&] { return readout_fixture(ctx); });
  }
  guarded("f_basis_table", f_basis_fixture);
  guarded("f_query_mixture", f_mixture_fixture);
  return out;
}

}  // namespace nmrsearch::fixtures
