// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "fixtures.hpp"
#include "nmrsearch/errors.hpp"
#include "nmrsearch/oracle.hpp"
#include "nmrsearch/pulse_program.hpp"
#include "nmrsearch/search.hpp"
#include "nmrsearch/spectrometer.hpp"
#include "nmrsearch/spin_algebra.hpp"
#include "support.hpp"

using namespace nmrsearch;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kPrepTol = 1e-9;
constexpr double kPrepTolCoupled = 5e-2;
constexpr double kOracleTol = 1e-12;
constexpr double kLandmarkTol = 1e-9;
constexpr double kPropertyTol = 1e-12;
constexpr double kUfBudgetMs = 1.0;
constexpr double kPrepBudgetMs = 100.0;
constexpr double kSearchBudgetMs = 5000.0;
constexpr int kRandomSequences = 1000;
constexpr int kFuzzInputs = 10000;
constexpr int kRandomItems = 50;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

MarkedItem item(std::size_t value, std::size_t n) {
  MarkedItem z;
  for (std::size_t b = 0; b < n; ++b) z.bits.push_back(static_cast<std::uint8_t>((value >> (n - 1 - b)) & 1));
  return z;
}

MarkedItem random_item(std::mt19937_64& rng, std::size_t n) {
  MarkedItem z;
  for (std::size_t b = 0; b < n; ++b) z.bits.push_back(static_cast<std::uint8_t>(rng() % 2));
  return z;
}

Outcome ac1() {
  Outcome o;
  const OperatorMatrix want = fixtures::reference_uf();
  double best = 1e300;
  OperatorMatrix got;
  for (int rep = 0; rep < 10; ++rep) {
    const auto t0 = Clock::now();
    got = synthesize_oracle(MarkedItem::parse("10"), 2).matrix();
    best = std::min(best, ms_since(t0));
  }
  const double diff = max_abs_diff(got, want);
  if (diff != 0.0) o.fail("max |diff| " + fmt("%.3g", diff));
  if (best >= kUfBudgetMs) o.fail("took " + fmt("%.3f", best) + " ms");
  o.note("max |diff| " + fmt("%.3g", diff) + ", " + fmt("%.4f", best) + " ms");
  return o;
}

Outcome ac2() {
  Outcome o;
  const double c = std::sqrt(6.0) / 4.0;
  const std::vector<ProductOperatorTerm> full_terms{
      {c, {{0, SpinFactor::Iz}}}, {c, {{1, SpinFactor::Iz}}}, {2 * c, {{0, SpinFactor::Iz}, {1, SpinFactor::Iz}}}};
  const std::vector<ProductOperatorTerm> query_terms{{0.5, {{0, SpinFactor::Iz}}},
                                                     {1.0, {{1, SpinFactor::Iz}}},
                                                     {1.0, {{0, SpinFactor::Iz}, {1, SpinFactor::Iz}}},
                                                     {1.0, {{2, SpinFactor::Iz}}}};
  const OperatorMatrix full_want = product_operator(full_terms, 3);
  const OperatorMatrix query_want = product_operator(query_terms, 3);

  for (double j12 : {0.0, 1.7}) {
    SpinSystem s = SpinSystem::alanine();
    s.set_coupling(1, 2, j12);
    const double tol = j12 == 0.0 ? kPrepTol : kPrepTolCoupled;
    const auto t0 = Clock::now();
    const double d_full = max_abs_diff(apply_sequence(thermal_state(3), full_preparation_sequence(s), s), full_want);
    const double d_query = max_abs_diff(apply_sequence(thermal_state(3), preparation_sequence(s, 1), s), query_want);
    const double ms = ms_since(t0);
    const std::string tag = "J12=" + fmt("%g", j12);
    if (d_full > tol) o.fail(tag + " full prep diff " + fmt("%.3g", d_full));
    if (d_query > tol) o.fail(tag + " query prep diff " + fmt("%.3g", d_query));
    if (ms >= kPrepBudgetMs) o.fail(tag + " took " + fmt("%.1f", ms) + " ms");
    o.note(tag + ": " + fmt("%.2g", d_full) + "/" + fmt("%.2g", d_query) + " in " + fmt("%.2f", ms) + " ms");
  }
  return o;
}

Outcome ac3() {
  Outcome o;
  const OracleUnitary uf = synthesize_oracle(MarkedItem::parse("10"), 2);
  for (std::size_t x = 0; x < 4; ++x) {
    // x = 2 is I1^beta I2^alpha.
    const double f = evaluate_f(uf, basis_projector(BasisLabel::from_index(x, 2)));
    const double want = x == 2 ? 1.0 : 0.0;
    if (std::abs(f - want) > kOracleTol) o.fail("basis input " + std::to_string(x) + " gave " + fmt("%.3g", f));
  }
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 5; ++n)
    for (std::size_t v = 0; v < (1u << n); ++v) {
      const MarkedItem z = item(v, n);
      const OracleUnitary u = synthesize_oracle(z, n);
      for (std::size_t k = 1; k <= n; ++k, ++checked) {
        const double want = z.bits[k - 1] == 0 ? 1.0 : 0.0;
        const double f = query_f_value(u, k);
        if (std::abs(f - want) > kOracleTol) o.fail("z=" + z.to_string() + " k=" + std::to_string(k));
      }
    }
  o.note("4 basis inputs, " + std::to_string(checked) + " mixtures");
  return o;
}

Outcome ac4() {
  Outcome o;
  QueryPlan plan;
  plan.n = 2;
  const auto r2 = run_search(plan, SpinSystem::alanine(), MarkedItem::parse("10"));
  if (*r2.per_query[0].value != 1.0 || *r2.per_query[1].value != 0.0) {
    o.fail("n=2 values " + fmt("%.17g", *r2.per_query[0].value) + ", " + fmt("%.17g", *r2.per_query[1].value));
  }

  std::size_t searches = 0;
  double worst = 0.0;
  auto check = [&](std::size_t n, const MarkedItem& z, const SpinSystem& s) {
    QueryPlan p;
    p.n = n;
    const auto res = run_search(p, s, z);
    ++searches;
    const double quarter = std::ldexp(1.0, static_cast<int>(n)) / 4.0;
    for (const auto& q : res.per_query) {
      const double want = z.bits[q.k - 1] ? quarter : quarter - 1.0;
      worst = std::max(worst, std::abs(*q.value - want));
    }
    if (!(res.bits == z)) o.fail("n=" + std::to_string(n) + " z=" + z.to_string() + " read " + res.bits.to_string());
    if (res.oracle_calls != n) o.fail("oracle calls " + std::to_string(res.oracle_calls));
  };
  for (std::size_t n = 1; n <= 5; ++n) {
    const SpinSystem s = SpinSystem::synthetic(n);
    for (std::size_t v = 0; v < (1u << n); ++v) check(n, item(v, n), s);
  }
  std::mt19937_64 rng(4);
  for (std::size_t n = 6; n <= 8; ++n) {
    const SpinSystem s = SpinSystem::synthetic(n);
    for (int t = 0; t < kRandomItems; ++t) check(n, random_item(rng, n), s);
  }
  if (worst > kLandmarkTol) o.fail("landmark deviation " + fmt("%.3g", worst));

  QueryPlan p8;
  p8.n = 8;
  const SpinSystem s8 = SpinSystem::synthetic(8);
  const auto t0 = Clock::now();
  run_search(p8, s8, random_item(rng, 8));
  const double ms = ms_since(t0);
  if (ms >= kSearchBudgetMs) o.fail("n=8 search took " + fmt("%.0f", ms) + " ms");
  o.note(std::to_string(searches) + " searches, worst landmark deviation " + fmt("%.2g", worst) +
         ", n=8 in " + fmt("%.1f", ms) + " ms");
  return o;
}

std::string shape(const PeakReport& r) {
  std::string out;
  for (const auto& l : r.lines) {
    if (l.orientation == Orientation::Absent) continue;
    if (!out.empty()) out += ',';
    out += orientation_name(l.orientation);
  }
  return out;
}

Outcome ac5() {
  Outcome o;
  const SpinSystem s = SpinSystem::alanine();
  const AcquisitionParams acq = default_acquisition(s);
  const auto lines = expected_lines(s);
  auto spectrum = [&](const OperatorMatrix& rho) { return fft_spectrum(acquire_fid(rho, s, acq)); };
  const double phi = calibrate_phase(spectrum(fixtures::rho01_in()), lines);
  auto report = [&](const OperatorMatrix& rho) { return classify_peaks(spectrum(rho).phased(phi), lines); };

  const PeakReport in1 = report(fixtures::rho01_in()), out1 = report(fixtures::rho01_out());
  const PeakReport in2 = report(fixtures::rho02_in()), out2 = report(fixtures::rho02_out());
  if (shape(out1) != "up,up") o.fail("first query (" + shape(out1) + ")");
  if (shape(out2) != "up,down") o.fail("second query (" + shape(out2) + ")");
  std::string bits;
  try {
    bits += char('0' + read_bit_from_report(in1, out1));
    bits += char('0' + read_bit_from_report(in2, out2));
  } catch (const std::exception& e) {
    o.fail(e.what());
  }
  if (bits != "10") o.fail("bits " + bits);
  o.note("(" + shape(out1) + ") (" + shape(out2) + ") -> " + bits);
  return o;
}

Outcome ac6() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "nmrsearch_acceptance_demo";
  fs::remove_all(dir);
  std::ostringstream out, err;
  const int code = cli::run({"search", "--system", "alanine", "--marked", "10", "--prep", "pulse", "--oracle",
                             "pulse", "--readout", "spectrum", "--out", dir.string()},
                            out, err);
  if (code != 0) {
    o.fail("exit " + std::to_string(code) + ": " + err.str());
    return o;
  }
  std::ifstream rep(dir / "report.txt");
  std::string line, last;
  while (std::getline(rep, line)) last = line;
  if (last != "marked state: 10") o.fail("report ends '" + last + "'");

  // Reference spectrum as written to disk.
  std::ifstream csv(dir / "spectrum_reference.csv");
  std::getline(csv, line);
  std::vector<double> f, re;
  while (std::getline(csv, line)) {
    double a = 0, b = 0, c = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c) == 3) {
      f.push_back(a);
      re.push_back(b);
    }
  }
  if (f.size() < 2) {
    o.fail("reference spectrum unreadable");
    return o;
  }
  const double bin = std::abs(f[0] - f[1]);
  for (double center : {44.65, -9.55}) {
    std::size_t best = 0;
    double height = -1e300;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::abs(f[i] - center) <= 3.0 && re[i] > height) {
        height = re[i];
        best = i;
      }
    const double off = std::abs(f[best] - center);
    if (height <= 0.0) o.fail("no upward peak near " + fmt("%+.2f", center));
    if (off > bin) o.fail("peak near " + fmt("%+.2f", center) + " off by " + fmt("%.3f", off) + " Hz");
    o.note("peak " + fmt("%+.3f", f[best]) + " Hz");
  }
  o.note("bin " + fmt("%.4f", bin) + " Hz");
  return o;
}

Outcome ac7() {
  Outcome o;
  std::mt19937_64 rng(7);
  double worst_u = 0.0, worst_h = 0.0, worst_t = 0.0;
  for (int t = 0; t < kRandomSequences; ++t) {
    const std::size_t total = 2 + t % 3;
    const SpinSystem s = testing::random_system(rng, total);
    const bool grads = t % 2 == 1;
    const auto seq = testing::random_sequence(rng, s, 1 + rng() % 10, grads);
    const auto rho = testing::random_hermitian(rng, std::size_t{1} << total);
    const auto out = apply_sequence(rho, seq, s);
    if (!grads) worst_u = std::max(worst_u, unitarity_defect(sequence_unitary(seq, s)));
    worst_h = std::max(worst_h, max_abs_diff(out, out.adjoint()));
    worst_t = std::max(worst_t, std::abs(out.trace() - rho.trace()));
  }
  if (worst_u > kPropertyTol || worst_h > kPropertyTol || worst_t > kPropertyTol) {
    o.fail("sequence invariants " + fmt("%.2g", worst_u) + "/" + fmt("%.2g", worst_h) + "/" + fmt("%.2g", worst_t));
  }

  for (std::size_t n = 1; n <= 10; ++n) {
    const MarkedItem z = random_item(rng, n);
    const OracleUnitary uf(z);
    const auto perm = uf.permutation();
    const std::size_t half = std::size_t{1} << n;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      const std::size_t want = (i % half) == z.value() ? (i ^ half) : i;
      if (perm[i] != want || perm[perm[i]] != i) {
        o.fail("oracle structure n=" + std::to_string(n));
        break;
      }
    }
  }

  for (std::size_t n = 1; n <= 6; ++n)
    for (std::size_t k = 1; k <= n; ++k) {
      OperatorMatrix sum(std::size_t{1} << (n + 1));
      for (std::size_t x = 0; x < (std::size_t{1} << n); ++x) {
        const BasisLabel l = BasisLabel::from_index(x, n + 1);
        if (l.bits[k] == 0) sum += basis_projector(l);
      }
      if (!(query_projector(k, n + 1) == sum)) o.fail("projector expansion n=" + std::to_string(n));
    }

  std::size_t round_trips = 0;
  for (int t = 0; t < 200; ++t) {
    const SpinSystem s = testing::random_system(rng, 2 + t % 3);
    const auto events = testing::random_sequence(rng, s, 1 + rng() % 10, true);
    if (parse_program(format_program(events)).events != events) o.fail("round trip");
    ++round_trips;
  }
  std::size_t crashes = 0;
  for (int t = 0; t < kFuzzInputs; ++t) {
    std::string text;
    const std::size_t len = rng() % 64;
    static const char alphabet[] = "pulsedaygrdcoinxJ[]()*/,;-=#.0123456789e \n\r\tpims";
    for (std::size_t i = 0; i < len; ++i)
      text += (rng() % 6 == 0) ? static_cast<char>(rng() % 256) : alphabet[rng() % (sizeof alphabet - 1)];
    try {
      parse_program(text);
      parse_spin_system(text);
    } catch (...) {
      ++crashes;
    }
  }
  if (crashes) o.fail(std::to_string(crashes) + " parser crashes");
  o.note(std::to_string(kRandomSequences) + " sequences (worst " + fmt("%.1g", std::max({worst_u, worst_h, worst_t})) +
         "), " + std::to_string(round_trips) + " round trips, " + std::to_string(kFuzzInputs) + " fuzz inputs");
  return o;
}

Outcome ac8() {
  Outcome o;
  std::size_t compared = 0, disagreements = 0;
  for (std::size_t n : {2u, 3u}) {
    const SpinSystem s = n == 2 ? SpinSystem::alanine() : SpinSystem::synthetic(3);
    for (std::size_t v = 0; v < (1u << n); ++v) {
      const MarkedItem z = item(v, n);
      QueryPlan e;
      e.n = n;
      QueryPlan sp = e;
      sp.readout = ReadoutMode::Spectrum;
      try {
        const auto a = run_search(e, s, z), b = run_search(sp, s, z);
        ++compared;
        if (!(a.bits == b.bits)) ++disagreements;
      } catch (const std::exception& ex) {
        o.fail("z=" + z.to_string() + ": " + ex.what());
      }
    }
  }
  if (disagreements) o.fail(std::to_string(disagreements) + " disagreements");
  o.note(std::to_string(compared) + " items compared");
  return o;
}

}  // namespace


int main() {
  struct Criterion {
    const char* id;
    const char* what;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"AC1", "oracle matrix for item 10", ac1},
      {"AC2", "preparation sequences", ac2},
      {"AC3", "oracle evaluation table", ac3},
      {"AC4", "expectation readout landmarks and recovery", ac4},
      {"AC5", "spectral readout of the reference states", ac5},
      {"AC6", "pulse-level alanine demo", ac6},
      {"AC7", "property suites", ac7},
      {"AC8", "expectation/spectrum agreement", ac8},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double ms = ms_since(t0);
    std::printf("%s %s  %s [%s] (%.0f ms)\n", c.id, o.pass ? "PASS" : "FAIL", c.what, o.detail.c_str(), ms);
    if (!o.pass) ++failures;
  }
  return failures;
}
