#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fixtures.hpp"
#include "nmrsearch/errors.hpp"
#include "nmrsearch/pulse_program.hpp"
#include "nmrsearch/search.hpp"
#include "nmrsearch/spin_algebra.hpp"
#include "svg_plot.hpp"

namespace nmrsearch::cli {
namespace {

namespace fs = std::filesystem;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::size_t max_spins_from_env() {
  const char* raw = std::getenv("LS_MAX_SPINS");
  if (!raw || !*raw) return kDefaultMaxSpins;
  const std::string_view s(raw);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 2 || v > 30) {
    throw ConfigError("LS_MAX_SPINS must be an integer between 2 and 30, got '" + std::string(s) + "'");
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

struct LoadedSystem {
  SpinSystem system;
  std::string label;
};

LoadedSystem load_system(const std::string& spec, std::optional<std::size_t> n, std::ostream& err) {
  if (spec.empty()) {
    if (n && *n != 2) return {SpinSystem::synthetic(*n), "synthetic"};
    return {SpinSystem::alanine(), "alanine"};
  }
  if (spec == "alanine") return {SpinSystem::alanine(), "alanine"};
  if (spec == "synthetic") {
    if (!n) throw ConfigError("--system synthetic needs --n");
    return {SpinSystem::synthetic(*n), "synthetic"};
  }
  const SpinSystemParse parsed = parse_spin_system(read_file(spec));
  for (const auto& d : parsed.diagnostics) err << format_diagnostic(d, spec) << '\n';
  if (!parsed.ok()) throw ConfigError("invalid spin system file '" + spec + "'");
  return {*parsed.system, spec};
}

MarkedItem choose_marked(const std::string& text, std::size_t n, std::uint64_t seed) {
  if (text == "random") {
    std::mt19937_64 rng(seed);
    MarkedItem z;
    for (std::size_t i = 0; i < n; ++i) z.bits.push_back(static_cast<std::uint8_t>(rng() >> 63));
    return z;
  }
  MarkedItem z;
  try {
    z = MarkedItem::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (z.size() != n) {
    throw ConfigError("marked item '" + text + "' has " + std::to_string(z.size()) +
                      " bits but the register has " + std::to_string(n) + " spins");
  }
  return z;
}

std::string spectator_text(const std::vector<std::uint8_t>& spectators, std::size_t detect) {
  std::string s;
  for (std::size_t k = 0; k < spectators.size(); ++k)
    if (k != detect) s += spectators[k] ? 'b' : 'a';
  return s;
}

void print_report_lines(std::ostream& out, const PeakReport& report) {
  for (const auto& line : report.lines) {
    out << "  line " << fmt("%+10.3f", line.center) << " Hz  spectators "
        << spectator_text(line.spectators, report.detect) << "  integral " << fmt("%+.4e", line.integral)
        << "  " << orientation_name(line.orientation) << '\n';
  }
}

void save_spectrum(const fs::path& dir, const std::string& stem, const Spectrum& s, const std::string& title) {
  std::ostringstream csv;
  write_spectrum_csv(csv, s);
  write_file(dir / (stem + ".csv"), csv.str());
  std::ostringstream svg;
  write_spectrum_svg(svg, s, title);
  write_file(dir / (stem + ".svg"), svg.str());
}

struct SearchOptions {
  std::string system;
  std::optional<std::size_t> n;
  std::string marked;
  std::uint64_t seed = 1;
  std::string prep = "exact";
  std::string oracle = "matrix";
  std::string readout = "expectation";
  std::string out = "nmrsearch_out";
};

int cmd_search(const SearchOptions& opt, std::ostream& out, std::ostream& err) {
  const std::size_t max_spins = max_spins_from_env();
  const LoadedSystem loaded = load_system(opt.system, opt.n, err);
  const std::size_t reg = loaded.system.total() - 1;
  if (opt.n && *opt.n != reg) {
    throw ConfigError("register size mismatch: --n " + std::to_string(*opt.n) + " but system '" +
                      loaded.label + "' has " + std::to_string(reg) + " register spins");
  }
  if (loaded.system.total() > max_spins) {
    throw ConfigError("system has " + std::to_string(loaded.system.total()) +
                      " spins, above the dense limit of " + std::to_string(max_spins) +
                      " (raise LS_MAX_SPINS)");
  }
  const MarkedItem z = choose_marked(opt.marked, reg, opt.seed);

  QueryPlan plan;
  plan.n = reg;
  plan.prep = opt.prep == "pulse" ? PrepMode::Pulse : opt.prep == "swap" ? PrepMode::Swap : PrepMode::Exact;
  plan.oracle = opt.oracle == "pulse"     ? OracleMode::Pulse
                : opt.oracle == "network" ? OracleMode::Network
                                          : OracleMode::Matrix;
  plan.readout = opt.readout == "spectrum" ? ReadoutMode::Spectrum : ReadoutMode::Expectation;
  plan.max_spins = max_spins;

  SearchResult result;
  try {
    result = run_search(plan, loaded.system, z);
  } catch (const AmbiguousReadout& e) {
    err << "ambiguous readout: " << e.what() << '\n';
    return kAmbiguous;
  } catch (const SimulationError& e) {
    throw ConfigError(e.what());
  }

  std::ostringstream rep;
  rep << "system: " << loaded.label << " (" << loaded.system.total() << " spins)\n";
  rep << "register size: " << reg << '\n';
  rep << "oracle item: " << z.to_string() << '\n';
  rep << "modes: prep=" << prep_mode_name(plan.prep) << " oracle=" << oracle_mode_name(plan.oracle)
      << " readout=" << readout_mode_name(plan.readout) << '\n';
  rep << "oracle calls: " << result.oracle_calls << '\n';
  if (result.reference) {
    rep << "reference (k=1 prepared state), phase0 " << fmt("%+.6f", result.phase0) << " rad\n";
    print_report_lines(rep, *result.reference);
  }
  const double quarter = std::ldexp(1.0, static_cast<int>(reg)) / 4.0;
  for (const auto& q : result.per_query) {
    rep << "query k=" << q.k << ": bit " << q.bit << '\n';
    if (q.value) {
      rep << "  <I0z> = " << fmt("%.9f", *q.value) << "  (N/4 = " << fmt("%g", quarter)
          << ", N/4-1 = " << fmt("%g", quarter - 1.0) << ")\n";
    }
    if (q.report) print_report_lines(rep, *q.report);
  }
  rep << "marked state: " << result.bits.to_string() << '\n';

  const fs::path dir(opt.out);
  ensure_dir(dir);
  write_file(dir / "report.txt", rep.str());
  if (result.reference_spectrum) {
    save_spectrum(dir, "spectrum_reference", *result.reference_spectrum, "spin 0, reference");
  }
  for (const auto& q : result.per_query) {
    if (!q.spectrum) continue;
    save_spectrum(dir, "spectrum_query_" + std::to_string(q.k), *q.spectrum,
                  "spin 0, query k=" + std::to_string(q.k));
  }
  out << rep.str();
  return kOk;
}

struct SimulateOptions {
  std::string system;
  std::string program;
  std::string initial = "thermal";
  std::string out = "nmrsearch_out";
  bool spectrum = false;
  std::size_t detect = 0;
};

std::string matrix_csv(const OperatorMatrix& m, bool imag) {
  std::string text;
  char buf[40];
  for (std::size_t r = 0; r < m.dim(); ++r) {
    for (std::size_t c = 0; c < m.dim(); ++c) {
      const double v = imag ? m(r, c).imag() : m(r, c).real();
      std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
      if (c) text += ',';
      text += buf;
    }
    text += '\n';
  }
  return text;
}

OperatorMatrix initial_state(const std::string& spec, std::size_t total, std::size_t max_spins) {
  if (spec == "thermal") return thermal_state(total, max_spins);
  if (spec.rfind("query:", 0) == 0) {
    const std::string_view num = std::string_view(spec).substr(6);
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
    if (ec != std::errc() || ptr != num.data() + num.size() || k == 0 || k >= total) {
      throw ConfigError("--initial query:K needs 1 <= K < " + std::to_string(total));
    }
    return query_projector(k, total, max_spins);
  }
  throw ConfigError("unknown initial state '" + spec + "' (expected thermal or query:K)");
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  const std::size_t max_spins = max_spins_from_env();
  const LoadedSystem loaded = load_system(opt.system, std::nullopt, err);
  const SpinSystem& system = loaded.system;
  if (system.total() > max_spins) {
    throw ConfigError("system has " + std::to_string(system.total()) + " spins, above the dense limit of " +
                      std::to_string(max_spins));
  }

  std::vector<PulseEvent> events;
  if (!opt.program.empty()) {
    const ProgramParse parsed = parse_program(read_file(opt.program));
    auto diags = parsed.diagnostics;
    if (parsed.ok()) {
      const auto bound = bind_program(parsed, system);
      diags.insert(diags.end(), bound.begin(), bound.end());
    }
    for (const auto& d : diags) err << format_diagnostic(d, opt.program) << '\n';
    if (!diags.empty()) return kConfigError;
    events = parsed.events;
  }
  if (opt.detect >= system.total()) throw ConfigError("--detect out of range");

  OperatorMatrix rho = initial_state(opt.initial, system.total(), max_spins);
  try {
    rho = apply_sequence(rho, events, system);
  } catch (const SimulationError& e) {
    throw ConfigError(e.what());
  }

  const fs::path dir(opt.out);
  ensure_dir(dir);
  write_file(dir / "state_real.csv", matrix_csv(rho, false));
  write_file(dir / "state_imag.csv", matrix_csv(rho, true));
  out << "events: " << events.size() << '\n';
  for (std::size_t k = 0; k < system.total(); ++k) {
    const OperatorMatrix iz = embed(spin_factor_matrix(SpinFactor::Iz), k, system.total(), max_spins);
    out << "<I" << k << "z> = " << fmt("%.9f", expectation(rho, iz)) << '\n';
  }
  if (opt.spectrum) {
    const auto acq = default_acquisition(system, opt.detect);
    const Spectrum s = fft_spectrum(acquire_fid(rho, system, acq));
    const std::string stem = "spectrum_spin" + std::to_string(opt.detect);
    save_spectrum(dir, stem, s, "spin " + std::to_string(opt.detect));
    out << "wrote " << (dir / (stem + ".csv")).string() << '\n';
  }
  out << "wrote " << (dir / "state_real.csv").string() << ", " << (dir / "state_imag.csv").string() << '\n';
  return kOk;
}

int cmd_fixtures(bool list, const std::string& fault, std::ostream& out) {
  if (list) {
    for (const auto& n : fixtures::names()) out << n << '\n';
    return kOk;
  }
  const auto results = fixtures::run_all(fault == "uf-bit-order" ? fixtures::Fault::UfBitOrder
                                                                 : fixtures::Fault::None);
  std::size_t failed = 0;
  for (const auto& r : results) {
    char name[32];
    std::snprintf(name, sizeof name, "%-18s", r.name.c_str());
    out << name << (r.pass ? "PASS  " : "FAIL  ") << r.detail << '\n';
    if (!r.pass) ++failed;
  }
  if (failed) {
    out << failed << " fixture(s) failed:";
    for (const auto& r : results)
      if (!r.pass) out << ' ' << r.name;
    out << '\n';
    return kFixtureFailure;
  }
  out << "all " << results.size() << " fixtures passed\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Density-operator simulator for NMR ensemble search", "nmrsearch"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nmrsearch 1.0");

  SearchOptions so;
  auto* search = app.add_subcommand("search", "run the bit-by-bit search for a marked item");
  search->add_option("--system", so.system, "alanine, synthetic or a spin-system file");
  search->add_option("--n", so.n, "register size")->check(CLI::Range(1, 29));
  search->add_option("--marked", so.marked, "marked item bits, or 'random'")->required();
  search->add_option("--seed", so.seed, "seed for --marked random");
  search->add_option("--prep", so.prep)->check(CLI::IsMember({"exact", "pulse", "swap"}));
  search->add_option("--oracle", so.oracle)->check(CLI::IsMember({"matrix", "network", "pulse"}));
  search->add_option("--readout", so.readout)->check(CLI::IsMember({"expectation", "spectrum"}));
  search->add_option("--out", so.out, "output directory");

  SimulateOptions mo;
  auto* simulate = app.add_subcommand("simulate", "apply a pulse program and dump the final state");
  simulate->add_option("--system", mo.system, "alanine or a spin-system file");
  simulate->add_option("--program", mo.program, "pulse program file (empty program if omitted)");
  simulate->add_option("--initial", mo.initial, "thermal or query:K");
  simulate->add_option("--out", mo.out, "output directory");
  simulate->add_flag("--spectrum", mo.spectrum, "also write the detected-spin spectrum");
  simulate->add_option("--detect", mo.detect, "detected spin for --spectrum");

  bool list = false;
  std::string fault;
  auto* fixture_cmd = app.add_subcommand("fixtures", "check the built-in reference fixtures");
  fixture_cmd->add_flag("--list", list, "print fixture names only");
  fixture_cmd->add_option("--inject-fault", fault, "test hook")->check(CLI::IsMember({"uf-bit-order"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (search->parsed()) return cmd_search(so, out, err);
    if (simulate->parsed()) return cmd_simulate(mo, out, err);
    return cmd_fixtures(list, fault, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace nmrsearch::cli
