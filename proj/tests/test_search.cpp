#include <doctest.h>

#include <random>

#include "nmrsearch/errors.hpp"
#include "nmrsearch/search.hpp"

using namespace nmrsearch;

namespace {

MarkedItem item(std::size_t value, std::size_t n) {
  MarkedItem z;
  for (std::size_t b = 0; b < n; ++b) z.bits.push_back(static_cast<std::uint8_t>((value >> (n - 1 - b)) & 1));
  return z;
}

QueryPlan plan_for(std::size_t n, PrepMode p, OracleMode o, ReadoutMode r) {
  QueryPlan plan;
  plan.n = n;
  plan.prep = p;
  plan.oracle = o;
  plan.readout = r;
  return plan;
}

}  // namespace

TEST_CASE("ancilla values for item 10 are the two landmarks") {
  const auto res = run_search(plan_for(2, PrepMode::Exact, OracleMode::Matrix, ReadoutMode::Expectation),
                              SpinSystem::alanine(), MarkedItem::parse("10"));
  REQUIRE(res.per_query.size() == 2);
  CHECK(*res.per_query[0].value == 1.0);
  CHECK(*res.per_query[1].value == 0.0);
  CHECK(res.bits.to_string() == "10");
  CHECK(res.oracle_calls == 2);
}

TEST_CASE("bit threshold") {
  CHECK(decide_bit_expectation(1.0, 2) == 1);
  CHECK(decide_bit_expectation(0.0, 2) == 0);
  CHECK(decide_bit_expectation(3.9, 4) == 1);
  CHECK(decide_bit_expectation(3.4, 4) == 0);
}

TEST_CASE("exhaustive recovery for small registers in every mode") {
  for (std::size_t n = 1; n <= 3; ++n) {
    const SpinSystem s = SpinSystem::synthetic(n);
    for (std::size_t v = 0; v < (1u << n); ++v) {
      const MarkedItem z = item(v, n);
      for (auto p : {PrepMode::Exact, PrepMode::Pulse, PrepMode::Swap})
        for (auto o : {OracleMode::Matrix, OracleMode::Network})
          for (auto r : {ReadoutMode::Expectation, ReadoutMode::Spectrum}) {
            CAPTURE(n);
            CAPTURE(v);
            const auto res = run_search(plan_for(n, p, o, r), s, z);
            CHECK(res.bits == z);
          }
    }
  }
}

TEST_CASE("swap and exact preparations give the same states") {
  const std::size_t n = 4;
  const SpinSystem s = SpinSystem::synthetic(n);
  QueryPlan exact = plan_for(n, PrepMode::Exact, OracleMode::Matrix, ReadoutMode::Expectation);
  QueryPlan swap = exact;
  swap.prep = PrepMode::Swap;
  for (std::size_t k = 1; k <= n; ++k)
    CHECK(prepare_query_state(swap, s, k) == prepare_query_state(exact, s, k));
}

TEST_CASE("pulse preparation gives the same spin-0 peak report as exact") {
  const SpinSystem s = SpinSystem::alanine();
  const auto acq = default_acquisition(s);
  const auto lines = expected_lines(s);
  QueryPlan exact = plan_for(2, PrepMode::Exact, OracleMode::Matrix, ReadoutMode::Spectrum);
  QueryPlan pulse = exact;
  pulse.prep = PrepMode::Pulse;
  for (std::size_t k = 1; k <= 2; ++k) {
    auto spec = [&](const QueryPlan& p) {
      return fft_spectrum(acquire_fid(apply_read_pulse(prepare_query_state(p, s, k)), s, acq));
    };
    const double phi = calibrate_phase(spec(exact), lines);
    const auto a = classify_peaks(spec(exact).phased(phi), lines);
    const auto b = classify_peaks(spec(pulse).phased(phi), lines);
    for (std::size_t i = 0; i < a.lines.size(); ++i) CHECK(a.lines[i].orientation == b.lines[i].orientation);
  }
}

TEST_CASE("pulse-level demo on alanine") {
  const auto res = run_search(plan_for(2, PrepMode::Pulse, OracleMode::Pulse, ReadoutMode::Spectrum),
                              SpinSystem::alanine(), MarkedItem::parse("10"));
  CHECK(res.bits.to_string() == "10");
  REQUIRE(res.reference.has_value());
  REQUIRE(res.reference_spectrum.has_value());
  CHECK(res.per_query.size() == 2);
  for (const auto& q : res.per_query) CHECK(q.spectrum.has_value());
}

TEST_CASE("plan validation") {
  const QueryPlan p = plan_for(3, PrepMode::Exact, OracleMode::Matrix, ReadoutMode::Expectation);
  CHECK_THROWS_AS(run_search(p, SpinSystem::alanine(), MarkedItem::parse("101")), SimulationError);
  const QueryPlan q = plan_for(2, PrepMode::Exact, OracleMode::Matrix, ReadoutMode::Expectation);
  CHECK_THROWS_AS(run_search(q, SpinSystem::alanine(), MarkedItem::parse("101")), SimulationError);
  const QueryPlan pulse = plan_for(2, PrepMode::Exact, OracleMode::Pulse, ReadoutMode::Expectation);
  CHECK_THROWS_AS(run_search(pulse, SpinSystem::alanine(), MarkedItem::parse("11")), SimulationError);
  QueryPlan capped = q;
  capped.max_spins = 2;
  CHECK_THROWS_AS(run_search(capped, SpinSystem::alanine(), MarkedItem::parse("10")), SimulationError);
}
