#pragma once

// Text formats for pulse programs and spin systems.
//
// Pulse program, one statement per line or separated by ';', '#' comments:
//   pulse y pi/2 on 0,1
//   delay 1/(2*J[0][1]) decouple 2
//   delay 12.5 ms
//   grad
//
// Spin system:
//   spins = 3
//   offset 1 = -4311
//   J 0 1 = 35.1
//   linewidth = 1.0

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmrsearch/pulse_engine.hpp"

namespace nmrsearch {

struct ProgramSource {
  std::string text;
  std::string name;
};

enum class Severity { Error, Warning };

struct ParseDiagnostic {
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based
  std::string message;
  Severity severity = Severity::Error;
};

struct ProgramParse {
  std::vector<PulseEvent> events;
  // Source line of each event, parallel to `events`.
  std::vector<std::size_t> event_lines;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const;
};

struct SpinSystemParse {
  std::optional<SpinSystem> system;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const;
};

// Never throws on malformed input; every problem becomes a diagnostic and the
// offending statement is dropped.
ProgramParse parse_program(const ProgramSource& source);
ProgramParse parse_program(std::string_view text);

// Checks spin indices and resolves J-referenced delays against `system`.
std::vector<ParseDiagnostic> bind_program(const ProgramParse& program, const SpinSystem& system);

SpinSystemParse parse_spin_system(const ProgramSource& source);
SpinSystemParse parse_spin_system(std::string_view text);

// Canonical text; parse_program(format_program(e)).events == e.
ProgramSource format_program(const std::vector<PulseEvent>& events, std::string name = "program");

ProgramSource format_spin_system(const SpinSystem& system, std::string name = "system");

// "name:line:col: error: message"
std::string format_diagnostic(const ParseDiagnostic& d, std::string_view source_name);

}  // namespace nmrsearch
