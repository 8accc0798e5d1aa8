#include "nmrsearch/pulse_program.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "nmrsearch/errors.hpp"

namespace nmrsearch {
namespace {

// Spin indices above this are rejected by the parser outright.
constexpr std::size_t kMaxSpinIndex = 1024;

enum class TokenKind { Ident, Number, Punct, Separator, Invalid, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto push = [&](TokenKind kind, std::size_t start, std::size_t len, std::size_t c) {
    out.push_back(Token{kind, std::string(text.substr(start, len)), line, c});
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      push(TokenKind::Separator, i, 1, col);
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ';') {
      push(TokenKind::Separator, i, 1, col);
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i, ++col;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    const std::size_t start = i, start_col = col;
    if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      while (i < text.size() && is_digit(text[i])) ++i;
      if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && is_digit(text[i])) ++i;
      }
      if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < text.size() && is_digit(text[j])) {
          i = j;
          while (i < text.size() && is_digit(text[i])) ++i;
        }
      }
      push(TokenKind::Number, start, i - start, start_col);
    } else if (is_ident_start(c)) {
      while (i < text.size() && (is_ident_start(text[i]) || is_digit(text[i]))) ++i;
      push(TokenKind::Ident, start, i - start, start_col);
    } else if (std::string_view("/()*[],-=").find(c) != std::string_view::npos) {
      ++i;
      push(TokenKind::Punct, start, 1, start_col);
    } else {
      ++i;
      push(TokenKind::Invalid, start, 1, start_col);
    }
    col += i - start;
  }
  out.push_back(Token{TokenKind::End, "", line, col});
  return out;
}

struct ParseFail {
  const Token* at;
  std::string message;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::Separator:
    case TokenKind::End: return "end of statement";
    case TokenKind::Invalid: return "invalid character '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

// Cursor over the tokens of one statement (separator excluded).
class Cursor {
 public:
  Cursor(const std::vector<Token>& tokens, std::size_t begin, std::size_t end)
      : tokens_(tokens), pos_(begin), end_(end) {}

  const Token& peek() const { return pos_ < end_ ? tokens_[pos_] : tokens_[end_]; }
  bool at_end() const { return pos_ >= end_; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < end_) ++pos_;
    return t;
  }
  bool accept_punct(char c) {
    if (!at_end() && peek().kind == TokenKind::Punct && peek().text[0] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_punct(char c) {
    if (!accept_punct(c)) fail(std::string("expected '") + c + "', found " + describe(peek()));
  }
  bool accept_ident(std::string_view word) {
    if (!at_end() && peek().kind == TokenKind::Ident && peek().text == word) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_ident(std::string_view word) {
    if (!accept_ident(word)) fail("expected '" + std::string(word) + "', found " + describe(peek()));
  }
  double number() {
    const Token& t = peek();
    if (at_end() || t.kind != TokenKind::Number) fail("expected a number, found " + describe(t));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(v)) {
      fail("number '" + t.text + "' is out of range");
    }
    ++pos_;
    return v;
  }
  std::size_t index() {
    const Token& t = peek();
    if (at_end() || t.kind != TokenKind::Number ||
        !std::all_of(t.text.begin(), t.text.end(), is_digit)) {
      fail("expected a spin index, found " + describe(t));
    }
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || v > kMaxSpinIndex) fail("spin index '" + t.text + "' is out of range");
    (void)ptr;
    ++pos_;
    return v;
  }
  void expect_end() {
    if (!at_end()) fail("unexpected " + describe(peek()));
  }
  [[noreturn]] void fail(std::string message) const { throw ParseFail{&peek(), std::move(message)}; }

 private:
  const std::vector<Token>& tokens_;
  std::size_t pos_;
  std::size_t end_;
};

std::vector<std::size_t> spin_list(Cursor& cur) {
  std::vector<std::size_t> spins;
  do {
    const Token& at = cur.peek();
    const std::size_t s = cur.index();
    if (std::find(spins.begin(), spins.end(), s) != spins.end()) {
      throw ParseFail{&at, "spin " + std::to_string(s) + " listed twice"};
    }
    spins.push_back(s);
  } while (cur.accept_punct(','));
  return spins;
}

Axis parse_axis(Cursor& cur) {
  const bool negative = cur.accept_punct('-');
  const Token& t = cur.peek();
  if (!cur.at_end() && t.kind == TokenKind::Ident && (t.text == "x" || t.text == "y")) {
    cur.next();
    if (t.text == "x") return negative ? Axis::MinusX : Axis::PlusX;
    return negative ? Axis::MinusY : Axis::PlusY;
  }
  cur.fail("bad pulse axis " + describe(t) + " (expected x, y, -x or -y)");
}

double parse_angle(Cursor& cur) {
  const bool negative = cur.accept_punct('-');
  double value = 0.0;
  if (cur.accept_ident("pi")) {
    value = std::numbers::pi;
  } else {
    value = cur.number();
  }
  if (cur.accept_punct('/')) {
    const Token& at = cur.peek();
    const double denom = cur.number();
    if (denom == 0.0) throw ParseFail{&at, "angle divides by zero"};
    value /= denom;
  }
  return negative ? -value : value;
}

DelayTime parse_time(Cursor& cur) {
  const Token& first = cur.peek();
  const double lead = cur.number();
  if (cur.accept_punct('/')) {
    if (first.text != "1") throw ParseFail{&first, "coupling delays must be written 1/(c*J[i][j])"};
    cur.expect_punct('(');
    const Token& at = cur.peek();
    const double factor = cur.number();
    if (!(factor > 0.0)) throw ParseFail{&at, "coupling delay factor must be positive"};
    cur.expect_punct('*');
    cur.expect_ident("J");
    cur.expect_punct('[');
    const std::size_t i = cur.index();
    cur.expect_punct(']');
    cur.expect_punct('[');
    const std::size_t j = cur.index();
    cur.expect_punct(']');
    cur.expect_punct(')');
    if (i == j) throw ParseFail{&at, "J[i][i] is not a coupling"};
    return DelayTime::inverse_coupling(factor, i, j);
  }
  if (cur.accept_ident("ms")) return DelayTime::seconds(lead * 1e-3);
  cur.accept_ident("s");
  return DelayTime::seconds(lead);
}

PulseEvent parse_statement(Cursor& cur) {
  const Token& head = cur.peek();
  if (cur.accept_ident("pulse")) {
    Pulse p;
    p.axis = parse_axis(cur);
    p.angle = parse_angle(cur);
    cur.expect_ident("on");
    p.targets = spin_list(cur);
    cur.expect_end();
    return p;
  }
  if (cur.accept_ident("delay")) {
    Delay d;
    d.time = parse_time(cur);
    if (cur.accept_ident("decouple")) d.decoupled = spin_list(cur);
    cur.expect_end();
    return d;
  }
  if (cur.accept_ident("grad")) {
    cur.expect_end();
    return Gradient{};
  }
  throw ParseFail{&head, "unknown statement " + describe(head) + " (expected pulse, delay or grad)"};
}

// Splits the token stream into statements, calling fn(begin, end) for each
// non-empty one.
template <class Fn>
void for_each_statement(const std::vector<Token>& tokens, Fn&& fn) {
  std::size_t begin = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto kind = tokens[i].kind;
    if (kind == TokenKind::Separator || kind == TokenKind::End) {
      if (i > begin) fn(begin, i);
      begin = i + 1;
    }
  }
}

ParseDiagnostic make_diag(const Token& at, std::string message) {
  return ParseDiagnostic{at.line, at.column, std::move(message), Severity::Error};
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_angle(double angle) {
  if (angle > 0.0) {
    const double q = std::round(std::numbers::pi / angle);
    if (q >= 1.0 && q <= 1048576.0 && std::numbers::pi / q == angle) {
      return q == 1.0 ? "pi" : "pi/" + format_number(q);
    }
  }
  return format_number(angle);
}

std::string format_spins(const std::vector<std::size_t>& spins) {
  std::string s;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(spins[i]);
  }
  return s;
}

const char* axis_text(Axis a) {
  switch (a) {
    case Axis::PlusX: return "x";
    case Axis::MinusX: return "-x";
    case Axis::PlusY: return "y";
    case Axis::MinusY: return "-y";
  }
  return "x";
}

}  // namespace

bool ProgramParse::ok() const {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
}

bool SpinSystemParse::ok() const {
  return system.has_value() &&
         std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
}

ProgramParse parse_program(std::string_view text) {
  ProgramParse result;
  const auto tokens = tokenize(text);
  for_each_statement(tokens, [&](std::size_t begin, std::size_t end) {
    Cursor cur(tokens, begin, end);
    try {
      result.events.push_back(parse_statement(cur));
      result.event_lines.push_back(tokens[begin].line);
    } catch (const ParseFail& f) {
      result.diagnostics.push_back(make_diag(*f.at, f.message));
    }
  });
  return result;
}

ProgramParse parse_program(const ProgramSource& source) { return parse_program(source.text); }

std::vector<ParseDiagnostic> bind_program(const ProgramParse& program, const SpinSystem& system) {
  std::vector<ParseDiagnostic> diags;
  for (std::size_t i = 0; i < program.events.size(); ++i) {
    try {
      validate_event(program.events[i], system);
    } catch (const SimulationError& e) {
      const std::size_t line = i < program.event_lines.size() ? program.event_lines[i] : 0;
      diags.push_back(ParseDiagnostic{line, 1, e.what(), Severity::Error});
    }
  }
  return diags;
}

SpinSystemParse parse_spin_system(std::string_view text) {
  SpinSystemParse result;
  const auto tokens = tokenize(text);

  std::optional<std::pair<std::size_t, const Token*>> spins;
  std::optional<double> linewidth;
  std::map<std::size_t, std::pair<double, const Token*>> offsets;
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, const Token*>> couplings;

  auto signed_number = [](Cursor& cur) {
    const bool negative = cur.accept_punct('-');
    const double v = cur.number();
    return negative ? -v : v;
  };

  for_each_statement(tokens, [&](std::size_t begin, std::size_t end) {
    Cursor cur(tokens, begin, end);
    const Token& head = tokens[begin];
    try {
      if (cur.accept_ident("spins")) {
        cur.expect_punct('=');
        const Token& at = cur.peek();
        const std::size_t n = cur.index();
        cur.expect_end();
        if (spins) throw ParseFail{&head, "duplicate key 'spins'"};
        if (n < 2) throw ParseFail{&at, "a spin system needs at least 2 spins"};
        spins = std::make_pair(n, &at);
      } else if (cur.accept_ident("linewidth")) {
        cur.expect_punct('=');
        const Token& at = cur.peek();
        const double v = signed_number(cur);
        cur.expect_end();
        if (linewidth) throw ParseFail{&head, "duplicate key 'linewidth'"};
        if (v < 0.0) throw ParseFail{&at, "linewidth must not be negative"};
        if (v == 0.0) throw ParseFail{&at, "linewidth must be positive"};
        linewidth = v;
      } else if (cur.accept_ident("offset")) {
        const Token& at = cur.peek();
        const std::size_t k = cur.index();
        cur.expect_punct('=');
        const double v = signed_number(cur);
        cur.expect_end();
        if (offsets.count(k)) throw ParseFail{&head, "duplicate key 'offset " + std::to_string(k) + "'"};
        offsets[k] = {v, &at};
      } else if (cur.accept_ident("J")) {
        const Token& at = cur.peek();
        const std::size_t i = cur.index();
        const std::size_t j = cur.index();
        cur.expect_punct('=');
        const double v = signed_number(cur);
        cur.expect_end();
        if (i == j) throw ParseFail{&at, "J " + std::to_string(i) + " " + std::to_string(j) + " couples a spin to itself"};
        const auto key = std::minmax(i, j);
        if (couplings.count(key)) {
          throw ParseFail{&head, "duplicate key 'J " + std::to_string(key.first) + " " +
                                     std::to_string(key.second) + "'"};
        }
        couplings[key] = {v, &at};
      } else {
        throw ParseFail{&head, "unknown key " + describe(head) +
                                   " (expected spins, offset, J or linewidth)"};
      }
    } catch (const ParseFail& f) {
      result.diagnostics.push_back(make_diag(*f.at, f.message));
    }
  });

  if (!spins) {
    result.diagnostics.push_back(ParseDiagnostic{1, 1, "missing 'spins = <count>'", Severity::Error});
    return result;
  }
  const std::size_t total = spins->first;
  bool in_range = true;
  auto range_error = [&](const Token* at, std::size_t idx) {
    result.diagnostics.push_back(make_diag(*at, "spin index " + std::to_string(idx) +
                                                    " out of range for " + std::to_string(total) +
                                                    " spins"));
    in_range = false;
  };
  for (const auto& [k, entry] : offsets)
    if (k >= total) range_error(entry.second, k);
  for (const auto& [key, entry] : couplings) {
    if (key.first >= total) range_error(entry.second, key.first);
    else if (key.second >= total) range_error(entry.second, key.second);
  }
  const bool errors = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                                  [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
  if (!in_range || errors) return result;

  try {
    SpinSystem system(total);
    for (const auto& [k, entry] : offsets) system.set_offset(k, entry.first);
    for (const auto& [key, entry] : couplings) system.set_coupling(key.first, key.second, entry.first);
    if (linewidth) system.set_linewidth(*linewidth);
    result.system = std::move(system);
  } catch (const SimulationError& e) {
    result.diagnostics.push_back(make_diag(*spins->second, e.what()));
  }
  return result;
}

SpinSystemParse parse_spin_system(const ProgramSource& source) { return parse_spin_system(source.text); }

ProgramSource format_program(const std::vector<PulseEvent>& events, std::string name) {
  std::ostringstream out;
  for (const auto& e : events) {
    if (const auto* p = std::get_if<Pulse>(&e)) {
      out << "pulse " << axis_text(p->axis) << ' ' << format_angle(p->angle) << " on "
          << format_spins(p->targets) << '\n';
    } else if (const auto* d = std::get_if<Delay>(&e)) {
      out << "delay ";
      if (const auto* ct = std::get_if<CouplingTime>(&d->time.value)) {
        out << "1/(" << format_number(ct->factor) << "*J[" << ct->i << "][" << ct->j << "])";
      } else {
        out << format_number(std::get<double>(d->time.value)) << " s";
      }
      if (!d->decoupled.empty()) out << " decouple " << format_spins(d->decoupled);
      out << '\n';
    } else {
      out << "grad\n";
    }
  }
  return ProgramSource{out.str(), std::move(name)};
}

ProgramSource format_spin_system(const SpinSystem& system, std::string name) {
  std::ostringstream out;
  out << "spins = " << system.total() << '\n';
  for (std::size_t k = 0; k < system.total(); ++k)
    if (system.offset(k) != 0.0) out << "offset " << k << " = " << format_number(system.offset(k)) << '\n';
  for (std::size_t i = 0; i < system.total(); ++i)
    for (std::size_t j = i + 1; j < system.total(); ++j)
      if (system.coupling(i, j) != 0.0)
        out << "J " << i << ' ' << j << " = " << format_number(system.coupling(i, j)) << '\n';
  out << "linewidth = " << format_number(system.linewidth()) << '\n';
  return ProgramSource{out.str(), std::move(name)};
}

std::string format_diagnostic(const ParseDiagnostic& d, std::string_view source_name) {
  return std::string(source_name) + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) +
         ": " + (d.severity == Severity::Error ? "error" : "warning") + ": " + d.message;
}

}  // namespace nmrsearch
