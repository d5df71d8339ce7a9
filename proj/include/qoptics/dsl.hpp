#pragma once

// Line-oriented circuit description (.qcirc).
//
//   mode <label> cutoff <uint>
//   source <label> squeezed r=<float> phi=<angle>
//   source <label> coherent re=<float> im=<float>
//   source <label> fock n=<uint>
//   bs <label> <label>
//   phase <label> theta=<angle>
//   kerr <label> <label> tau=<angle>
//   detect <label> n=<uint>
//
//   <angle> := <float> | pi | pi/<uint> | <float>*pi    (optionally -pi, -pi/<uint>)
//
// `#` starts a comment. Keywords are case-sensitive. LF or CRLF line ends.
// Modes must be declared before use, every unitary element must precede the
// first detect, and parsing fails on the first semantic error of each line
// while still collecting diagnostics from the remaining lines.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qoptics/program.hpp"

namespace qoptics::dsl {

inline constexpr std::size_t kMaxCutoff = 1000;
inline constexpr std::size_t kMaxDimension = std::size_t{1} << 24;

enum class Severity { Error, Warning };

struct ParseDiagnostic {
  Severity severity = Severity::Error;
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based byte column
  std::string message;
  std::string excerpt;     // offending source line
};

struct ParseResult {
  std::optional<CircuitProgram> program;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return program.has_value(); }
};

// "path:line:col: error: message" followed by the excerpt and a caret.
inline std::string render(const ParseDiagnostic& d, std::string_view path = "<input>") {
  std::string s(path);
  s += ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": ";
  s += d.severity == Severity::Error ? "error: " : "warning: ";
  s += d.message + "\n  " + d.excerpt + "\n  ";
  if (d.column > 0) s += std::string(d.column - 1, ' ');
  s += "^\n";
  return s;
}

// Shortest text that reads back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (is_space(line[i])) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i]) && line[i] != '#') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  for (char c : s) {
    if (!alpha(c) && !digit(c)) return false;
  }
  return true;
}

inline std::optional<double> parse_float(std::string_view s) {
  if (s.empty()) return std::nullopt;
  // from_chars rejects a leading '+', accept it for convenience.
  if (s[0] == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::size_t> parse_uint(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_angle(std::string_view s) {
  constexpr double pi = std::numbers::pi;
  double sign = 1.0;
  std::string_view body = s;
  if (!body.empty() && body[0] == '-' && body.substr(1, 2) == "pi") {
    sign = -1.0;
    body.remove_prefix(1);
  }
  if (body == "pi") return sign * pi;
  if (body.starts_with("pi/")) {
    auto q = parse_uint(body.substr(3));
    if (!q || *q == 0) return std::nullopt;
    return sign * (pi / static_cast<double>(*q));
  }
  if (s.ends_with("*pi")) {
    auto f = parse_float(s.substr(0, s.size() - 3));
    if (!f) return std::nullopt;
    const double v = *f * pi;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  }
  return parse_float(s);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParseResult run() {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      const std::size_t nl = text_.find('\n', pos);
      const std::size_t end = nl == std::string_view::npos ? text_.size() : nl;
      std::string_view line = text_.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no;
      parse_line(line_no, line);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    finish();
    ParseResult res;
    bool has_error = false;
    for (const auto& d : diags_) has_error = has_error || d.severity == Severity::Error;
    if (!has_error) res.program = std::move(prog_);
    res.diagnostics = std::move(diags_);
    return res;
  }

 private:
  struct Failed {};  // aborts the current line after a diagnostic

  struct DetectSite {
    std::size_t line;
    std::size_t column;
    std::string excerpt;
  };

  [[noreturn]] void fail(std::size_t column, std::string msg) {
    diags_.push_back({Severity::Error, line_no_, column, std::move(msg), std::string(line_)});
    throw Failed{};
  }

  void warn(std::size_t line, std::size_t column, std::string msg, std::string excerpt) {
    diags_.push_back({Severity::Warning, line, column, std::move(msg), std::move(excerpt)});
  }

  std::size_t end_column() const {
    std::size_t n = line_.size();
    const auto hash = line_.find('#');
    if (hash != std::string_view::npos) n = hash;
    while (n > 0 && is_space(line_[n - 1])) --n;
    return n + 1;
  }

  void expect_count(const std::vector<Token>& t, std::size_t n, const char* usage) {
    if (t.size() < n) fail(end_column(), std::string("missing argument; expected '") + usage + "'");
    if (t.size() > n) fail(t[n].column, "unexpected token '" + std::string(t[n].text) + "'");
  }

  const ModeDecl& declared(const Token& t) {
    if (!is_identifier(t.text)) fail(t.column, "invalid mode label '" + std::string(t.text) + "'");
    for (const auto& m : prog_.modes) {
      if (m.label == t.text) {
        used_.insert(m.label);
        return m;
      }
    }
    fail(t.column, "undeclared mode '" + std::string(t.text) + "'");
  }

  // Value after `key=`; column points at the value text.
  Token keyed(const Token& t, std::string_view key) {
    if (t.text.size() <= key.size() || t.text.substr(0, key.size()) != key || t.text[key.size()] != '=') {
      fail(t.column, "expected '" + std::string(key) + "=<value>'");
    }
    if (t.text.size() == key.size() + 1) fail(t.column + key.size() + 1, "missing value for '" + std::string(key) + "'");
    return {t.text.substr(key.size() + 1), t.column + key.size() + 1};
  }

  double angle_value(const Token& t) {
    auto v = parse_angle(t.text);
    if (!v) fail(t.column, "malformed angle '" + std::string(t.text) + "'");
    return *v;
  }

  double float_value(const Token& t) {
    auto v = parse_float(t.text);
    if (!v) fail(t.column, "malformed number '" + std::string(t.text) + "'");
    return *v;
  }

  std::size_t uint_value(const Token& t) {
    auto v = parse_uint(t.text);
    if (!v) fail(t.column, "malformed unsigned integer '" + std::string(t.text) + "'");
    return *v;
  }

  void require_before_detect(const Token& kw) {
    if (first_detect_) {
      fail(kw.column, "'" + std::string(kw.text) + "' after detect on line " +
                          std::to_string(first_detect_->line) + "; detections must come last");
    }
  }

  void parse_line(std::size_t line_no, std::string_view line) {
    line_no_ = line_no;
    line_ = line;
    const auto t = tokenize(line);
    if (t.empty()) return;
    try {
      const auto kw = t[0].text;
      if (kw == "mode") {
        parse_mode(t);
      } else if (kw == "source") {
        parse_source(t);
      } else if (kw == "bs") {
        expect_count(t, 3, "bs <label> <label>");
        require_before_detect(t[0]);
        const auto& b = declared(t[1]);
        const auto& c = declared(t[2]);
        if (b.label == c.label) fail(t[2].column, "modes must be distinct");
        if (b.cutoff != c.cutoff) fail(t[2].column, "beam splitter modes must have equal cutoffs");
        prog_.elements.push_back(BeamSplitter5050{b.label, c.label});
      } else if (kw == "phase") {
        expect_count(t, 3, "phase <label> theta=<angle>");
        require_before_detect(t[0]);
        const auto& m = declared(t[1]);
        prog_.elements.push_back(PhaseShift{m.label, angle_value(keyed(t[2], "theta"))});
      } else if (kw == "kerr") {
        expect_count(t, 4, "kerr <label> <label> tau=<angle>");
        require_before_detect(t[0]);
        const auto& a = declared(t[1]);
        const auto& b = declared(t[2]);
        if (a.label == b.label) fail(t[2].column, "modes must be distinct");
        prog_.elements.push_back(CrossKerr{a.label, b.label, angle_value(keyed(t[3], "tau"))});
      } else if (kw == "detect") {
        expect_count(t, 3, "detect <label> n=<uint>");
        const auto& m = declared(t[1]);
        const Token nv = keyed(t[2], "n");
        const auto n = uint_value(nv);
        if (n > m.cutoff) fail(nv.column, "photon number exceeds cutoff " + std::to_string(m.cutoff) + " of mode '" + m.label + "'");
        if (!first_detect_) first_detect_ = DetectSite{line_no_, t[0].column, std::string(line_)};
        detect_sites_.push_back(DetectSite{line_no_, t[0].column, std::string(line_)});
        prog_.detects.push_back(Detect{m.label, n});
      } else {
        fail(t[0].column, "unknown keyword '" + std::string(kw) + "'");
      }
    } catch (const Failed&) {
    }
  }

  void parse_mode(const std::vector<Token>& t) {
    expect_count(t, 4, "mode <label> cutoff <uint>");
    if (!is_identifier(t[1].text)) fail(t[1].column, "invalid mode label '" + std::string(t[1].text) + "'");
    for (const auto& m : prog_.modes) {
      if (m.label == t[1].text) fail(t[1].column, "mode '" + m.label + "' already declared");
    }
    if (t[2].text != "cutoff") fail(t[2].column, "expected 'cutoff'");
    const auto c = uint_value(t[3]);
    if (c > kMaxCutoff) fail(t[3].column, "cutoff exceeds limit " + std::to_string(kMaxCutoff));
    if (dimension_ * (c + 1) > kMaxDimension) {
      fail(t[3].column, "total state dimension exceeds limit " + std::to_string(kMaxDimension));
    }
    dimension_ *= c + 1;
    prog_.modes.push_back({std::string(t[1].text), c});
    mode_sites_.push_back(DetectSite{line_no_, t[1].column, std::string(line_)});
  }

  void parse_source(const std::vector<Token>& t) {
    if (t.size() < 3) fail(end_column(), "missing argument; expected 'source <label> <kind> ...'");
    const auto& m = declared(t[1]);
    for (const auto& s : prog_.sources) {
      if (s.mode == m.label) fail(t[1].column, "duplicate source for mode '" + m.label + "'");
    }
    const auto kind = t[2].text;
    if (kind == "squeezed") {
      expect_count(t, 5, "source <label> squeezed r=<float> phi=<angle>");
      const Token rv = keyed(t[3], "r");
      const double r = float_value(rv);
      if (r < 0.0) fail(rv.column, "squeeze magnitude must be >= 0");
      prog_.sources.push_back({m.label, SqueezeParam{r, angle_value(keyed(t[4], "phi"))}});
    } else if (kind == "coherent") {
      expect_count(t, 5, "source <label> coherent re=<float> im=<float>");
      const double re = float_value(keyed(t[3], "re"));
      const double im = float_value(keyed(t[4], "im"));
      prog_.sources.push_back({m.label, CoherentParam{{re, im}}});
    } else if (kind == "fock") {
      expect_count(t, 4, "source <label> fock n=<uint>");
      const Token nv = keyed(t[3], "n");
      const auto n = uint_value(nv);
      if (n > m.cutoff) fail(nv.column, "photon number exceeds cutoff " + std::to_string(m.cutoff) + " of mode '" + m.label + "'");
      prog_.sources.push_back({m.label, FockSource{n}});
    } else {
      fail(t[2].column, "unknown source kind '" + std::string(kind) + "'");
    }
  }

  // Whole-program checks on the detect groups, and unused-mode warnings.
  void finish() {
    const auto groups = prog_.outcome_groups();
    std::size_t idx = 0;
    std::set<std::string> first_modes;
    std::set<std::vector<std::pair<std::string, std::size_t>>> seen;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::set<std::string> modes;
      std::vector<std::pair<std::string, std::size_t>> key;
      for (const auto& d : groups[g]) {
        modes.insert(d.mode);
        key.emplace_back(d.mode, d.n);
      }
      const auto& site = detect_sites_[idx];
      if (g == 0) {
        first_modes = modes;
      } else if (modes != first_modes) {
        diags_.push_back({Severity::Error, site.line, site.column,
                          "detection outcome covers different modes than the first outcome", site.excerpt});
      }
      std::sort(key.begin(), key.end());
      if (!seen.insert(key).second) {
        diags_.push_back({Severity::Error, site.line, site.column, "duplicate detection outcome", site.excerpt});
      }
      idx += groups[g].size();
    }
    for (std::size_t i = 0; i < prog_.modes.size(); ++i) {
      const auto& label = prog_.modes[i].label;
      bool sourced = false;
      for (const auto& s : prog_.sources) sourced = sourced || s.mode == label;
      if (!sourced && !used_.count(label)) {
        const auto& site = mode_sites_[i];
        warn(site.line, site.column, "mode '" + label + "' is never used", site.excerpt);
      }
    }
  }

  std::string_view text_;
  std::string_view line_;
  std::size_t line_no_ = 0;
  std::size_t dimension_ = 1;
  CircuitProgram prog_;
  std::vector<ParseDiagnostic> diags_;
  std::optional<DetectSite> first_detect_;
  std::vector<DetectSite> detect_sites_;
  std::vector<DetectSite> mode_sites_;
  std::set<std::string> used_;
};

}  // namespace detail

inline ParseResult parse(std::string_view text) { return detail::Parser(text).run(); }

// Canonical angle text: pi fractions where exact, otherwise the shorter of
// <k>*pi and the plain decimal, both of which read back to the same value.
inline std::string format_angle(double x) {
  constexpr double pi = std::numbers::pi;
  if (x == pi) return "pi";
  if (x == -pi) return "-pi";
  for (std::size_t q = 2; q <= 1024; ++q) {
    const double v = pi / static_cast<double>(q);
    if (x == v) return "pi/" + std::to_string(q);
    if (x == -v) return "-pi/" + std::to_string(q);
  }
  std::string plain = format_double(x);
  if (x != 0.0) {
    const double k = x / pi;
    if (std::isfinite(k) && k * pi == x) {
      std::string s = format_double(k) + "*pi";
      if (auto back = detail::parse_angle(s); back && *back == x && s.size() < plain.size()) return s;
    }
  }
  return plain;
}

// Canonical text: modes, sources, unitary elements, detects; LF endings.
inline std::string format(const CircuitProgram& p) {
  std::string out;
  for (const auto& m : p.modes) out += "mode " + m.label + " cutoff " + std::to_string(m.cutoff) + "\n";
  for (const auto& s : p.sources) {
    out += "source " + s.mode + " ";
    if (const auto* sq = std::get_if<SqueezeParam>(&s.kind)) {
      out += "squeezed r=" + format_double(sq->r) + " phi=" + format_angle(sq->phi);
    } else if (const auto* co = std::get_if<CoherentParam>(&s.kind)) {
      out += "coherent re=" + format_double(co->alpha.real()) + " im=" + format_double(co->alpha.imag());
    } else {
      out += "fock n=" + std::to_string(std::get<FockSource>(s.kind).n);
    }
    out += "\n";
  }
  for (const auto& e : p.elements) {
    if (const auto* bs = std::get_if<BeamSplitter5050>(&e)) {
      out += "bs " + bs->mode_b + " " + bs->mode_c;
    } else if (const auto* ph = std::get_if<PhaseShift>(&e)) {
      out += "phase " + ph->mode + " theta=" + format_angle(ph->theta);
    } else if (const auto* k = std::get_if<CrossKerr>(&e)) {
      out += "kerr " + k->mode_a + " " + k->mode_b + " tau=" + format_angle(k->tau);
    } else {
      const auto& d = std::get<Detect>(e);
      out += "detect " + d.mode + " n=" + std::to_string(d.n);
    }
    out += "\n";
  }
  for (const auto& d : p.detects) out += "detect " + d.mode + " n=" + std::to_string(d.n) + "\n";
  return out;
}

}  // namespace qoptics::dsl
