#include <chrono>
#include <numbers>
#include <random>
#include <string>
#include <tuple>

#include <gtest/gtest.h>

#include "qoptics/dsl.hpp"

namespace qoptics::dsl {
namespace {

using std::numbers::pi;

const std::string kSinglePhotonCircuit =
    "mode a cutoff 40\n"
    "mode b cutoff 1\n"
    "mode c cutoff 1\n"
    "source a squeezed r=0.5 phi=0\n"
    "source b fock n=1\n"
    "bs b c\n"
    "kerr a b tau=pi/2\n"
    "phase c theta=0\n"
    "bs b c\n"
    "detect b n=1\n"
    "detect c n=0\n";

bool has_error(const ParseResult& r) {
  for (const auto& d : r.diagnostics) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

const ParseDiagnostic& first_error(const ParseResult& r) {
  for (const auto& d : r.diagnostics) {
    if (d.severity == Severity::Error) return d;
  }
  throw std::logic_error("no error");
}

TEST(Parse, SinglePhotonCircuit) {
  const auto res = parse(kSinglePhotonCircuit);
  ASSERT_TRUE(res.ok());
  EXPECT_TRUE(res.diagnostics.empty());
  const auto& p = *res.program;
  EXPECT_EQ(p.modes.size(), 3u);
  EXPECT_EQ(p.sources.size(), 2u);
  ASSERT_EQ(p.elements.size(), 4u);
  EXPECT_EQ(p.detects.size(), 2u);
  EXPECT_EQ(p.elements[0], ElementDescriptor(BeamSplitter5050{"b", "c"}));
  EXPECT_EQ(p.elements[1], ElementDescriptor(CrossKerr{"a", "b", pi / 2}));
  EXPECT_EQ(p.elements[2], ElementDescriptor(PhaseShift{"c", 0.0}));
  EXPECT_EQ(p.sources[0].kind, SourceKind(SqueezeParam{0.5, 0.0}));
  EXPECT_EQ(p.outcome_groups().size(), 1u);
}

TEST(Parse, EmptyInput) {
  for (const char* text : {"", "\n\n", "# only a comment\n", "   \t\n"}) {
    const auto res = parse(text);
    ASSERT_TRUE(res.ok()) << text;
    EXPECT_TRUE(res.program->modes.empty());
    EXPECT_EQ(format(*res.program), "");
  }
}

TEST(Parse, KerrOnOneMode) {
  const auto res = parse("mode a cutoff 3\nkerr a a tau=pi\n");
  EXPECT_FALSE(res.ok());
  const auto& d = first_error(res);
  EXPECT_EQ(d.line, 2u);
  EXPECT_EQ(d.column, 8u);
  EXPECT_EQ(d.message, "modes must be distinct");
}

TEST(Parse, AngleForms) {
  const auto res = parse(
      "mode a cutoff 2\n"
      "phase a theta=pi\nphase a theta=-pi\nphase a theta=pi/4\nphase a theta=-pi/3\n"
      "phase a theta=0.5*pi\nphase a theta=-1.25\nphase a theta=+2e-1\n");
  ASSERT_TRUE(res.ok());
  const double want[] = {pi, -pi, pi / 4, -pi / 3, 0.5 * pi, -1.25, 0.2};
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(std::get<PhaseShift>(res.program->elements[i]).theta, want[i]);
}

TEST(Parse, CrlfAndComments) {
  std::string crlf;
  for (char ch : kSinglePhotonCircuit) {
    if (ch == '\n') crlf += "\r\n";
    else crlf += ch;
  }
  const auto a = parse(kSinglePhotonCircuit);
  const auto b = parse(crlf);
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(*a.program, *b.program);
  const auto c = parse("mode a cutoff 2 # trailing\n  # indented comment\nphase a theta=pi#tight\n");
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(std::get<PhaseShift>(c.program->elements[0]).theta, pi);
}

TEST(Parse, UnusedModeIsWarning) {
  const auto res = parse("mode a cutoff 2\nmode z cutoff 3\nsource a fock n=1\n");
  ASSERT_TRUE(res.ok());
  ASSERT_EQ(res.diagnostics.size(), 1u);
  EXPECT_EQ(res.diagnostics[0].severity, Severity::Warning);
  EXPECT_EQ(res.diagnostics[0].line, 2u);
  EXPECT_EQ(res.diagnostics[0].column, 6u);
}

TEST(Parse, CollectsErrorsAcrossLines) {
  const auto res = parse("mode a cutoff 2\nfoo\nbs a q\nphase a theta=x\n");
  EXPECT_FALSE(res.ok());
  std::vector<std::size_t> lines;
  for (const auto& d : res.diagnostics) {
    if (d.severity == Severity::Error) lines.push_back(d.line);
  }
  EXPECT_EQ(lines, (std::vector<std::size_t>{2, 3, 4}));
}

TEST(Parse, RenderPointsAtColumn) {
  const auto res = parse("mode a cutoff 2\nbs a q\n");
  const auto text = render(first_error(res), "x.qcirc");
  EXPECT_EQ(text, "x.qcirc:2:6: error: undeclared mode 'q'\n  bs a q\n       ^\n");
}

// Each body follows three declarations (a cutoff 4, b and c cutoff 1), so
// the offending line numbers start at 4.
struct Bad {
  const char* body;
  std::size_t line;
  std::size_t column;
  const char* message;
};

const Bad kMalformed[] = {
    {"frob a", 4, 1, "unknown keyword"},
    {"  Mode d cutoff 2", 4, 3, "unknown keyword"},
    {"bs b q", 4, 6, "undeclared mode"},
    {"source a squeezed r=0.5 phi=0\nsource a coherent re=1 im=0", 5, 8, "duplicate source"},
    {"bs b c\ndetect b n=1\nphase c theta=0", 6, 1, "after detect"},
    {"kerr a b tau=pi/x", 4, 14, "malformed angle"},
    {"phase c theta=3*pi/2", 4, 15, "malformed angle"},
    {"phase c theta=inf", 4, 15, "malformed angle"},
    {"source a squeezed r=abc phi=0", 4, 21, "malformed number"},
    {"source a coherent re=1 im=1e999", 4, 27, "malformed number"},
    {"source a squeezed r=-0.5 phi=0", 4, 21, "must be >= 0"},
    {"mode d cutoff x", 4, 15, "malformed unsigned integer"},
    {"mode d cutoff", 4, 14, "missing argument"},
    {"source a squeezed r=0.5", 4, 24, "missing argument"},
    {"bs b c extra", 4, 8, "unexpected token"},
    {"kerr a a tau=pi", 4, 8, "modes must be distinct"},
    {"bs a b", 4, 6, "equal cutoffs"},
    {"detect b n=2", 4, 12, "exceeds cutoff"},
    {"source b fock n=2", 4, 17, "exceeds cutoff"},
    {"phase c theta0", 4, 9, "expected 'theta=<value>'"},
    {"phase c theta=", 4, 15, "missing value"},
    {"mode a cutoff 3", 4, 6, "already declared"},
    {"mode d cutoff 1001", 4, 15, "cutoff exceeds limit"},
    {"mode 9x cutoff 1", 4, 6, "invalid mode label"},
    {"mode d mutoff 2", 4, 8, "expected 'cutoff'"},
    {"source a laser", 4, 10, "unknown source kind"},
    {"detect b n=1\ndetect c n=0\ndetect b n=1\ndetect c n=0", 6, 1, "duplicate detection outcome"},
    {"detect b n=1\ndetect c n=0\ndetect b n=0", 6, 1, "different modes"},
    {"mode d cutoff 1000\nmode e cutoff 1000\nmode f cutoff 1000", 5, 15, "dimension exceeds limit"},
};

TEST(Parse, MalformedCorpusPositions) {
  ASSERT_GE(std::size(kMalformed), 20u);
  for (const auto& bad : kMalformed) {
    const std::string text = std::string("mode a cutoff 4\nmode b cutoff 1\nmode c cutoff 1\n") + bad.body + "\n";
    const auto res = parse(text);
    EXPECT_FALSE(res.ok()) << bad.body;
    if (!has_error(res)) continue;
    const auto& d = first_error(res);
    EXPECT_EQ(std::make_tuple(d.line, d.column), std::make_tuple(bad.line, bad.column)) << bad.body << ": " << d.message;
    EXPECT_NE(d.message.find(bad.message), std::string::npos) << bad.body << ": " << d.message;
    EXPECT_FALSE(d.excerpt.empty());
  }
}

TEST(Format, CanonicalAngles) {
  EXPECT_EQ(format_angle(pi / 2), "pi/2");
  EXPECT_EQ(format_angle(pi), "pi");
  EXPECT_EQ(format_angle(-pi / 4), "-pi/4");
  EXPECT_EQ(format_angle(0.0), "0");
  EXPECT_EQ(format_angle(1.5 * pi), "1.5*pi");
  EXPECT_EQ(format_angle(0.3), "0.3");
}

TEST(Format, CanonicalText) {
  const auto p = parse(kSinglePhotonCircuit).program;
  EXPECT_EQ(format(*p), kSinglePhotonCircuit);
}

TEST(Format, RoundTrip) {
  const std::vector<std::string> corpus = {
      kSinglePhotonCircuit,
      "mode x cutoff 5\nmode y cutoff 5\nsource x coherent re=-0.25 im=1e-3\nsource y fock n=2\nbs y x\n"
      "phase x theta=0.1234567890123\nkerr y x tau=-pi/7\n",
      "mode a cutoff 3\nsource a squeezed r=0.75 phi=2.5*pi\nphase a theta=-2.5\n",
      "mode b cutoff 2\nmode c cutoff 2\nsource b fock n=1\nsource c fock n=1\nbs b c\n"
      "detect b n=2\ndetect c n=0\ndetect b n=0\ndetect c n=2\n",
  };
  for (const auto& text : corpus) {
    const auto a = parse(text);
    ASSERT_TRUE(a.ok()) << text;
    const auto canon = format(*a.program);
    const auto b = parse(canon);
    ASSERT_TRUE(b.ok()) << canon;
    EXPECT_EQ(*a.program, *b.program) << canon;
    EXPECT_EQ(format(*b.program), canon);
  }
}

TEST(Format, RandomAnglesRoundTrip) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = i % 3 == 0 ? u(rng) * pi : u(rng);
    EXPECT_EQ(detail::parse_angle(format_angle(x)).value(), x) << format_angle(x);
  }
}

std::string random_bytes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> b(0, 255);
  std::string s(n, '\0');
  for (auto& c : s) c = static_cast<char>(b(rng));
  return s;
}

std::string mutate(std::mt19937_64& rng, std::string s) {
  static const std::string alphabet = "abc \t\n\r#=/*-+.0123456789piemodecutoffsrcbkrdt";
  std::uniform_int_distribution<int> op(0, 2);
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  const int edits = 1 + static_cast<int>(rng() % 6);
  for (int e = 0; e < edits && !s.empty(); ++e) {
    const std::size_t at = rng() % s.size();
    switch (op(rng)) {
      case 0: s[at] = alphabet[ch(rng)]; break;
      case 1: s.erase(at, 1); break;
      default: s.insert(at, 1, alphabet[ch(rng)]);
    }
  }
  return s;
}

TEST(Fuzz, NeverCrashes) {
  std::mt19937_64 rng(41);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 3000; ++i) {
    std::string input;
    if (i % 3 == 0) {
      input = random_bytes(rng, rng() % 512);
    } else {
      input = mutate(rng, kSinglePhotonCircuit);
    }
    const auto res = parse(input);
    EXPECT_NE(res.ok(), has_error(res));
    if (res.ok()) {
      const auto again = parse(format(*res.program));
      ASSERT_TRUE(again.ok()) << format(*res.program);
      EXPECT_EQ(*again.program, *res.program);
    }
  }
  for (const std::size_t n : {std::size_t{1} << 16, std::size_t{65535}}) {
    const auto res = parse(random_bytes(rng, n));
    EXPECT_NE(res.ok(), has_error(res));
    std::string lines;
    while (lines.size() + 20 < n) lines += "mode a cutoff 1\n";
    EXPECT_FALSE(parse(lines).ok());  // every line after the first redeclares
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 30.0);
}

}  // namespace
}  // namespace qoptics::dsl
