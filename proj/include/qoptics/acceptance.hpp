#pragma once

// End-to-end acceptance checks A1-A8. Each check compares library output
// with the reference computations in oracles.hpp at a fixed tolerance and
// reports the worst measured deviation.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qoptics/analysis.hpp"
#include "qoptics/dsl.hpp"
#include "qoptics/elements.hpp"
#include "qoptics/fock.hpp"
#include "qoptics/oracles.hpp"
#include "qoptics/protocols.hpp"
#include "qoptics/runner.hpp"
#include "qoptics/states.hpp"

namespace qoptics::acceptance {

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
};

struct Options {
  // Self-test hook: run A1 against a deliberately wrong beam-splitter convention.
  BsConvention bs_convention = BsConvention::Standard;
};

namespace tol {
inline constexpr double kExact = 1e-12;
inline constexpr double kKerrFidelity = 1e-10;
inline constexpr double kCatFidelity = 1e-9;
inline constexpr double kSqueezedProbability = 1e-6;
inline constexpr double kSupport = 1e-12;
inline constexpr double kCoherentProbability = 1e-9;
inline constexpr double kKerrBudgetGap = 0.01;
inline constexpr double kEntropy = 1e-8;
inline constexpr double kNorm = 1e-12;
inline constexpr double kCompleteness = 1e-10;
}  // namespace tol

namespace detail {

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline oracle::Amplitudes amps(const MultiModeState& s) { return {s.amplitudes().begin(), s.amplitudes().end()}; }
inline oracle::Amplitudes amps(const FockVector& s) { return {s.amplitudes().begin(), s.amplitudes().end()}; }

inline CriterionResult guarded(std::string id, std::string title, const std::function<void(CriterionResult&)>& body) {
  CriterionResult r{std::move(id), std::move(title), false, ""};
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

inline SourceSpec squeezed_spec(double r, double phi = 0.0) { return {SqueezeParam{r, phi}, std::nullopt, kDefaultLeakage}; }
inline SourceSpec coherent_spec(cplx alpha) { return {CoherentParam{alpha}, std::nullopt, kDefaultLeakage}; }

struct CatCheck {
  double worst_infidelity = 0.0;
  double p_db = 0.0, p_dc = 0.0;
};

// Superposition protocol on a squeezed input vs. oracle cat states.
inline CatCheck squeezed_cat_check(double r, double tau, double theta) {
  const auto res = run_superposition({squeezed_spec(r), tau, theta});
  const std::size_t cutoff = squeezed_spec(r).resolved_cutoff();
  const auto plus = oracle::squeezed_amplitudes(r, 0.0, cutoff);
  const auto minus = oracle::squeezed_amplitudes(r, std::numbers::pi, cutoff);
  const auto odd = oracle::combine(plus, 1.0, minus, -1.0);
  const auto even = oracle::combine(plus, 1.0, minus, 1.0);
  CatCheck c;
  const auto& db = res.branch("Db_fires");
  const auto& dc = res.branch("Dc_fires");
  c.p_db = db.probability;
  c.p_dc = dc.probability;
  c.worst_infidelity = std::max(1.0 - oracle::fidelity(amps(*db.state), odd), 1.0 - oracle::fidelity(amps(*dc.state), even));
  return c;
}

}  // namespace detail

inline CriterionResult check_a1(const Options& opt = {}) {
  return detail::guarded("A1", "beam splitter single-photon action", [&](CriterionResult& r) {
    const double h = std::numbers::sqrt2 / 2.0;
    const cplx ih(0.0, h);
    double worst = 0.0;
    for (int which = 0; which < 2; ++which) {
      const std::vector<std::size_t> occ = which == 0 ? std::vector<std::size_t>{1, 0} : std::vector<std::size_t>{0, 1};
      const auto in = MultiModeState::basis({"b", "c"}, {1, 1}, occ);
      const auto out = apply_beam_splitter(in, "b", "c", nullptr, opt.bs_convention);
      // |1,0> -> h|1,0> + ih|0,1>;  |0,1> -> h|0,1> + ih|1,0>
      const cplx e10 = which == 0 ? cplx(h) : ih;
      const cplx e01 = which == 0 ? ih : cplx(h);
      worst = std::max({worst, std::abs(out.amplitude({1, 0}) - e10), std::abs(out.amplitude({0, 1}) - e01),
                        std::abs(out.amplitude({0, 0})), std::abs(out.amplitude({1, 1}))});
    }
    r.passed = worst <= tol::kExact;
    r.detail = "max amplitude error " + detail::sci(worst);
  });
}

inline CriterionResult check_a2() {
  return detail::guarded("A2", "cross-Kerr phase rotation of squeezed and coherent inputs", [&](CriterionResult& r) {
    constexpr double eps = 1e-12;
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
      const double rr = unit(rng);
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      const double tau = 2.0 * std::numbers::pi * unit(rng);
      const cplx alpha = std::polar(2.0 * unit(rng), 2.0 * std::numbers::pi * unit(rng));
      const auto photon = MultiModeState::single("b", fock(1, 1));
      {
        const SqueezeParam p{rr, phi};
        const std::size_t c = suggest_cutoff(p, eps);
        const auto in = tensor_product(photon, MultiModeState::single("a", squeezed_vacuum(p, c, eps)));
        const auto out = apply_cross_kerr(in, "a", "b", tau);
        const auto target = oracle::squeezed_amplitudes(rr, phi - 2.0 * tau, c);
        oracle::Amplitudes expect(2 * (c + 1));
        for (std::size_t n = 0; n <= c; ++n) expect[(c + 1) + n] = target[n];
        worst = std::max(worst, 1.0 - oracle::fidelity(detail::amps(out), expect));
      }
      {
        const CoherentParam p{alpha};
        const std::size_t c = suggest_cutoff(p, eps);
        const auto in = tensor_product(photon, MultiModeState::single("a", coherent(p, c, eps)));
        const auto out = apply_cross_kerr(in, "a", "b", tau);
        const auto target = oracle::coherent_amplitudes(alpha * std::polar(1.0, -tau), c);
        oracle::Amplitudes expect(2 * (c + 1));
        for (std::size_t n = 0; n <= c; ++n) expect[(c + 1) + n] = target[n];
        worst = std::max(worst, 1.0 - oracle::fidelity(detail::amps(out), expect));
      }
    }
    r.passed = worst <= tol::kKerrFidelity;
    r.detail = "40 draws, max infidelity " + detail::sci(worst);
  });
}

inline CriterionResult check_a3() {
  return detail::guarded("A3", "squeezed cat generation at tau=pi/2", [&](CriterionResult& r) {
    const double rr = 0.5;
    const auto c = detail::squeezed_cat_check(rr, std::numbers::pi / 2.0, 0.0);
    const double s = std::real(oracle::squeezed_overlap_with_negative(rr, 0.0));
    const double dp = std::max(std::abs(c.p_db - (1.0 - s) / 2.0), std::abs(c.p_dc - (1.0 + s) / 2.0));
    r.passed = c.worst_infidelity <= tol::kCatFidelity && dp <= tol::kSqueezedProbability;
    r.detail = "infidelity " + detail::sci(c.worst_infidelity) + ", P(Db)=" + dsl::format_double(c.p_db) +
               ", P(Dc)=" + dsl::format_double(c.p_dc) + ", |dP| " + detail::sci(dp);
  });
}

inline CriterionResult check_a4() {
  return detail::guarded("A4", "photon-number support of squeezed cats", [&](CriterionResult& r) {
    double worst = 0.0;
    for (double rr : {0.2, 0.5, 1.0}) {
      const auto res = run_superposition({detail::squeezed_spec(rr), std::numbers::pi / 2.0, 0.0});
      const auto dc = photon_distribution(*res.branch("Dc_fires").state, "a");
      const auto db = photon_distribution(*res.branch("Db_fires").state, "a");
      worst = std::max({worst, support_residual(dc, congruent(4, 0)), support_residual(db, congruent(4, 2))});
    }
    r.passed = worst < tol::kSupport;
    r.detail = "r in {0.2,0.5,1.0}, max residual " + detail::sci(worst);
  });
}

inline CriterionResult check_a5() {
  return detail::guarded("A5", "coherent cat generation at tau=pi", [&](CriterionResult& r) {
    const cplx alpha = 1.0;
    const auto spec = detail::coherent_spec(alpha);
    const auto res = run_superposition({spec, std::numbers::pi, 0.0});
    const std::size_t cutoff = spec.resolved_cutoff();
    const auto pos = oracle::coherent_amplitudes(alpha, cutoff);
    const auto neg = oracle::coherent_amplitudes(-alpha, cutoff);
    const double inf = std::max(
        1.0 - oracle::fidelity(detail::amps(*res.branch("Db_fires").state), oracle::combine(pos, 1.0, neg, -1.0)),
        1.0 - oracle::fidelity(detail::amps(*res.branch("Dc_fires").state), oracle::combine(pos, 1.0, neg, 1.0)));
    // Overlap <alpha|-alpha> summed far past the protocol cutoff.
    const double s = std::real(oracle::dot(oracle::coherent_amplitudes(alpha, 200), oracle::coherent_amplitudes(-alpha, 200)));
    const double closed = std::exp(-2.0 * std::norm(alpha));
    const double dp = std::max(std::abs(res.branch("Db_fires").probability - (1.0 - s) / 2.0),
                               std::abs(res.branch("Dc_fires").probability - (1.0 + s) / 2.0));
    r.passed = inf <= tol::kCatFidelity && dp <= tol::kCoherentProbability && std::abs(s - closed) <= 1e-14;
    r.detail = "infidelity " + detail::sci(inf) + ", |dP| " + detail::sci(dp) + ", overlap vs e^{-2|a|^2} " +
               detail::sci(std::abs(s - closed));
  });
}

inline CriterionResult check_a6() {
  return detail::guarded("A6", "Kerr budget: pi/2 suffices for squeezed but not coherent cats", [&](CriterionResult& r) {
    const auto sq = detail::squeezed_cat_check(0.5, std::numbers::pi / 2.0, 0.0);
    const cplx alpha = 1.0;
    const auto spec = detail::coherent_spec(alpha);
    const auto res = run_superposition({spec, std::numbers::pi / 2.0, 0.0});
    const std::size_t cutoff = spec.resolved_cutoff();
    const auto pos = oracle::coherent_amplitudes(alpha, cutoff);
    const auto neg = oracle::coherent_amplitudes(-alpha, cutoff);
    double best = 0.0;
    for (const auto* label : {"Db_fires", "Dc_fires"}) {
      const auto& b = res.branch(label);
      if (!b.state) continue;
      for (double sign : {1.0, -1.0}) {
        best = std::max(best, oracle::fidelity(detail::amps(*b.state), oracle::combine(pos, 1.0, neg, sign)));
      }
    }
    r.passed = sq.worst_infidelity <= tol::kCatFidelity && best < 1.0 - tol::kKerrBudgetGap;
    r.detail = "squeezed infidelity " + detail::sci(sq.worst_infidelity) + ", coherent best cat fidelity " +
               dsl::format_double(best);
  });
}

inline CriterionResult check_a7() {
  return detail::guarded("A7", "entangled squeezed states at tau=tau'=pi/2", [&](CriterionResult& r) {
    const double rr = 0.5, r2 = 0.5;
    const double half_pi = std::numbers::pi / 2.0;
    const auto sa = detail::squeezed_spec(rr);
    const auto sb = detail::squeezed_spec(r2);
    const auto res = run_entanglement({sa, sb, half_pi, half_pi, 0.0});
    const std::size_t ca = sa.resolved_cutoff(), cb = sb.resolved_cutoff();

    // Targets from the factory: |xi e^{-i pi}>|eta e^{-i pi}> -/+ |xi>|eta>.
    auto mode = [](const char* l, const FockVector& v) { return MultiModeState::single(l, v); };
    const auto rotated = tensor_product(mode("a", squeezed_vacuum({rr, -std::numbers::pi}, ca)),
                                        mode("a2", squeezed_vacuum({r2, -std::numbers::pi}, cb)));
    const auto plain = tensor_product(mode("a", squeezed_vacuum({rr, 0.0}, ca)), mode("a2", squeezed_vacuum({r2, 0.0}, cb)));

    double inf = 0.0, dent = 0.0;
    std::size_t rank_db = 0, rank_dc = 0;
    const auto u0 = oracle::squeezed_amplitudes(rr, 0.0, ca);
    const auto u1 = oracle::squeezed_amplitudes(rr, -std::numbers::pi, ca);
    const auto v0 = oracle::squeezed_amplitudes(r2, 0.0, cb);
    const auto v1 = oracle::squeezed_amplitudes(r2, -std::numbers::pi, cb);
    for (double sign : {-1.0, 1.0}) {
      const auto& b = res.branch(sign < 0 ? "Db_fires" : "Dc_fires");
      const auto target = normalize(rotated + sign * plain).state;
      inf = std::max(inf, 1.0 - fidelity(*b.state, target));
      const auto sd = schmidt_decompose(*b.state, {"a"});
      (sign < 0 ? rank_db : rank_dc) = sd.rank();
      const double h = entanglement_entropy(*b.state, {"a"});
      dent = std::max(dent, std::abs(h - oracle::two_term_entropy(u1, u0, v1, v0, 1.0, sign)));
    }
    r.passed = inf <= tol::kCatFidelity && rank_db == 2 && rank_dc == 2 && dent <= tol::kEntropy;
    r.detail = "infidelity " + detail::sci(inf) + ", Schmidt ranks " + std::to_string(rank_db) + "/" +
               std::to_string(rank_dc) + ", entropy error " + detail::sci(dent);
  });
}

// Ten circuits exercising every statement form, used for round-trip checks.
inline const std::vector<std::string>& dsl_corpus() {
  static const std::vector<std::string> corpus = {
      "",
      "mode a cutoff 3\n",
      "# superposition\nmode a cutoff 40\nmode b cutoff 1\nmode c cutoff 1\n"
      "source a squeezed r=0.5 phi=0\nsource b fock n=1\nbs b c\nkerr a b tau=pi/2\nphase c theta=0\nbs b c\n"
      "detect b n=1\ndetect c n=0\ndetect b n=0\ndetect c n=1\n",
      "mode a cutoff 30\nmode a2 cutoff 30\nmode b cutoff 1\nmode c cutoff 1\n"
      "source a squeezed r=0.5 phi=0\nsource a2 squeezed r=0.5 phi=0\nsource b fock n=1\n"
      "bs b c\nkerr a b tau=pi/2\nphase c theta=0\nkerr a2 b tau=pi/2\nbs b c\ndetect b n=1\ndetect c n=0\n",
      "mode x cutoff 12\nsource x coherent re=1 im=-0.25\nphase x theta=0.3*pi\n",
      "mode p cutoff 2\nmode q cutoff 2\nsource p fock n=2\nbs p q\nbs q p\n",
      "mode m cutoff 5\r\nsource m squeezed r=0.1 phi=-pi/4\r\nphase m theta=1.25\r\n",
      "mode a cutoff 4 # trailing comment\nmode b cutoff 4\nkerr a b tau=-pi\nkerr b a tau=2.5*pi\n",
      "mode s cutoff 6\nmode t cutoff 6\nsource s coherent re=0.5 im=0.5\nsource t fock n=3\nbs s t\ndetect s n=0\n",
      "mode u cutoff 1\nmode v cutoff 1\nmode w cutoff 1\nsource u fock n=1\nbs u v\nbs v w\nphase w theta=pi/3\n"
      "detect u n=0\ndetect v n=1\ndetect w n=0\n",
  };
  return corpus;
}

namespace detail {

// Random state with support only where b + c <= cutoff of (b, c).
inline MultiModeState random_pair_state(std::mt19937_64& rng, std::size_t ca, std::size_t cbc) {
  std::normal_distribution<double> g;
  MultiModeState s({"a", "b", "c"}, {ca, cbc, cbc}, std::vector<cplx>((ca + 1) * (cbc + 1) * (cbc + 1)));
  std::vector<cplx> v(s.dimension());
  for (std::size_t f = 0; f < v.size(); ++f) {
    if (s.occupation(f, 1) + s.occupation(f, 2) <= cbc) v[f] = {g(rng), g(rng)};
  }
  return normalize(s.with_amplitudes(std::move(v))).state;
}

inline std::string random_circuit_text(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {
      "mode", "source", "bs", "phase", "kerr", "detect", "cutoff", "squeezed", "coherent", "fock", "a", "b", "c",
      "r=0.5", "phi=pi", "tau=pi/2", "theta=", "n=1", "n=", "re=1", "im=0", "3", "40", "pi/0", "-pi", "1e999",
      "#", "\r", "\t", "=", "2*pi", "nan", "r=-1", "\xff\xfe", "x", "mode a cutoff 2\n", "detect a n=0\n"};
  std::uniform_int_distribution<int> mode_pick(0, 2);
  std::uniform_int_distribution<std::size_t> len(0, 400);
  std::string s;
  const int style = mode_pick(rng);
  const std::size_t n = len(rng);
  if (style == 0) {
    std::uniform_int_distribution<int> byte(0, 255);
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>(byte(rng)));
  } else {
    std::uniform_int_distribution<std::size_t> w(0, words.size() - 1);
    std::uniform_int_distribution<int> sep(0, 5);
    for (std::size_t i = 0; i < n / 4; ++i) {
      s += words[w(rng)];
      s += sep(rng) == 0 ? "\n" : " ";
    }
  }
  return s;
}

}  // namespace detail

inline CriterionResult check_a8() {
  return detail::guarded("A8", "infrastructure: unitarity, completeness, DSL round trip, fuzz, sweep determinism", [&](CriterionResult& r) {
    std::mt19937_64 rng(8);
    std::vector<std::string> failures;

    // Unitarity over 100 random element applications.
    double worst_norm = 0.0;
    {
      auto s = detail::random_pair_state(rng, 4, 4);
      std::uniform_int_distribution<int> pick(0, 2);
      std::uniform_real_distribution<double> ang(-10.0, 10.0);
      const std::vector<std::string> labels = {"a", "b", "c"};
      std::uniform_int_distribution<std::size_t> mode(0, 2);
      Diagnostics diag;
      for (int i = 0; i < 100; ++i) {
        const double before = s.norm2();
        switch (pick(rng)) {
          case 0: s = apply_beam_splitter(s, "b", "c", &diag); break;
          case 1: s = apply_phase_shift(s, labels[mode(rng)], ang(rng)); break;
          default: {
            const auto x = mode(rng);
            s = apply_cross_kerr(s, labels[x], labels[(x + 1) % 3], ang(rng));
          }
        }
        worst_norm = std::max(worst_norm, std::abs(s.norm2() - before));
      }
      if (worst_norm > tol::kNorm || !diag.warnings.empty()) failures.push_back("unitarity " + detail::sci(worst_norm));
    }

    // Projection completeness.
    double worst_proj = 0.0;
    for (int i = 0; i < 20; ++i) {
      auto s = detail::random_pair_state(rng, 3 + static_cast<std::size_t>(i % 4), 2);
      s *= 0.7;  // sub-normalized input
      for (const auto& m : s.labels()) {
        double total = 0.0;
        for (std::size_t n = 0; n <= s.cutoff_of(m); ++n) total += project_mode(s, m, n).probability;
        worst_proj = std::max(worst_proj, std::abs(total - s.norm2()));
      }
    }
    if (worst_proj > tol::kCompleteness) failures.push_back("completeness " + detail::sci(worst_proj));

    // DSL round trip.
    std::size_t roundtrip_ok = 0;
    for (const auto& text : dsl_corpus()) {
      const auto p1 = dsl::parse(text);
      if (!p1.ok()) continue;
      const auto canon = dsl::format(*p1.program);
      const auto p2 = dsl::parse(canon);
      if (p2.ok() && *p2.program == *p1.program && dsl::format(*p2.program) == canon) ++roundtrip_ok;
    }
    if (roundtrip_ok != dsl_corpus().size()) failures.push_back("round trip " + std::to_string(roundtrip_ok) + "/10");

    // Parser fuzz: every input must come back with a result, never an exception.
    std::size_t fuzz_done = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 10000; ++i) {
      const auto text = detail::random_circuit_text(rng);
      const auto res = dsl::parse(text);
      bool has_error = false;
      for (const auto& d : res.diagnostics) has_error = has_error || d.severity == dsl::Severity::Error;
      // Failure must come with an error diagnostic, success without one.
      if (res.ok() != has_error) ++fuzz_done;
    }
    if (fuzz_done != 10000) failures.push_back("fuzz " + std::to_string(fuzz_done) + "/10000 consistent");
    const double fuzz_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // Sweep determinism across worker counts.
    runner::RunConfig cfg;
    cfg.protocol = "superposition";
    cfg.sweeps = {runner::parse_sweep("r:0.1:1.0:10")};
    cfg.format = "csv";
    cfg.workers = 1;
    const auto one = runner::sweep(cfg);
    cfg.workers = 8;
    const auto eight = runner::sweep(cfg);
    cfg.format = "json";
    const auto eight_json = runner::sweep(cfg);
    cfg.workers = 1;
    const auto one_json = runner::sweep(cfg);
    if (one != eight || one_json != eight_json) failures.push_back("sweep output depends on worker count");

    r.passed = failures.empty();
    r.detail = "norm drift " + detail::sci(worst_norm) + ", completeness " + detail::sci(worst_proj) + ", round trip " +
               std::to_string(roundtrip_ok) + "/10, fuzz " + std::to_string(fuzz_done) + " inputs in " +
               detail::sci(fuzz_s) + " s, sweep " + (one == eight && one_json == eight_json ? "identical" : "DIFFERS");
    for (const auto& f : failures) r.detail += "; FAILED " + f;
  });
}

inline std::vector<CriterionResult> run_all(const Options& opt = {}) {
  return {check_a1(opt), check_a2(), check_a3(), check_a4(), check_a5(), check_a6(), check_a7(), check_a8()};
}

inline std::string format_line(const CriterionResult& r) {
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + r.id + " " + r.title + ": " + r.detail;
}

}  // namespace qoptics::acceptance
