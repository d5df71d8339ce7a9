#pragma once

// Conditional state generation with a single photon, two beam splitters,
// cross-Kerr media and ideal photon detection.
//
// Superposition protocol (modes a, b, c):
//   |1>_b|0>_c -> BS(b,c) -> (x) source_a -> Kerr(a,b,tau), Phase(c,theta) -> BS(b,c)
//   -> detect (b,c) = (1,0) "Db_fires" or (0,1) "Dc_fires".
// The Db branch is proportional to |src rotated by tau> - e^{i theta}|src>,
// the Dc branch to the sum.
//
// Entanglement protocol (modes a, b, c, a2) adds Kerr(a2,b,tau2) after the
// first Kerr medium; the branches become two-mode states on (a, a2).

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qoptics/elements.hpp"
#include "qoptics/errors.hpp"
#include "qoptics/fock.hpp"
#include "qoptics/program.hpp"
#include "qoptics/states.hpp"

namespace qoptics {

// Branches below this probability carry no state.
inline constexpr double kBranchThreshold = 1e-12;

struct SourceSpec {
  std::variant<SqueezeParam, CoherentParam> kind;
  std::optional<std::size_t> cutoff;  // chosen from epsilon when absent
  double epsilon = kDefaultLeakage;

  bool is_squeezed() const { return std::holds_alternative<SqueezeParam>(kind); }

  std::size_t resolved_cutoff() const {
    if (cutoff) return *cutoff;
    return std::visit([&](const auto& p) { return suggest_cutoff(p, epsilon); }, kind);
  }

  FockVector build() const { return build_rotated(0, 0.0); }

  // State after a cross-Kerr medium of phase tau with `photons` photons in
  // the partner mode: coherent alpha -> alpha e^{-i n tau}, squeezed
  // phi -> phi - 2 n tau (r unchanged).
  SourceSpec kerr_evolved(std::size_t photons, double tau) const {
    SourceSpec out = *this;
    const double n = static_cast<double>(photons);
    if (auto* sq = std::get_if<SqueezeParam>(&out.kind)) {
      sq->phi -= 2.0 * n * tau;
    } else {
      auto& co = std::get<CoherentParam>(out.kind);
      co.alpha *= std::polar(1.0, -n * tau);
    }
    return out;
  }

  FockVector build_rotated(std::size_t photons, double tau) const {
    const auto spec = kerr_evolved(photons, tau);
    const std::size_t c = resolved_cutoff();
    return std::visit(
        [&](const auto& p) -> FockVector {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, SqueezeParam>) {
            return squeezed_vacuum(p, c, epsilon);
          } else {
            return coherent(p, c, epsilon);
          }
        },
        spec.kind);
  }

  // Normalized cat state |src> +/- |-src> at this spec's cutoff.
  FockVector cat(CatSign sign) const {
    const std::size_t c = resolved_cutoff();
    return std::visit(
        [&](const auto& p) -> FockVector {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, SqueezeParam>) {
            return cat_squeezed(p, sign, c, epsilon);
          } else {
            return cat_coherent(p, sign, c, epsilon);
          }
        },
        kind);
  }
};

struct SuperpositionParams {
  SourceSpec source_a;
  double tau = 0.0;
  double theta = 0.0;
};

struct EntanglementParams {
  SourceSpec source_a;
  SourceSpec source_a2;
  double tau = 0.0;
  double tau2 = 0.0;
  double theta = 0.0;
};

struct Branch {
  std::string label;
  std::vector<Detect> outcome;
  double probability = 0.0;
  std::optional<MultiModeState> state;  // normalized conditional state
};

struct TraceEntry {
  std::string label;
  MultiModeState state;
};

struct ProtocolResult {
  std::vector<Branch> branches;
  std::vector<TraceEntry> trace;  // filled only when requested
  std::vector<std::string> warnings;
  double input_norm2 = 1.0;  // squared norm entering detection (1 - truncation leakage)

  const Branch& branch(const std::string& label) const {
    for (const auto& b : branches) {
      if (b.label == label) return b;
    }
    throw DomainError("no branch '" + label + "'");
  }

  double total_probability() const {
    double s = 0.0;
    for (const auto& b : branches) s += b.probability;
    return s;
  }
};

struct RunOptions {
  bool trace = false;
};

namespace protocol_modes {
inline const std::string a = "a";
inline const std::string a2 = "a2";
inline const std::string b = "b";
inline const std::string c = "c";
}  // namespace protocol_modes

namespace detail {

inline Branch detect_branch(const MultiModeState& s, std::vector<Detect> outcome) {
  MultiModeState cur = s;
  for (const auto& d : outcome) cur = project_mode(cur, d.mode, d.n).state;
  Branch br;
  br.label = outcome_label(outcome);
  br.outcome = std::move(outcome);
  const double p = cur.norm2();
  if (p < kBranchThreshold) {
    br.probability = 0.0;
  } else {
    br.probability = p;
    br.state = normalize(cur).state;
  }
  return br;
}

inline std::vector<Branch> single_photon_branches(const MultiModeState& s) {
  using namespace protocol_modes;
  return {detect_branch(s, {{b, 1}, {c, 0}}), detect_branch(s, {{b, 0}, {c, 1}})};
}

inline void validate_angles(std::initializer_list<double> angles) {
  for (double a : angles) {
    if (!std::isfinite(a)) throw DomainError("protocol angles must be finite");
  }
}

// |1>_b |0>_c and the first beam splitter.
inline std::pair<MultiModeState, MultiModeState> photon_after_bs1(Diagnostics& diag) {
  using namespace protocol_modes;
  auto psi0 = MultiModeState::basis({b, c}, {1, 1}, {1, 0});
  auto psi1 = apply_beam_splitter(psi0, b, c, &diag);
  return {std::move(psi0), std::move(psi1)};
}

}  // namespace detail

inline ProtocolResult run_superposition(const SuperpositionParams& p, const RunOptions& opt = {}) {
  using namespace protocol_modes;
  detail::validate_angles({p.tau, p.theta});
  ProtocolResult res;
  Diagnostics diag;
  auto [psi0, psi1] = detail::photon_after_bs1(diag);
  auto psi2 = tensor_product(MultiModeState::single(a, p.source_a.build()), psi1);
  auto psi3 = apply_phase_shift(apply_cross_kerr(psi2, a, b, p.tau), c, p.theta);
  auto psi4 = apply_beam_splitter(psi3, b, c, &diag);
  res.input_norm2 = psi4.norm2();
  res.branches = detail::single_photon_branches(psi4);
  res.warnings = std::move(diag.warnings);
  if (opt.trace) {
    res.trace = {{"psi0", psi0}, {"psi1", psi1}, {"psi2", psi2}, {"psi3", psi3}, {"psi4", psi4}};
  }
  return res;
}

inline ProtocolResult run_entanglement(const EntanglementParams& p, const RunOptions& opt = {}) {
  using namespace protocol_modes;
  detail::validate_angles({p.tau, p.tau2, p.theta});
  ProtocolResult res;
  Diagnostics diag;
  auto [psi0, psi1] = detail::photon_after_bs1(diag);
  auto psi2 = tensor_product(MultiModeState::single(a, p.source_a.build()), psi1);
  auto psi3 = apply_phase_shift(apply_cross_kerr(psi2, a, b, p.tau), c, p.theta);
  auto psi5 = tensor_product(psi3, MultiModeState::single(a2, p.source_a2.build()));
  auto psi6 = apply_cross_kerr(psi5, a2, b, p.tau2);
  auto psi7 = apply_beam_splitter(psi6, b, c, &diag);
  res.input_norm2 = psi7.norm2();
  res.branches = detail::single_photon_branches(psi7);
  res.warnings = std::move(diag.warnings);
  if (opt.trace) {
    res.trace = {{"psi0", psi0}, {"psi1", psi1}, {"psi2", psi2}, {"psi3", psi3},
                 {"psi5", psi5}, {"psi6", psi6}, {"psi7", psi7}};
  }
  return res;
}

// Initial product state of a program: declared modes in order, undeclared
// sources start in vacuum.
inline MultiModeState initial_state(const CircuitProgram& prog, double epsilon = kDefaultLeakage) {
  MultiModeState s = MultiModeState::scalar();
  for (const auto& m : prog.modes) {
    std::optional<FockVector> v;
    for (const auto& src : prog.sources) {
      if (src.mode != m.label) continue;
      v = std::visit(
          [&](const auto& k) -> FockVector {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, SqueezeParam>) {
              return squeezed_vacuum(k, m.cutoff, epsilon);
            } else if constexpr (std::is_same_v<T, CoherentParam>) {
              return coherent(k, m.cutoff, epsilon);
            } else {
              return fock(k.n, m.cutoff);
            }
          },
          src.kind);
    }
    s = tensor_product(s, MultiModeState::single(m.label, v ? *v : vacuum(m.cutoff)));
  }
  return s;
}

// Folds the program's elements over its initial state, then splits on each
// requested joint detection outcome. Without detects the single branch
// "unconditioned" holds the final state.
inline ProtocolResult run_circuit(const CircuitProgram& prog, const RunOptions& opt = {},
                                  double epsilon = kDefaultLeakage) {
  ProtocolResult res;
  Diagnostics diag;
  MultiModeState s = initial_state(prog, epsilon);
  if (opt.trace) res.trace.push_back({"initial", s});
  for (std::size_t i = 0; i < prog.elements.size(); ++i) {
    if (std::holds_alternative<Detect>(prog.elements[i])) {
      throw DomainError("element " + std::to_string(i + 1) + ": detection listed among unitary elements");
    }
    s = apply_element(s, prog.elements[i], &diag).state;
    if (opt.trace) res.trace.push_back({"element" + std::to_string(i + 1), s});
  }
  res.input_norm2 = s.norm2();
  const auto groups = prog.outcome_groups();
  if (groups.empty()) {
    Branch br{"unconditioned", {}, s.norm2(), std::nullopt};
    if (br.probability >= kBranchThreshold) {
      br.state = normalize(s).state;
    } else {
      br.probability = 0.0;
    }
    res.branches.push_back(std::move(br));
  }
  for (const auto& g : groups) res.branches.push_back(detail::detect_branch(s, g));
  res.warnings = std::move(diag.warnings);
  return res;
}

}  // namespace qoptics
