#pragma once

// In-memory form of a circuit: declared modes, their initial states,
// the unitary elements in order, and the requested detection outcomes.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "qoptics/elements.hpp"
#include "qoptics/states.hpp"

namespace qoptics {

struct FockSource {
  std::size_t n = 0;
  bool operator==(const FockSource&) const = default;
};

using SourceKind = std::variant<SqueezeParam, CoherentParam, FockSource>;

struct ModeDecl {
  std::string label;
  std::size_t cutoff = 0;
  bool operator==(const ModeDecl&) const = default;
};

struct SourceDecl {
  std::string mode;
  SourceKind kind;
  bool operator==(const SourceDecl&) const = default;
};

// Detect directives are grouped into joint outcomes: a group ends when a
// mode repeats, so `detect b n=1; detect c n=0; detect b n=0; detect c n=1`
// requests the two outcomes (b=1,c=0) and (b=0,c=1).
struct CircuitProgram {
  std::vector<ModeDecl> modes;
  std::vector<SourceDecl> sources;
  std::vector<ElementDescriptor> elements;  // unitary elements only
  std::vector<Detect> detects;

  bool operator==(const CircuitProgram&) const = default;

  std::vector<std::vector<Detect>> outcome_groups() const {
    std::vector<std::vector<Detect>> groups;
    for (const auto& d : detects) {
      bool repeat = groups.empty();
      if (!repeat) {
        for (const auto& g : groups.back()) repeat = repeat || g.mode == d.mode;
      }
      if (repeat) groups.emplace_back();
      groups.back().push_back(d);
    }
    return groups;
  }
};

// "Db_fires" when exactly mode b saw one photon and every other detected
// mode saw none, otherwise "b=1,c=0" style.
inline std::string outcome_label(const std::vector<Detect>& outcome) {
  std::size_t ones = 0, zeros = 0;
  std::string fired;
  for (const auto& d : outcome) {
    if (d.n == 1) {
      ++ones;
      fired = d.mode;
    } else if (d.n == 0) {
      ++zeros;
    }
  }
  if (ones == 1 && ones + zeros == outcome.size()) return "D" + fired + "_fires";
  std::string s;
  for (const auto& d : outcome) {
    if (!s.empty()) s += ",";
    s += d.mode + "=" + std::to_string(d.n);
  }
  return s;
}

}  // namespace qoptics
