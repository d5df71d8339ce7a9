#pragma once

// Diagnostics on output states.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qoptics/errors.hpp"
#include "qoptics/fock.hpp"

namespace qoptics {

// Tolerance on |norm^2 - 1| for inputs that must be normalized.
inline constexpr double kNormalizedTolerance = 1e-6;
// Schmidt coefficients at or below this count as zero.
inline constexpr double kSchmidtZero = 1e-10;

using PhotonSet = std::function<bool(std::size_t)>;

// {n : n mod modulus == residue}, e.g. congruent(4, 2) = {2, 6, 10, ...}.
inline PhotonSet congruent(std::size_t modulus, std::size_t residue) {
  return [=](std::size_t n) { return n % modulus == residue; };
}

inline PhotonSet photon_set(std::set<std::size_t> allowed) {
  return [allowed = std::move(allowed)](std::size_t n) { return allowed.count(n) > 0; };
}

// P(n) for one mode, marginalized over the others.
inline std::vector<double> photon_distribution(const MultiModeState& s, const std::string& mode) {
  const std::size_t k = s.index_of(mode);
  std::vector<double> p(s.cutoffs()[k] + 1, 0.0);
  const auto amps = s.amplitudes();
  for (std::size_t f = 0; f < amps.size(); ++f) p[s.occupation(f, k)] += std::norm(amps[f]);
  return p;
}

inline std::vector<double> photon_distribution(const FockVector& v) {
  std::vector<double> p;
  for (const auto& a : v.amplitudes()) p.push_back(std::norm(a));
  return p;
}

inline double support_residual(std::span<const double> dist, const PhotonSet& allowed) {
  double r = 0.0;
  for (std::size_t n = 0; n < dist.size(); ++n) {
    if (!allowed(n)) r += dist[n];
  }
  return r;
}

namespace detail {
inline void require_normalized(double norm2, const char* what) {
  if (std::abs(norm2 - 1.0) > kNormalizedTolerance) {
    throw DomainError(std::string(what) + " is not normalized (norm^2 = " + std::to_string(norm2) + ")");
  }
}
}  // namespace detail

// |<target|s>|^2 for normalized states of identical shape.
inline double fidelity(const MultiModeState& s, const MultiModeState& target) {
  s.require_same_shape(target);
  detail::require_normalized(s.norm2(), "state");
  detail::require_normalized(target.norm2(), "target");
  return std::min(1.0, std::norm(inner_product(target, s)));
}

inline double fidelity(const FockVector& s, const FockVector& target) {
  detail::require_normalized(s.norm2(), "state");
  detail::require_normalized(target.norm2(), "target");
  return std::min(1.0, std::norm(inner_product(target, s)));
}

// -sum c^2 log2 c^2 over coefficients above kSchmidtZero.
inline double entropy_from_coefficients(std::span<const double> coefficients) {
  double h = 0.0;
  for (double c : coefficients) {
    if (c <= kSchmidtZero) continue;
    const double p = c * c;
    h -= p * std::log2(p);
  }
  return std::max(0.0, h);
}

// Von Neumann entropy (bits) of the reduced state on `left_modes`.
inline double entanglement_entropy(const MultiModeState& s, const std::vector<std::string>& left_modes) {
  detail::require_normalized(s.norm2(), "state");
  return entropy_from_coefficients(schmidt_decompose(s, left_modes).coefficients);
}

struct AnalysisReport {
  std::map<std::string, std::vector<double>> distribution;  // per mode
  std::map<std::string, double> support_residual;             // per named allowed set
  std::map<std::string, double> fidelity_targets;
  std::optional<double> schmidt_entropy;
  std::vector<double> schmidt_coefficients;
  double pre_norm = 1.0;
};

struct NamedSupport {
  std::string name;
  std::string mode;
  PhotonSet allowed;
};

struct NamedTarget {
  std::string name;
  MultiModeState state;
};

// Collects the report for a normalized state. Entanglement is evaluated
// across `left_modes` when given and the state has more than one mode.
inline AnalysisReport analyze(const MultiModeState& s, double pre_norm,
                              const std::vector<NamedSupport>& supports = {},
                              const std::vector<NamedTarget>& targets = {},
                              const std::vector<std::string>& left_modes = {}) {
  AnalysisReport r;
  r.pre_norm = pre_norm;
  for (const auto& l : s.labels()) r.distribution[l] = photon_distribution(s, l);
  for (const auto& sup : supports) r.support_residual[sup.name] = support_residual(r.distribution.at(sup.mode), sup.allowed);
  for (const auto& t : targets) r.fidelity_targets[t.name] = fidelity(s, t.state);
  if (!left_modes.empty() && s.mode_count() > left_modes.size()) {
    const auto sd = schmidt_decompose(s, left_modes);
    for (double c : sd.coefficients) {
      if (c > kSchmidtZero) r.schmidt_coefficients.push_back(c);
    }
    r.schmidt_entropy = entropy_from_coefficients(sd.coefficients);
  }
  return r;
}

}  // namespace qoptics
