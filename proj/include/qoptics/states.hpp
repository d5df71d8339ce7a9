#pragma once

// Input and target states of the protocols, with exact truncated amplitudes.
//
// Conventions:
//   <n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!)
//   <2m|xi>   = (cosh r)^(-1/2) sqrt((2m)!)/(2^m m!) (-e^{i phi} tanh r)^m,  <2m+1|xi> = 0
// with xi = r e^{i phi}. The state |-xi> is SqueezeParam{r, phi + pi}; r >= 0 always.
//
// Every factory takes a leakage budget `epsilon`: the probability mass of the
// exact state above the cutoff must be below it, otherwise CutoffError.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "qoptics/errors.hpp"
#include "qoptics/fock.hpp"

namespace qoptics {

inline constexpr double kDefaultLeakage = 1e-10;

struct SqueezeParam {
  double r = 0.0;
  double phi = 0.0;

  cplx xi() const { return std::polar(r, phi); }
  SqueezeParam negated() const { return {r, phi + std::numbers::pi}; }
  void validate() const {
    if (!std::isfinite(r) || r < 0.0) throw DomainError("squeeze magnitude r must be finite and >= 0");
    if (!std::isfinite(phi)) throw DomainError("squeeze phase must be finite");
  }
  bool operator==(const SqueezeParam&) const = default;
};

struct CoherentParam {
  cplx alpha = 0.0;

  CoherentParam negated() const { return {-alpha}; }
  void validate() const {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
      throw DomainError("coherent amplitude must be finite");
    }
  }
  bool operator==(const CoherentParam&) const = default;
};

enum class CatSign { Plus, Minus };

inline double sign_value(CatSign s) { return s == CatSign::Plus ? 1.0 : -1.0; }

namespace detail {

// Successive amplitude ratios a_{n}/a_{n-1} generate each family without
// factorials, so large cutoffs never overflow.
struct CoherentSeries {
  cplx alpha;
  cplx first() const { return std::exp(-0.5 * std::norm(alpha)); }
  cplx next(cplx prev, std::size_t n) const { return prev * alpha / std::sqrt(static_cast<double>(n)); }
};

// Steps by two photons: a_{2m+2} = a_{2m} * (-e^{i phi} tanh r) * sqrt((2m+1)/(2m+2)).
struct SqueezedSeries {
  SqueezeParam p;
  cplx first() const { return 1.0 / std::sqrt(std::cosh(p.r)); }
  cplx ratio() const { return -std::polar(std::tanh(p.r), p.phi); }
  cplx next(cplx prev, std::size_t m) const {  // returns a_{2m+2} from a_{2m}
    const double k = static_cast<double>(m);
    return prev * ratio() * std::sqrt((2.0 * k + 1.0) / (2.0 * k + 2.0));
  }
};

// Photon-number probabilities from n = 0 until the remaining tail is
// negligible against `epsilon`. Terms are generated by recurrence; the tail
// beyond index N is the sum of the stored entries above N (plus a bound on
// what was not generated, which is kept far below epsilon).
inline std::vector<double> coherent_probabilities(const CoherentParam& p, double epsilon) {
  const double mean = std::norm(p.alpha);
  std::vector<double> probs;
  cplx a = CoherentSeries{p.alpha}.first();
  probs.push_back(std::norm(a));
  for (std::size_t n = 1;; ++n) {
    a = CoherentSeries{p.alpha}.next(a, n);
    const double q = std::norm(a);
    probs.push_back(q);
    // Past the Poisson peak terms decay at least geometrically with ratio mean/(n+1).
    const double ratio = mean / static_cast<double>(n + 1);
    if (static_cast<double>(n) > mean && ratio < 0.5 && q / (1.0 - ratio) < epsilon * 1e-6) break;
    if (q == 0.0 && static_cast<double>(n) > mean) break;
    if (n > 10'000'000) throw CutoffError("coherent amplitude too large for tail evaluation");
  }
  return probs;
}

inline std::vector<double> squeezed_probabilities(const SqueezeParam& p, double epsilon) {
  const SqueezedSeries s{p};
  const double t2 = std::norm(s.ratio());
  std::vector<double> probs;
  cplx a = s.first();
  probs.push_back(std::norm(a));
  if (p.r == 0.0) return probs;
  for (std::size_t m = 0;; ++m) {
    a = s.next(a, m);
    probs.push_back(0.0);
    const double q = std::norm(a);
    probs.push_back(q);
    // Even-term ratio is t2*(2m+3)/(2m+4) < t2, so the tail is bounded by q*t2/(1-t2).
    if (q * t2 / (1.0 - t2) < epsilon * 1e-6 || q == 0.0) break;
    if (m > 50'000'000) throw CutoffError("squeeze too strong for tail evaluation");
  }
  return probs;
}

// Smallest N with sum_{n > N} probs[n] < epsilon.
inline std::size_t smallest_cutoff(const std::vector<double>& probs, double epsilon) {
  double tail = 0.0;
  std::size_t n = probs.size();
  while (n > 0) {
    // tail currently holds sum_{k >= n} probs[k], i.e. leakage for cutoff n-1.
    if (tail + probs[n - 1] >= epsilon) return n - 1;
    tail += probs[n - 1];
    --n;
  }
  return 0;
}

inline double tail_above(const std::vector<double>& probs, std::size_t cutoff) {
  double tail = 0.0;
  for (std::size_t n = probs.size(); n-- > cutoff + 1;) tail += probs[n];
  return tail;
}

inline void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("leakage budget must lie in (0, 1)");
}

inline void check_leakage(double leak, double epsilon, std::size_t cutoff, const char* what) {
  if (!(leak < epsilon)) {
    throw CutoffError(std::string(what) + ": cutoff " + std::to_string(cutoff) + " leaks " +
                      std::to_string(leak) + " >= budget " + std::to_string(epsilon));
  }
}

}  // namespace detail

inline FockVector vacuum(std::size_t cutoff) {
  std::vector<cplx> a(cutoff + 1);
  a[0] = 1.0;
  return FockVector(std::move(a));
}

inline FockVector fock(std::size_t n, std::size_t cutoff) {
  if (n > cutoff) {
    throw DomainError("Fock state |" + std::to_string(n) + "> exceeds cutoff " + std::to_string(cutoff));
  }
  std::vector<cplx> a(cutoff + 1);
  a[n] = 1.0;
  return FockVector(std::move(a));
}

inline std::size_t suggest_cutoff(const CoherentParam& p, double epsilon = kDefaultLeakage) {
  p.validate();
  detail::check_epsilon(epsilon);
  return detail::smallest_cutoff(detail::coherent_probabilities(p, epsilon), epsilon);
}

inline std::size_t suggest_cutoff(const SqueezeParam& p, double epsilon = kDefaultLeakage) {
  p.validate();
  detail::check_epsilon(epsilon);
  return detail::smallest_cutoff(detail::squeezed_probabilities(p, epsilon), epsilon);
}

// Probability mass of the exact state above `cutoff`.
inline double leakage(const CoherentParam& p, std::size_t cutoff, double epsilon = kDefaultLeakage) {
  return detail::tail_above(detail::coherent_probabilities(p, epsilon), cutoff);
}
inline double leakage(const SqueezeParam& p, std::size_t cutoff, double epsilon = kDefaultLeakage) {
  return detail::tail_above(detail::squeezed_probabilities(p, epsilon), cutoff);
}

inline FockVector coherent(const CoherentParam& p, std::size_t cutoff, double epsilon = kDefaultLeakage) {
  p.validate();
  detail::check_epsilon(epsilon);
  detail::check_leakage(leakage(p, cutoff, epsilon), epsilon, cutoff, "coherent state");
  const detail::CoherentSeries s{p.alpha};
  std::vector<cplx> a(cutoff + 1);
  a[0] = s.first();
  for (std::size_t n = 1; n <= cutoff; ++n) a[n] = s.next(a[n - 1], n);
  return FockVector(std::move(a));
}

inline FockVector squeezed_vacuum(const SqueezeParam& p, std::size_t cutoff,
                                  double epsilon = kDefaultLeakage) {
  p.validate();
  detail::check_epsilon(epsilon);
  detail::check_leakage(leakage(p, cutoff, epsilon), epsilon, cutoff, "squeezed vacuum");
  const detail::SqueezedSeries s{p};
  std::vector<cplx> a(cutoff + 1);
  a[0] = s.first();
  for (std::size_t m = 0; 2 * m + 2 <= cutoff; ++m) a[2 * m + 2] = s.next(a[2 * m], m);
  return FockVector(std::move(a));
}

// Normalized |xi> +/- |-xi>.
inline FockVector cat_squeezed(const SqueezeParam& p, CatSign sign, std::size_t cutoff,
                               double epsilon = kDefaultLeakage) {
  auto v = squeezed_vacuum(p, cutoff, epsilon);
  v += sign_value(sign) * squeezed_vacuum(p.negated(), cutoff, epsilon);
  return normalized(v);
}

// Normalized |alpha> +/- |-alpha>.
inline FockVector cat_coherent(const CoherentParam& p, CatSign sign, std::size_t cutoff,
                               double epsilon = kDefaultLeakage) {
  auto v = coherent(p, cutoff, epsilon);
  v += sign_value(sign) * coherent(p.negated(), cutoff, epsilon);
  return normalized(v);
}

}  // namespace qoptics
