#pragma once

// Unitary optical elements acting on MultiModeState, and ideal detection.
//
// Beam splitter convention (50:50):
//   b_out = (b_in + i c_in)/sqrt(2),  c_out = (c_in + i b_in)/sqrt(2)
// so that |1,0> -> (|1,0> + i|0,1>)/sqrt(2) and |0,1> -> (|0,1> + i|1,0>)/sqrt(2).
// Phase shifter: |n> -> e^{i n theta}|n>.
// Cross-Kerr:    |n_a, n_b> -> e^{-i n_a n_b tau}|n_a, n_b>, tau = K l / v.

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qoptics/errors.hpp"
#include "qoptics/fock.hpp"

namespace qoptics {

struct BeamSplitter5050 {
  std::string mode_b, mode_c;
  bool operator==(const BeamSplitter5050&) const = default;
};
struct PhaseShift {
  std::string mode;
  double theta = 0.0;
  bool operator==(const PhaseShift&) const = default;
};
struct CrossKerr {
  std::string mode_a, mode_b;
  double tau = 0.0;
  bool operator==(const CrossKerr&) const = default;
};
struct Detect {
  std::string mode;
  std::size_t n = 0;
  bool operator==(const Detect&) const = default;
};

using ElementDescriptor = std::variant<BeamSplitter5050, PhaseShift, CrossKerr, Detect>;

// Non-fatal findings collected while applying elements.
struct Diagnostics {
  std::vector<std::string> warnings;
};

// Sign of the i in the beam-splitter coupling. Standard is the convention
// documented above; Conjugate exists only so self-checks can confirm they
// detect a wrong convention.
enum class BsConvention { Standard, Conjugate };

namespace detail {

inline void require_distinct(const std::string& x, const std::string& y) {
  if (x == y) throw DomainError("modes must be distinct ('" + x + "')");
}

inline void require_finite_angle(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

// Splits flat indices of a state around one mode, or around an ordered pair.
// For a pair (j < k), index = o*(dj*mid*dk*in) + nj*(mid*dk*in) + m*(dk*in) + nk*in + i.
struct PairLayout {
  std::size_t outer, dim_j, mid, dim_k, inner;

  PairLayout(const MultiModeState& s, std::size_t j, std::size_t k) {
    dim_j = s.cutoffs()[j] + 1;
    dim_k = s.cutoffs()[k] + 1;
    inner = s.stride(k);
    mid = s.stride(j) / (dim_k * inner);
    outer = s.dimension() / (dim_j * mid * dim_k * inner);
  }
  std::size_t index(std::size_t o, std::size_t nj, std::size_t m, std::size_t nk, std::size_t i) const {
    return (((o * dim_j + nj) * mid + m) * dim_k + nk) * inner + i;
  }
};

// Output columns of the beam splitter on the full (untruncated) space.
// column(m, k) holds U|m,k> as amplitudes over p = 0..m+k for |p, m+k-p>.
// Built with U|m,k> = B^dag U|m-1,k>/sqrt(m) and U|0,k> = C^dag U|0,k-1>/sqrt(k),
// where B^dag = (b^dag + s i c^dag)/sqrt(2), C^dag = (c^dag + s i b^dag)/sqrt(2).
class BeamSplitterTable {
 public:
  BeamSplitterTable(std::size_t cutoff, BsConvention conv) : cutoff_(cutoff), cols_((cutoff + 1) * (cutoff + 1)) {
    const cplx is = (conv == BsConvention::Standard ? 1.0 : -1.0) * cplx(0.0, 1.0);
    const double h = std::numbers::sqrt2 / 2.0;
    // Raise by one photon, v over p for total N -> w over p for total N+1.
    auto raise_b = [&](const std::vector<cplx>& v, double scale) {
      const std::size_t n = v.size() - 1;
      std::vector<cplx> w(n + 2);
      for (std::size_t p = 0; p <= n; ++p) {
        const std::size_t q = n - p;
        w[p + 1] += v[p] * std::sqrt(static_cast<double>(p + 1)) * h * scale;       // b^dag
        w[p] += is * v[p] * std::sqrt(static_cast<double>(q + 1)) * h * scale;      // i c^dag
      }
      return w;
    };
    auto raise_c = [&](const std::vector<cplx>& v, double scale) {
      const std::size_t n = v.size() - 1;
      std::vector<cplx> w(n + 2);
      for (std::size_t p = 0; p <= n; ++p) {
        const std::size_t q = n - p;
        w[p] += v[p] * std::sqrt(static_cast<double>(q + 1)) * h * scale;           // c^dag
        w[p + 1] += is * v[p] * std::sqrt(static_cast<double>(p + 1)) * h * scale;  // i b^dag
      }
      return w;
    };
    col(0, 0) = {1.0};
    for (std::size_t k = 1; k <= cutoff; ++k) col(0, k) = raise_c(col(0, k - 1), 1.0 / std::sqrt(static_cast<double>(k)));
    for (std::size_t k = 0; k <= cutoff; ++k) {
      for (std::size_t m = 1; m <= cutoff; ++m) {
        col(m, k) = raise_b(col(m - 1, k), 1.0 / std::sqrt(static_cast<double>(m)));
      }
    }
  }

  const std::vector<cplx>& column(std::size_t m, std::size_t k) const { return cols_[m * (cutoff_ + 1) + k]; }

 private:
  std::vector<cplx>& col(std::size_t m, std::size_t k) { return cols_[m * (cutoff_ + 1) + k]; }

  std::size_t cutoff_;
  std::vector<std::vector<cplx>> cols_;
};

// Tables are immutable once built and shared across threads.
inline std::shared_ptr<const BeamSplitterTable> beam_splitter_table(std::size_t cutoff, BsConvention conv) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, BsConvention>, std::shared_ptr<const BeamSplitterTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{cutoff, conv}];
  if (!slot) slot = std::make_shared<const BeamSplitterTable>(cutoff, conv);
  return slot;
}

}  // namespace detail

inline MultiModeState apply_phase_shift(const MultiModeState& s, const std::string& mode, double theta) {
  detail::require_finite_angle(theta, "phase shift angle");
  const std::size_t k = s.index_of(mode);
  std::vector<cplx> phases(s.cutoffs()[k] + 1);
  for (std::size_t n = 0; n < phases.size(); ++n) phases[n] = std::polar(1.0, static_cast<double>(n) * theta);
  std::vector<cplx> amps(s.amplitudes().begin(), s.amplitudes().end());
  for (std::size_t f = 0; f < amps.size(); ++f) amps[f] *= phases[s.occupation(f, k)];
  return s.with_amplitudes(std::move(amps));
}

inline MultiModeState apply_cross_kerr(const MultiModeState& s, const std::string& mode_a,
                                       const std::string& mode_b, double tau) {
  detail::require_distinct(mode_a, mode_b);
  detail::require_finite_angle(tau, "Kerr phase");
  const std::size_t ka = s.index_of(mode_a);
  const std::size_t kb = s.index_of(mode_b);
  std::vector<cplx> amps(s.amplitudes().begin(), s.amplitudes().end());
  for (std::size_t f = 0; f < amps.size(); ++f) {
    const auto na = static_cast<double>(s.occupation(f, ka));
    const auto nb = static_cast<double>(s.occupation(f, kb));
    if (na != 0.0 && nb != 0.0) amps[f] *= std::polar(1.0, -na * nb * tau);
  }
  return s.with_amplitudes(std::move(amps));
}

// Pair states whose total photon number exceeds the common cutoff lose the
// components that do not fit; a warning is appended to `diag` when that
// happens (and the norm is not preserved).
inline MultiModeState apply_beam_splitter(const MultiModeState& s, const std::string& mode_b,
                                          const std::string& mode_c, Diagnostics* diag = nullptr,
                                          BsConvention conv = BsConvention::Standard) {
  detail::require_distinct(mode_b, mode_c);
  const std::size_t kb = s.index_of(mode_b);
  const std::size_t kc = s.index_of(mode_c);
  const std::size_t cutoff = s.cutoffs()[kb];
  if (s.cutoffs()[kc] != cutoff) {
    throw IncompatibleError("beam splitter modes '" + mode_b + "' and '" + mode_c + "' have different cutoffs");
  }
  const auto table = detail::beam_splitter_table(cutoff, conv);
  const bool b_first = kb < kc;
  const detail::PairLayout lay(s, b_first ? kb : kc, b_first ? kc : kb);
  auto at = [&](std::size_t o, std::size_t nb, std::size_t m, std::size_t nc, std::size_t i) {
    return b_first ? lay.index(o, nb, m, nc, i) : lay.index(o, nc, m, nb, i);
  };

  const auto in = s.amplitudes();
  std::vector<cplx> out(in.size());
  bool leaked = false;
  for (std::size_t o = 0; o < lay.outer; ++o) {
    for (std::size_t m = 0; m < lay.mid; ++m) {
      for (std::size_t i = 0; i < lay.inner; ++i) {
        for (std::size_t nb = 0; nb <= cutoff; ++nb) {
          for (std::size_t nc = 0; nc <= cutoff; ++nc) {
            const cplx a = in[at(o, nb, m, nc, i)];
            if (a == cplx(0.0)) continue;
            const std::size_t total = nb + nc;
            if (total > cutoff) leaked = true;
            const auto& col = table->column(nb, nc);
            for (std::size_t p = 0; p <= total; ++p) {
              const std::size_t q = total - p;
              if (p > cutoff || q > cutoff) continue;
              out[at(o, p, m, q, i)] += a * col[p];
            }
          }
        }
      }
    }
  }
  if (leaked && diag) {
    diag->warnings.push_back("beam splitter " + mode_b + "/" + mode_c +
                             ": pair photon number exceeds cutoff " + std::to_string(cutoff) +
                             "; truncation is not unitary for this state");
  }
  return s.with_amplitudes(std::move(out));
}

// Result of applying one element: a unitary yields probability 1, a
// detection yields the projected (unnormalized) state and its probability.
struct ElementOutcome {
  MultiModeState state;
  std::optional<double> probability;
};

inline ElementOutcome apply_element(const MultiModeState& s, const ElementDescriptor& e,
                                    Diagnostics* diag = nullptr) {
  return std::visit(
      [&](const auto& el) -> ElementOutcome {
        using T = std::decay_t<decltype(el)>;
        if constexpr (std::is_same_v<T, BeamSplitter5050>) {
          return {apply_beam_splitter(s, el.mode_b, el.mode_c, diag), std::nullopt};
        } else if constexpr (std::is_same_v<T, PhaseShift>) {
          return {apply_phase_shift(s, el.mode, el.theta), std::nullopt};
        } else if constexpr (std::is_same_v<T, CrossKerr>) {
          return {apply_cross_kerr(s, el.mode_a, el.mode_b, el.tau), std::nullopt};
        } else {
          auto pr = project_mode(s, el.mode, el.n);
          return {std::move(pr.state), pr.probability};
        }
      },
      e);
}

}  // namespace qoptics
