#pragma once

// Dense truncated Fock-space states.
//
// A MultiModeState stores amplitudes for an ordered list of modes as a flat
// row-major tensor: the first mode label varies slowest. Mode i with cutoff
// N_i contributes a factor (N_i + 1) to the tensor size. A state with zero
// modes is a scalar (tensor size 1).
//
// States may be sub-normalized (after projection) or carry arbitrary norm
// (unnormalized superpositions); normalization is always explicit.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qoptics/errors.hpp"

namespace qoptics {

using cplx = std::complex<double>;

inline constexpr double kZeroThreshold = 1e-12;
// Slack on the unit-norm bound for states produced by unitary evolution.
inline constexpr double kNormSlack = 1e-9;

namespace detail {

inline void require_finite(std::span<const cplx> amps) {
  for (const auto& a : amps) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw DomainError("amplitude is not finite");
    }
  }
}

inline double norm2_of(std::span<const cplx> amps) {
  double s = 0.0;
  for (const auto& a : amps) s += std::norm(a);
  return s;
}

}  // namespace detail

// Single-mode state truncated at `cutoff` photons.
class FockVector {
 public:
  explicit FockVector(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.empty()) throw DomainError("FockVector needs at least one amplitude");
    detail::require_finite(amps_);
  }

  std::size_t cutoff() const { return amps_.size() - 1; }
  std::span<const cplx> amplitudes() const { return amps_; }
  cplx operator[](std::size_t n) const { return amps_.at(n); }
  double norm2() const { return detail::norm2_of(amps_); }
  double norm() const { return std::sqrt(norm2()); }

  FockVector& operator+=(const FockVector& o) {
    check_same(o);
    for (std::size_t n = 0; n < amps_.size(); ++n) amps_[n] += o.amps_[n];
    return *this;
  }
  FockVector& operator-=(const FockVector& o) {
    check_same(o);
    for (std::size_t n = 0; n < amps_.size(); ++n) amps_[n] -= o.amps_[n];
    return *this;
  }
  FockVector& operator*=(cplx c) {
    for (auto& a : amps_) a *= c;
    return *this;
  }

  friend FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
  friend FockVector operator-(FockVector a, const FockVector& b) { return a -= b; }
  friend FockVector operator*(cplx c, FockVector a) { return a *= c; }

 private:
  void check_same(const FockVector& o) const {
    if (o.amps_.size() != amps_.size()) throw IncompatibleError("FockVector cutoff mismatch");
  }

  std::vector<cplx> amps_;
};

class MultiModeState {
 public:
  MultiModeState(std::vector<std::string> labels, std::vector<std::size_t> cutoffs,
                 std::vector<cplx> amplitudes)
      : labels_(std::move(labels)), cutoffs_(std::move(cutoffs)), amps_(std::move(amplitudes)) {
    if (labels_.size() != cutoffs_.size()) {
      throw IncompatibleError("labels and cutoffs differ in length");
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
      if (l.empty()) throw LabelError("empty mode label");
      if (!seen.insert(l).second) throw LabelError("duplicate mode label '" + l + "'");
    }
    strides_.assign(labels_.size(), 1);
    std::size_t dim = 1;
    for (std::size_t i = labels_.size(); i-- > 0;) {
      strides_[i] = dim;
      dim *= cutoffs_[i] + 1;
    }
    if (amps_.size() != dim) {
      throw IncompatibleError("amplitude count " + std::to_string(amps_.size()) +
                              " does not match tensor size " + std::to_string(dim));
    }
    detail::require_finite(amps_);
  }

  // Zero-mode state holding a single scalar amplitude.
  static MultiModeState scalar(cplx value = 1.0) { return MultiModeState({}, {}, {value}); }

  static MultiModeState single(std::string label, const FockVector& v) {
    const auto a = v.amplitudes();
    return MultiModeState({std::move(label)}, {v.cutoff()}, std::vector<cplx>(a.begin(), a.end()));
  }

  // Basis state |n_0, n_1, ...>.
  static MultiModeState basis(std::vector<std::string> labels, std::vector<std::size_t> cutoffs,
                              const std::vector<std::size_t>& occupations) {
    std::size_t dim = 1;
    for (auto c : cutoffs) dim *= c + 1;
    MultiModeState s(std::move(labels), std::move(cutoffs), std::vector<cplx>(dim));
    s.amps_[s.flat_index(occupations)] = 1.0;
    return s;
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::size_t>& cutoffs() const { return cutoffs_; }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::size_t mode_count() const { return labels_.size(); }
  std::size_t dimension() const { return amps_.size(); }
  std::size_t stride(std::size_t mode_index) const { return strides_.at(mode_index); }

  bool has_mode(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw DomainError("unknown mode '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::size_t cutoff_of(const std::string& label) const { return cutoffs_[index_of(label)]; }

  std::size_t flat_index(std::span<const std::size_t> occ) const {
    if (occ.size() != labels_.size()) throw DomainError("occupation list has wrong length");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (occ[i] > cutoffs_[i]) throw DomainError("occupation exceeds cutoff of mode '" + labels_[i] + "'");
      idx += occ[i] * strides_[i];
    }
    return idx;
  }
  std::size_t flat_index(std::initializer_list<std::size_t> occ) const {
    return flat_index(std::span<const std::size_t>(occ.begin(), occ.size()));
  }

  std::vector<std::size_t> occupations(std::size_t flat) const {
    std::vector<std::size_t> occ(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      occ[i] = flat / strides_[i];
      flat %= strides_[i];
    }
    return occ;
  }

  // Photon number of mode `mode_index` at flat index `flat`.
  std::size_t occupation(std::size_t flat, std::size_t mode_index) const {
    return (flat / strides_[mode_index]) % (cutoffs_[mode_index] + 1);
  }

  cplx amplitude(std::initializer_list<std::size_t> occ) const { return amps_[flat_index(occ)]; }
  cplx operator[](std::size_t flat) const { return amps_.at(flat); }

  double norm2() const { return detail::norm2_of(amps_); }
  double norm() const { return std::sqrt(norm2()); }

  // Same shape as this state, new amplitudes.
  MultiModeState with_amplitudes(std::vector<cplx> amps) const {
    return MultiModeState(labels_, cutoffs_, std::move(amps));
  }

  bool same_shape(const MultiModeState& o) const {
    return labels_ == o.labels_ && cutoffs_ == o.cutoffs_;
  }

  FockVector to_fock() const {
    if (labels_.size() != 1) throw DomainError("to_fock requires a single-mode state");
    return FockVector(amps_);
  }

  MultiModeState& operator+=(const MultiModeState& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += o.amps_[i];
    return *this;
  }
  MultiModeState& operator-=(const MultiModeState& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] -= o.amps_[i];
    return *this;
  }
  MultiModeState& operator*=(cplx c) {
    for (auto& a : amps_) a *= c;
    return *this;
  }
  friend MultiModeState operator+(MultiModeState a, const MultiModeState& b) { return a += b; }
  friend MultiModeState operator-(MultiModeState a, const MultiModeState& b) { return a -= b; }
  friend MultiModeState operator*(cplx c, MultiModeState a) { return a *= c; }

  void require_same_shape(const MultiModeState& o) const {
    if (!same_shape(o)) throw IncompatibleError("states differ in mode labels, order or cutoffs");
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> cutoffs_;
  std::vector<std::size_t> strides_;
  std::vector<cplx> amps_;
};

// Mode order of the result is a's labels followed by b's.
inline MultiModeState tensor_product(const MultiModeState& a, const MultiModeState& b) {
  auto labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  auto cutoffs = a.cutoffs();
  cutoffs.insert(cutoffs.end(), b.cutoffs().begin(), b.cutoffs().end());
  for (const auto& l : b.labels()) {
    if (a.has_mode(l)) throw LabelError("mode '" + l + "' appears in both factors");
  }
  const auto aa = a.amplitudes();
  const auto ba = b.amplitudes();
  std::vector<cplx> amps;
  amps.reserve(aa.size() * ba.size());
  for (const auto& x : aa) {
    for (const auto& y : ba) amps.push_back(x * y);
  }
  return MultiModeState(std::move(labels), std::move(cutoffs), std::move(amps));
}

// <a|b>, conjugate-linear in the first argument.
inline cplx inner_product(const MultiModeState& a, const MultiModeState& b) {
  a.require_same_shape(b);
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  cplx s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline cplx inner_product(const FockVector& a, const FockVector& b) {
  if (a.cutoff() != b.cutoff()) throw IncompatibleError("FockVector cutoff mismatch");
  cplx s = 0.0;
  for (std::size_t n = 0; n <= a.cutoff(); ++n) s += std::conj(a[n]) * b[n];
  return s;
}

struct Normalized {
  MultiModeState state;
  double norm;  // norm before normalization
};

inline Normalized normalize(const MultiModeState& s, double zero_threshold = kZeroThreshold) {
  const double n = s.norm();
  if (!(n > zero_threshold)) throw ZeroStateError("cannot normalize a state with norm " + std::to_string(n));
  MultiModeState out = s;
  out *= 1.0 / n;
  return {std::move(out), n};
}

inline FockVector normalized(const FockVector& v, double zero_threshold = kZeroThreshold) {
  const double n = v.norm();
  if (!(n > zero_threshold)) throw ZeroStateError("cannot normalize a state with norm " + std::to_string(n));
  return (1.0 / n) * v;
}

struct Projection {
  MultiModeState state;  // remaining modes, unnormalized
  double probability;    // squared norm of the projected slice
};

// Projects `mode` onto |n> and removes it from the state.
inline Projection project_mode(const MultiModeState& s, const std::string& mode, std::size_t n) {
  const std::size_t k = s.index_of(mode);
  if (n > s.cutoffs()[k]) {
    throw DomainError("photon number " + std::to_string(n) + " exceeds cutoff of mode '" + mode + "'");
  }
  auto labels = s.labels();
  auto cutoffs = s.cutoffs();
  labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(k));
  cutoffs.erase(cutoffs.begin() + static_cast<std::ptrdiff_t>(k));

  // Split the flat index into outer (modes before k), mode k, inner (after k).
  const std::size_t inner = s.stride(k);
  const std::size_t dim_k = s.cutoffs()[k] + 1;
  const std::size_t outer = s.dimension() / (inner * dim_k);
  const auto amps = s.amplitudes();
  std::vector<cplx> out(outer * inner);
  double p = 0.0;
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * dim_k * inner + n * inner;
    for (std::size_t i = 0; i < inner; ++i) {
      out[o * inner + i] = amps[base + i];
      p += std::norm(amps[base + i]);
    }
  }
  return {MultiModeState(std::move(labels), std::move(cutoffs), std::move(out)), p};
}

// Same state with modes listed in `order` (a permutation of s.labels()).
inline MultiModeState reorder_modes(const MultiModeState& s, const std::vector<std::string>& order) {
  if (order.size() != s.mode_count()) throw DomainError("reorder needs every mode exactly once");
  std::vector<std::size_t> src(order.size());
  std::vector<std::size_t> cutoffs(order.size());
  std::vector<bool> used(order.size(), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    src[i] = s.index_of(order[i]);
    if (used[src[i]]) throw DomainError("mode '" + order[i] + "' listed twice");
    used[src[i]] = true;
    cutoffs[i] = s.cutoffs()[src[i]];
  }
  MultiModeState out(order, cutoffs, std::vector<cplx>(s.dimension()));
  std::vector<cplx> amps(s.dimension());
  for (std::size_t f = 0; f < s.dimension(); ++f) {
    std::size_t g = 0;
    for (std::size_t i = 0; i < order.size(); ++i) g += s.occupation(f, src[i]) * out.stride(i);
    amps[g] = s[f];
  }
  return out.with_amplitudes(std::move(amps));
}

struct SchmidtDecomposition {
  std::vector<double> coefficients;  // nonincreasing
  std::vector<MultiModeState> left_vectors;
  std::vector<MultiModeState> right_vectors;

  std::size_t rank(double tol = 1e-10) const {
    return static_cast<std::size_t>(
        std::count_if(coefficients.begin(), coefficients.end(), [tol](double c) { return c > tol; }));
  }
};

// Splits `s` into left_modes | remaining modes. Both sides keep the relative
// mode order of `s`.
inline SchmidtDecomposition schmidt_decompose(const MultiModeState& s,
                                              const std::vector<std::string>& left_modes) {
  if (left_modes.empty() || left_modes.size() >= s.mode_count()) {
    throw DomainError("left partition must be a nonempty proper subset of the modes");
  }
  std::vector<bool> is_left(s.mode_count(), false);
  for (const auto& l : left_modes) {
    const auto k = s.index_of(l);
    if (is_left[k]) throw DomainError("mode '" + l + "' listed twice in partition");
    is_left[k] = true;
  }
  std::vector<std::string> llab, rlab;
  std::vector<std::size_t> lcut, rcut, lmodes, rmodes;
  for (std::size_t k = 0; k < s.mode_count(); ++k) {
    (is_left[k] ? llab : rlab).push_back(s.labels()[k]);
    (is_left[k] ? lcut : rcut).push_back(s.cutoffs()[k]);
    (is_left[k] ? lmodes : rmodes).push_back(k);
  }
  auto side_index = [&](std::size_t flat, const std::vector<std::size_t>& modes) {
    std::size_t idx = 0;
    for (auto k : modes) idx = idx * (s.cutoffs()[k] + 1) + s.occupation(flat, k);
    return idx;
  };
  std::size_t ldim = 1, rdim = 1;
  for (auto c : lcut) ldim *= c + 1;
  for (auto c : rcut) rdim *= c + 1;

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(ldim), static_cast<Eigen::Index>(rdim));
  const auto amps = s.amplitudes();
  for (std::size_t f = 0; f < amps.size(); ++f) {
    m(static_cast<Eigen::Index>(side_index(f, lmodes)), static_cast<Eigen::Index>(side_index(f, rmodes))) = amps[f];
  }

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Eigen::MatrixXcd& u = svd.matrixU();
  const Eigen::MatrixXcd& v = svd.matrixV();

  SchmidtDecomposition out;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    out.coefficients.push_back(sv(k));
    std::vector<cplx> lv(u.rows()), rv(v.rows());
    for (Eigen::Index i = 0; i < u.rows(); ++i) lv[i] = u(i, k);
    // m = U S V^H, so the right factor is conj(V).
    for (Eigen::Index j = 0; j < v.rows(); ++j) rv[j] = std::conj(v(j, k));
    out.left_vectors.emplace_back(llab, lcut, std::move(lv));
    out.right_vectors.emplace_back(rlab, rcut, std::move(rv));
  }
  return out;
}

}  // namespace qoptics
