#pragma once

// Reference computations used by the self-check and the test suites.
//
// Nothing here calls into the state factories, element implementations or
// protocols: amplitudes come from closed forms evaluated with lgamma, the
// beam splitter from exponentiating its generator, and protocol outputs from
// explicit enumeration over basis tuples.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace qoptics::oracle {

using cplx = std::complex<double>;
using Amplitudes = std::vector<cplx>;

// <n|xi>, xi = r e^{i phi}, from the factorial closed form.
inline cplx squeezed_amplitude(double r, double phi, std::size_t n) {
  if (n % 2 == 1) return 0.0;
  const double m = static_cast<double>(n / 2);
  if (r == 0.0) return n == 0 ? 1.0 : 0.0;
  const double log_mag = 0.5 * std::lgamma(2.0 * m + 1.0) - m * std::log(2.0) - std::lgamma(m + 1.0) +
                         m * std::log(std::tanh(r)) - 0.5 * std::log(std::cosh(r));
  return std::polar(std::exp(log_mag), m * (phi + std::numbers::pi));
}

// <n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!).
inline cplx coherent_amplitude(cplx alpha, std::size_t n) {
  const double a = std::abs(alpha);
  const double k = static_cast<double>(n);
  if (a == 0.0) return n == 0 ? 1.0 : 0.0;
  const double log_mag = -0.5 * a * a + k * std::log(a) - 0.5 * std::lgamma(k + 1.0);
  return std::polar(std::exp(log_mag), k * std::arg(alpha));
}

inline Amplitudes squeezed_amplitudes(double r, double phi, std::size_t cutoff) {
  Amplitudes v(cutoff + 1);
  for (std::size_t n = 0; n <= cutoff; ++n) v[n] = squeezed_amplitude(r, phi, n);
  return v;
}

inline Amplitudes coherent_amplitudes(cplx alpha, std::size_t cutoff) {
  Amplitudes v(cutoff + 1);
  for (std::size_t n = 0; n <= cutoff; ++n) v[n] = coherent_amplitude(alpha, n);
  return v;
}

inline cplx dot(const Amplitudes& x, const Amplitudes& y) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline double norm2(const Amplitudes& x) { return std::real(dot(x, x)); }

// <xi|-xi> summed to `terms` photons.
inline cplx squeezed_overlap_with_negative(double r, double phi, std::size_t terms = 400) {
  return dot(squeezed_amplitudes(r, phi, terms), squeezed_amplitudes(r, phi + std::numbers::pi, terms));
}

inline Amplitudes combine(const Amplitudes& x, cplx cx, const Amplitudes& y, cplx cy) {
  Amplitudes z(std::max(x.size(), y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) z[i] += cx * x[i];
  for (std::size_t i = 0; i < y.size(); ++i) z[i] += cy * y[i];
  return z;
}

inline Amplitudes unit(const Amplitudes& x) {
  const double n = std::sqrt(norm2(x));
  Amplitudes z = x;
  for (auto& v : z) v /= n;
  return z;
}

// |<x|y>|^2 / (|x|^2 |y|^2).
inline double fidelity(const Amplitudes& x, const Amplitudes& y) {
  return std::norm(dot(x, y)) / (norm2(x) * norm2(y));
}

// exp(A) by scaling and squaring with a Taylor core.
inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXcd x = a * scale;
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// Two-mode 50:50 beam splitter on basis |m,k> (index m*(cutoff+1)+k),
// exp(i s pi/4 H) with <m-1,k+1|H|m,k> = sqrt(m(k+1)) plus its conjugate.
// s = +1 reproduces |1,0> -> (|1,0> + i|0,1>)/sqrt(2). Exact on blocks whose
// total photon number does not exceed the cutoff.
inline Eigen::MatrixXcd beam_splitter_matrix(std::size_t cutoff, double s = 1.0) {
  const auto d = static_cast<Eigen::Index>(cutoff + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (Eigen::Index m = 1; m < d; ++m) {
    for (Eigen::Index k = 0; k + 1 < d; ++k) {
      const double v = std::sqrt(static_cast<double>(m * (k + 1)));
      h((m - 1) * d + (k + 1), m * d + k) = v;
      h(m * d + k, (m - 1) * d + (k + 1)) = v;
    }
  }
  return expm(cplx(0.0, s * std::numbers::pi / 4.0) * h);
}

// Conditional (unnormalized) mode-a amplitudes of the superposition protocol
// for detection (b,c) = (1,0) and (0,1), by enumerating |n_a, n_b, n_c>
// through every stage. `source` holds the input amplitudes of mode a.
struct TwoBranches {
  Amplitudes db;
  Amplitudes dc;
};

inline TwoBranches superposition_by_enumeration(const Amplitudes& source, double tau, double theta) {
  const Eigen::MatrixXcd bs = beam_splitter_matrix(1);
  const std::size_t na_max = source.size();
  // state[na][j], j = nb*2 + nc
  std::vector<Eigen::Vector4cd> st(na_max);
  Eigen::Vector4cd photon = Eigen::Vector4cd::Zero();
  photon(2) = 1.0;  // |1>_b |0>_c
  const Eigen::Vector4cd after_bs1 = bs * photon;
  for (std::size_t na = 0; na < na_max; ++na) {
    Eigen::Vector4cd v = source[na] * after_bs1;
    for (int j = 0; j < 4; ++j) {
      const int nb = j / 2, nc = j % 2;
      v(j) *= std::polar(1.0, -static_cast<double>(na) * nb * tau) * std::polar(1.0, nc * theta);
    }
    st[na] = bs * v;
  }
  TwoBranches out{Amplitudes(na_max), Amplitudes(na_max)};
  for (std::size_t na = 0; na < na_max; ++na) {
    out.db[na] = st[na](2);
    out.dc[na] = st[na](1);
  }
  return out;
}

// Entanglement protocol by enumeration over |n_a, n_b, n_c, n_a2>. Branch
// amplitudes are indexed [na * size(source2) + na2].
inline TwoBranches entanglement_by_enumeration(const Amplitudes& source, const Amplitudes& source2,
                                               double tau, double tau2, double theta) {
  const Eigen::MatrixXcd bs = beam_splitter_matrix(1);
  Eigen::Vector4cd photon = Eigen::Vector4cd::Zero();
  photon(2) = 1.0;
  const Eigen::Vector4cd after_bs1 = bs * photon;
  const std::size_t d1 = source.size(), d2 = source2.size();
  TwoBranches out{Amplitudes(d1 * d2), Amplitudes(d1 * d2)};
  for (std::size_t na = 0; na < d1; ++na) {
    for (std::size_t n2 = 0; n2 < d2; ++n2) {
      Eigen::Vector4cd v = source[na] * source2[n2] * after_bs1;
      for (int j = 0; j < 4; ++j) {
        const int nb = j / 2, nc = j % 2;
        const double phase = -static_cast<double>(na) * nb * tau - static_cast<double>(n2) * nb * tau2 + nc * theta;
        v(j) *= std::polar(1.0, phase);
      }
      const Eigen::Vector4cd w = bs * v;
      out.db[na * d2 + n2] = w(2);
      out.dc[na * d2 + n2] = w(1);
    }
  }
  return out;
}

// Entropy (bits) of c0 |u0>|v0> + c1 |u1>|v1> from the 2x2 Gram matrices.
// The nonzero spectrum of the reduced state on the u side equals the
// spectrum of R[j][l] = sum_k c_j conj(c_k) <v_k|v_j> <u_k|u_l>.
inline double two_term_entropy(const Amplitudes& u0, const Amplitudes& u1, const Amplitudes& v0,
                               const Amplitudes& v1, cplx c0, cplx c1) {
  const Amplitudes* u[2] = {&u0, &u1};
  const Amplitudes* v[2] = {&v0, &v1};
  const cplx c[2] = {c0, c1};
  cplx r[2][2];
  for (int j = 0; j < 2; ++j) {
    for (int l = 0; l < 2; ++l) {
      r[j][l] = 0.0;
      for (int k = 0; k < 2; ++k) r[j][l] += c[j] * std::conj(c[k]) * dot(*v[k], *v[j]) * dot(*u[k], *u[l]);
    }
  }
  const cplx tr = r[0][0] + r[1][1];
  const cplx det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  double h = 0.0;
  for (const cplx lam : {(tr + disc) / 2.0, (tr - disc) / 2.0}) {
    const double p = lam.real() / tr.real();
    if (p > 1e-300) h -= p * std::log2(p);
  }
  return h;
}

}  // namespace qoptics::oracle
