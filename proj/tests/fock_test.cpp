#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "qoptics/fock.hpp"
#include "qoptics/oracles.hpp"
#include "qoptics/states.hpp"

namespace qoptics {
namespace {

MultiModeState random_state(std::mt19937_64& rng, std::vector<std::string> labels, std::vector<std::size_t> cutoffs,
                            double norm = 1.0) {
  std::size_t dim = 1;
  for (auto c : cutoffs) dim *= c + 1;
  std::normal_distribution<double> g;
  std::vector<cplx> v(dim);
  for (auto& x : v) x = {g(rng), g(rng)};
  auto s = normalize(MultiModeState(std::move(labels), std::move(cutoffs), std::move(v))).state;
  s *= norm;
  return s;
}

TEST(MultiModeState, RowMajorFirstModeSlowest) {
  const MultiModeState s({"x", "y", "z"}, {1, 2, 3}, std::vector<cplx>(2 * 3 * 4));
  EXPECT_EQ(s.flat_index({0, 0, 1}), 1u);
  EXPECT_EQ(s.flat_index({0, 1, 0}), 4u);
  EXPECT_EQ(s.flat_index({1, 0, 0}), 12u);
  for (std::size_t f = 0; f < s.dimension(); ++f) {
    const auto occ = s.occupations(f);
    EXPECT_EQ(s.flat_index(occ), f);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(s.occupation(f, k), occ[k]);
  }
}

TEST(MultiModeState, RejectsBadShapes) {
  EXPECT_THROW(MultiModeState({"a", "a"}, {1, 1}, std::vector<cplx>(4)), LabelError);
  EXPECT_THROW(MultiModeState({"a"}, {1}, std::vector<cplx>(3)), IncompatibleError);
  EXPECT_THROW(MultiModeState({"a"}, {1}, {cplx(NAN), 0.0}), DomainError);
  EXPECT_THROW(MultiModeState({""}, {0}, {1.0}), LabelError);
}

TEST(TensorProduct, BasisStates) {
  const auto s = tensor_product(MultiModeState::single("a", fock(0, 1)), MultiModeState::single("b", fock(1, 1)));
  EXPECT_EQ(s.labels(), (std::vector<std::string>{"a", "b"}));
  for (std::size_t f = 0; f < s.dimension(); ++f) {
    EXPECT_EQ(s[f], f == s.flat_index({0, 1}) ? cplx(1.0) : cplx(0.0));
  }
}

TEST(TensorProduct, SqueezedWithSinglePhotonPair) {
  const auto xi = MultiModeState::single("a", squeezed_vacuum({0.5, 0.0}, 30));
  const double h = std::sqrt(0.5);
  const MultiModeState bc({"b", "c"}, {1, 1}, {0.0, cplx(0.0, h), h, 0.0});
  const auto s = tensor_product(xi, bc);
  EXPECT_EQ(s.labels(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_NEAR(s.norm2(), 1.0, 1e-10);
  EXPECT_NEAR(std::abs(s.amplitude({2, 1, 0}) - xi[2] * h), 0.0, 1e-15);
}

TEST(TensorProduct, NormsMultiply) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto u = random_state(rng, {"a", "b"}, {2, 3}, 0.9);
    const auto v = random_state(rng, {"c"}, {4}, 0.4);
    EXPECT_NEAR(tensor_product(u, v).norm(), u.norm() * v.norm(), 1e-12);
  }
}

TEST(TensorProduct, DuplicateLabel) {
  EXPECT_THROW(tensor_product(MultiModeState::single("a", vacuum(1)), MultiModeState::single("a", vacuum(1))),
               LabelError);
}

TEST(InnerProduct, VacuumAndSqueezedOverlaps) {
  const auto v = MultiModeState::single("a", vacuum(0));
  EXPECT_EQ(inner_product(v, v), cplx(1.0));

  // Frozen from a direct sum of closed-form amplitudes; closed form
  // 1/(cosh r sqrt(1 + tanh^2 r)) agrees to 1e-15.
  const double s_oracle = 0.8050181821945923;
  const double r = 0.5;
  EXPECT_NEAR(1.0 / (std::cosh(r) * std::sqrt(1.0 + std::tanh(r) * std::tanh(r))), s_oracle, 1e-15);
  EXPECT_NEAR(std::real(oracle::squeezed_overlap_with_negative(r, 0.0)), s_oracle, 1e-14);

  const auto xi = MultiModeState::single("a", squeezed_vacuum({r, 0.0}, 40));
  const auto mxi = MultiModeState::single("a", squeezed_vacuum(SqueezeParam{r, 0.0}.negated(), 40));
  const cplx s = inner_product(xi, mxi);
  EXPECT_NEAR(s.real(), s_oracle, 1e-4);
  EXPECT_NEAR(s.real(), s_oracle, 1e-12);
  EXPECT_NEAR(s.imag(), 0.0, 1e-15);

  const auto two = MultiModeState::single("a", fock(2, 40));
  EXPECT_NEAR(inner_product(two, xi).real(), -0.3077191764583704, 1e-12);
}

TEST(InnerProduct, ShapeMismatch) {
  EXPECT_THROW(inner_product(MultiModeState::single("a", vacuum(1)), MultiModeState::single("b", vacuum(1))),
               IncompatibleError);
  EXPECT_THROW(inner_product(MultiModeState::single("a", vacuum(1)), MultiModeState::single("a", vacuum(2))),
               IncompatibleError);
}

TEST(InnerProduct, ConjugateSymmetry) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_state(rng, {"a", "b"}, {3, 2});
    const auto b = random_state(rng, {"a", "b"}, {3, 2});
    EXPECT_NEAR(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))), 0.0, 1e-14);
    EXPECT_NEAR(inner_product(a, a).imag(), 0.0, 1e-15);
    EXPECT_GE(inner_product(a, a).real(), 0.0);
  }
}

TEST(Normalize, CatAtZeroSqueezingIsVacuum) {
  const SqueezeParam p{0.0, 0.0};
  auto sum = MultiModeState::single("a", squeezed_vacuum(p, 4));
  sum += MultiModeState::single("a", squeezed_vacuum(p.negated(), 4));
  const auto [state, pre] = normalize(sum);
  EXPECT_DOUBLE_EQ(pre, 2.0);
  EXPECT_EQ(state.amplitude({0}), cplx(1.0));
}

TEST(Normalize, ZeroStateError) {
  EXPECT_THROW(normalize(MultiModeState({"a"}, {2}, std::vector<cplx>(3))), ZeroStateError);
  EXPECT_THROW(normalize(MultiModeState({"a"}, {0}, {1e-13})), ZeroStateError);
}

TEST(Normalize, OddSqueezedCatPreNorm) {
  const SqueezeParam p{0.5, 0.0};
  auto diff = MultiModeState::single("a", squeezed_vacuum(p, 40));
  diff -= MultiModeState::single("a", squeezed_vacuum(p.negated(), 40));
  const auto [state, pre] = normalize(diff);
  EXPECT_NEAR(state.norm(), 1.0, 1e-15);
  EXPECT_NEAR(pre * pre, 2.0 - 2.0 * 0.8050181821945923, 1e-4);
  EXPECT_NEAR(pre * pre, 0.3899636356108154, 1e-10);
}

TEST(ProjectMode, SinglePhotonAfterSplitting) {
  const double h = std::sqrt(0.5);
  const MultiModeState bc({"b", "c"}, {1, 1}, {0.0, cplx(0.0, h), h, 0.0});
  const auto [rest, p] = project_mode(bc, "b", 1);
  EXPECT_NEAR(p, 0.5, 1e-15);
  EXPECT_EQ(rest.labels(), std::vector<std::string>{"c"});
  EXPECT_NEAR(std::abs(rest.amplitude({0}) - h), 0.0, 1e-15);
  EXPECT_EQ(rest.amplitude({1}), cplx(0.0));
}

TEST(ProjectMode, ZeroProbability) {
  const auto s = MultiModeState::basis({"a", "b"}, {1, 1}, {0, 0});
  EXPECT_EQ(project_mode(s, "b", 1).probability, 0.0);
}

TEST(ProjectMode, Errors) {
  const auto s = MultiModeState::basis({"a", "b"}, {1, 1}, {0, 0});
  EXPECT_THROW(project_mode(s, "z", 0), DomainError);
  EXPECT_THROW(project_mode(s, "a", 2), DomainError);
}

TEST(ProjectMode, SequentialMatchesEnumeration) {
  std::mt19937_64 rng(3);
  const auto s = random_state(rng, {"a", "b", "c"}, {5, 1, 1}, 0.8);
  const auto r1 = project_mode(s, "b", 1);
  const auto r2 = project_mode(r1.state, "c", 0);
  for (std::size_t na = 0; na <= 5; ++na) {
    EXPECT_EQ(r2.state.amplitude({na}), s.amplitude({na, 1, 0}));
  }
  double joint = 0.0;
  for (std::size_t na = 0; na <= 5; ++na) joint += std::norm(s.amplitude({na, 1, 0}));
  EXPECT_NEAR(r2.probability, joint, 1e-12);
}

TEST(ProjectMode, CompletenessOnRandomStates) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    const auto s = random_state(rng, {"a", "b", "c"}, {3, 2, 4}, 0.3 + 0.02 * i);
    for (const auto& m : s.labels()) {
      double total = 0.0;
      for (std::size_t n = 0; n <= s.cutoff_of(m); ++n) total += project_mode(s, m, n).probability;
      EXPECT_NEAR(total, s.norm2(), 1e-10);
    }
  }
}

TEST(ProjectMode, LastModeLeavesScalar) {
  const auto s = MultiModeState::single("a", fock(2, 3));
  const auto r = project_mode(s, "a", 2);
  EXPECT_EQ(r.state.mode_count(), 0u);
  EXPECT_EQ(r.state.dimension(), 1u);
  EXPECT_EQ(r.probability, 1.0);
}

MultiModeState reconstruct(const SchmidtDecomposition& sd) {
  MultiModeState acc = sd.coefficients[0] * tensor_product(sd.left_vectors[0], sd.right_vectors[0]);
  for (std::size_t k = 1; k < sd.coefficients.size(); ++k) {
    acc += sd.coefficients[k] * tensor_product(sd.left_vectors[k], sd.right_vectors[k]);
  }
  return acc;
}

TEST(Schmidt, ProductState) {
  std::mt19937_64 rng(5);
  const auto u = random_state(rng, {"a"}, {3}, 0.6);
  const auto v = random_state(rng, {"b"}, {4}, 0.5);
  const auto sd = schmidt_decompose(tensor_product(u, v), {"a"});
  EXPECT_NEAR(sd.coefficients[0], 0.3, 1e-12);
  EXPECT_EQ(sd.rank(), 1u);
}

TEST(Schmidt, BellPair) {
  const double h = std::sqrt(0.5);
  const MultiModeState s({"x", "y"}, {1, 1}, {0.0, h, h, 0.0});
  const auto sd = schmidt_decompose(s, {"x"});
  ASSERT_EQ(sd.rank(), 2u);
  EXPECT_NEAR(sd.coefficients[0], h, 1e-12);
  EXPECT_NEAR(sd.coefficients[1], h, 1e-12);
}

TEST(Schmidt, InvalidPartitions) {
  const auto s = MultiModeState::basis({"a", "b"}, {1, 1}, {0, 0});
  EXPECT_THROW(schmidt_decompose(s, {}), DomainError);
  EXPECT_THROW(schmidt_decompose(s, {"a", "b"}), DomainError);
  EXPECT_THROW(schmidt_decompose(s, {"q"}), DomainError);
  EXPECT_THROW(schmidt_decompose(s, {"a", "a"}), DomainError);
}

TEST(Schmidt, ReconstructionAndOrthonormality) {
  std::mt19937_64 rng(6);
  struct Case {
    std::vector<std::string> labels;
    std::vector<std::size_t> cutoffs;
    std::vector<std::string> left;
  };
  const std::vector<Case> cases = {
      {{"a", "b"}, {3, 5}, {"a"}},
      {{"a", "b", "c"}, {2, 3, 1}, {"b"}},             // non-contiguous split
      {{"a", "b", "c"}, {4, 3, 2}, {"a", "c"}},
      {{"a", "b"}, {99, 99}, {"a"}},                   // dimension 10^4
  };
  for (const auto& c : cases) {
    const auto s = random_state(rng, c.labels, c.cutoffs, 0.9);
    const auto sd = schmidt_decompose(s, c.left);
    double sum2 = 0.0;
    for (std::size_t k = 0; k < sd.coefficients.size(); ++k) {
      sum2 += sd.coefficients[k] * sd.coefficients[k];
      if (k) {
        EXPECT_LE(sd.coefficients[k], sd.coefficients[k - 1]);
      }
    }
    EXPECT_NEAR(sum2, s.norm2(), 1e-10);
    const auto rec = reconstruct(sd);
    const auto back = reorder_modes(rec, s.labels());
    double err = 0.0;
    for (std::size_t f = 0; f < s.dimension(); ++f) err = std::max(err, std::abs(back[f] - s[f]));
    EXPECT_LE(err, 1e-9);
    const std::size_t n = std::min<std::size_t>(sd.coefficients.size(), 8);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = i == j ? 1.0 : 0.0;
        EXPECT_NEAR(std::abs(inner_product(sd.left_vectors[i], sd.left_vectors[j]) - d), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(inner_product(sd.right_vectors[i], sd.right_vectors[j]) - d), 0.0, 1e-10);
      }
    }
  }
}

TEST(ReorderModes, RoundTrip) {
  std::mt19937_64 rng(7);
  const auto s = random_state(rng, {"a", "b", "c"}, {1, 2, 3});
  const auto r = reorder_modes(s, {"c", "a", "b"});
  EXPECT_EQ(r.amplitude({3, 1, 2}), s.amplitude({1, 2, 3}));
  const auto back = reorder_modes(r, s.labels());
  for (std::size_t f = 0; f < s.dimension(); ++f) EXPECT_EQ(back[f], s[f]);
}

}  // namespace
}  // namespace qoptics
