// Copyright 2026 The HMERA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hmera/superop.hpp"
#include "test_util.hpp"

namespace hmera {
namespace {

using hmera_test::cplx;

constexpr double kSqrt5 = 2.2360679774997896;

// The stationary per-layer transition frequencies in closed form over
// Q(sqrt 5), derived by hand from the conditional table: with
// x = p(1->1) = -1 + (3/5) sqrt5 and y = p(3->3) = -6 + (14/5) sqrt5,
// the off-diagonal frequencies follow from the conditional ratios.
std::map<std::string, Q5> closed_form_frequencies() {
  std::map<std::string, Q5> f;
  f["p(1->1)"] = Q5(Rat(-1), Rat(3, 5));
  f["p(1->2)"] = Q5(Rat(1), Rat(-2, 5));
  f["p(2->1)"] = Q5(Rat(1), Rat(-2, 5));
  f["p(2->2)"] = Q5(Rat(-4), Rat(9, 5));
  f["p(2->3)"] = Q5(Rat(5), Rat(-11, 5));
  f["p(3->2)"] = Q5(Rat(5), Rat(-11, 5));
  f["p(3->3)"] = Q5(Rat(-6), Rat(14, 5));
  return f;
}

// Dense two-qubit Pauli for one merged-copy qudit index (high letter on the
// first copy), built from explicit 2x2 matrices rather than the library's
// Pauli machinery.
Eigen::Matrix4cd qudit_dense(int a) {
  return hmera_test::kron(hmera_test::sigma(a / 4), hmera_test::sigma(a % 4));
}

TEST(TransitionTable, ConditionalValuesAreExactLegCountRatios) {
  const TransitionTable t = conditional_probabilities();
  ASSERT_EQ(t.conditional.size(), 10u);

  const Q5 golden_small = Q5::sqrt5() - Q5::integer(2);  // sqrt5 - 2
  const Q5 golden_large = Q5::integer(3) - Q5::sqrt5();  // 3 - sqrt5
  EXPECT_TRUE(t.conditional.at("P(1->2|1)") == golden_small);
  EXPECT_TRUE(t.conditional.at("P(1->1|1)") == golden_large);
  EXPECT_TRUE(t.conditional.at("P(2->2|1->2)") == golden_small);
  EXPECT_TRUE(t.conditional.at("P(2->3|1->2)") == golden_large);
  EXPECT_TRUE(t.conditional.at("P(3->2|3)") == golden_small);
  EXPECT_TRUE(t.conditional.at("P(3->3|3)") == golden_large);
  EXPECT_TRUE(t.conditional.at("P(2->1|2->2)") == Q5::integer(1));
  EXPECT_TRUE(t.conditional.at("P(2->1|3->2)") == Q5::integer(1));
  EXPECT_TRUE(t.conditional.at("P0(1->2)") == Q5(Rat(3), Rat(-6, 5)));
  EXPECT_TRUE(t.conditional.at("P0(1->1)") == Q5(Rat(-2), Rat(6, 5)));

  // Each branch pair is complementary, exactly.
  EXPECT_TRUE(golden_small + golden_large == Q5::integer(1));
  EXPECT_TRUE(t.conditional.at("P0(1->2)") + t.conditional.at("P0(1->1)") ==
              Q5::integer(1));
  EXPECT_NEAR(golden_small.value(), kSqrt5 - 2.0, 1e-15);
  EXPECT_NEAR(t.conditional.at("P0(1->2)").value(), 3.0 - 6.0 / kSqrt5, 1e-15);
}

TEST(TransitionTable, ConditionalValuesAreDeepTilingLimits) {
  // The closed forms are n -> infinity limits of tile-count ratios; at
  // twelve layers the ratios agree to a few parts in 1e4.
  const TilingGraph g = build_tiling(5, 4, 12);
  const std::vector<LayerCount> counts = layer_counts(g);
  const auto f = [&](int n) {
    return static_cast<double>(counts[static_cast<std::size_t>(n)].edge_polygons);
  };
  const auto v = [&](int n) {
    return static_cast<double>(
        counts[static_cast<std::size_t>(n)].vertex_polygons);
  };
  const TransitionTable t = conditional_probabilities();

  // Fresh insertions land on the 3 v(n) vertex-polygon legs out of
  // 4 f(n) + 3 v(n) boundary legs.
  EXPECT_NEAR(3.0 * v(12) / (4.0 * f(12) + 3.0 * v(12)),
              t.conditional.at("P0(1->2)").value(), 1e-3);
  // A carried weight-1 operator expands through v(n) of 2 f(n) + v(n) legs.
  EXPECT_NEAR(v(12) / (2.0 * f(12) + v(12)),
              t.conditional.at("P(1->2|1)").value(), 1e-3);
  // A just-expanded pair shrinks along f(n-2) of the v(n) vertex polygons.
  EXPECT_NEAR(f(10) / v(12), t.conditional.at("P(2->2|1->2)").value(), 1e-3);
  EXPECT_NEAR(2.0 * v(11) / v(12), t.conditional.at("P(2->3|1->2)").value(),
              1e-3);
}

TEST(TransitionTable, StationaryFrequenciesSolveTheBalanceSystemExactly) {
  const TransitionTable t = unconditional_probabilities();
  ASSERT_EQ(t.unconditional.size(), 7u);

  const auto golden = closed_form_frequencies();
  for (const auto& [key, q] : golden) {
    ASSERT_TRUE(t.unconditional.count(key)) << key;
    EXPECT_TRUE(t.unconditional.at(key) == q) << key;
    EXPECT_DOUBLE_EQ(t.unconditional_value.at(key), q.value()) << key;
  }

  Q5 sum = Q5::integer(0);
  for (const auto& [key, q] : t.unconditional) sum = sum + q;
  EXPECT_TRUE(sum == Q5::integer(1));

  // Detailed balance of the weight flow: expansions match contractions.
  EXPECT_TRUE(t.unconditional.at("p(1->2)") == t.unconditional.at("p(2->1)"));
  EXPECT_TRUE(t.unconditional.at("p(2->3)") == t.unconditional.at("p(3->2)"));

  EXPECT_NEAR(t.unconditional_value.at("p(1->1)"), 0.341640786499874, 1e-15);
  EXPECT_NEAR(t.unconditional_value.at("p(1->2)"), 0.105572809000084, 1e-15);
  EXPECT_NEAR(t.unconditional_value.at("p(2->2)"), 0.024922359499622, 1e-15);
  EXPECT_NEAR(t.unconditional_value.at("p(2->3)"), 0.080650449500462, 1e-15);
  EXPECT_NEAR(t.unconditional_value.at("p(3->3)"), 0.260990336999411, 1e-15);
}

TEST(TransitionSampling, MatchesPredictionsWithinThreeStandardErrors) {
  const TilingGraph g = build_tiling(5, 4, 12);
  const TransitionCounts counts = monte_carlo_transitions(g, 100000, 7);
  ASSERT_EQ(counts.samples, 100000);
  EXPECT_EQ(counts.tally_step, 8);

  std::int64_t total = 0;
  for (const auto& [key, c] : counts.counts) total += c;
  EXPECT_EQ(total, counts.samples);
  EXPECT_EQ(counts.counts.size(), 7u);

  const TransitionTable t = unconditional_probabilities();
  const auto freq = counts.frequencies();
  for (const auto& [key, p] : t.unconditional_value) {
    const std::string label = key.substr(2, key.size() - 3);  // "i->j"
    ASSERT_TRUE(freq.count(label)) << label;
    const double se =
        std::sqrt(p * (1.0 - p) / static_cast<double>(counts.samples));
    EXPECT_NEAR(freq.at(label), p, 3.0 * se) << label;
  }

  // The generator pipeline is fully specified, so one realization can be
  // pinned as a determinism canary.
  EXPECT_EQ(counts.counts.at("1->1"), 34096);

  // Work is split into fixed chunks with chunk-derived streams, so the
  // tally must not depend on the number of workers.
  const TransitionCounts parallel = monte_carlo_transitions(g, 100000, 7, 3);
  EXPECT_EQ(parallel.counts, counts.counts);
}

TEST(TransitionSampling, ValidatesArguments) {
  const TilingGraph g = build_tiling(5, 4, 2);
  EXPECT_THROW(monte_carlo_transitions(g, 0, 1, 1, 1), std::invalid_argument);
  EXPECT_THROW(monte_carlo_transitions(g, 10, 1, 0, 1), std::invalid_argument);
  EXPECT_THROW(monte_carlo_transitions(g, 10, 1, 1, 0), std::invalid_argument);
  EXPECT_THROW(monte_carlo_transitions(g, 10, 1, 1, 3), std::invalid_argument);
  EXPECT_NO_THROW(monte_carlo_transitions(g, 10, 1, 1, 2));
}

// Expanding Tr[B W^dag O W] as an expectation in the pure tensor state puts
// the transpose of the output element on the bra side; Pauli transposition
// only flips the sign of Y.
double transpose_sign(int pauli_index) {
  int ys = 0;
  for (int rest = pauli_index; rest > 0; rest /= 4) {
    if (rest % 4 == 2) ++ys;
  }
  return (ys % 2 == 0) ? 1.0 : -1.0;
}

TEST(VertexMap, ImagesMatchDirectCodeExpectations) {
  // Independent oracle: every matrix entry equals (up to the transposition
  // sign) the expectation of one five-qubit Pauli string in the encoded
  // state V|phi>, with the output letters on qubits 1,2 and the input
  // letters on the chosen pair.
  const Eigen::MatrixXcd enc = five_qubit_code().encoding_map();
  const char* letter = "IXYZ";
  for (const auto& [alpha, beta] :
       std::vector<std::pair<double, double>>{{0.6, 1.9}, {1.1, 4.0}}) {
    const Eigen::VectorXcd state = enc * bulk_logical_state(alpha, beta);
    for (int first : {3, 4}) {
      const SuperOperator s = perfect_superop(alpha, beta, {first, first + 1});
      double worst = 0.0;
      for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
          std::string p = "IIIII";
          p[0] = letter[j / 4];
          p[1] = letter[j % 4];
          p[static_cast<std::size_t>(first) - 1] = letter[i / 4];
          p[static_cast<std::size_t>(first)] = letter[i % 4];
          const cplx expected =
              transpose_sign(j) *
              state.dot(PauliOperator::from_string(p).apply(state));
          worst = std::max(worst, std::abs(s.matrix(j, i) - expected));
        }
      }
      EXPECT_LT(worst, 1e-12) << "pair " << first << ", alpha " << alpha;
    }
  }
}

TEST(VertexMap, EntriesAreLogicalExpectationValues) {
  const double alpha = M_PI / 3.0, beta = 0.7;
  const SuperOperator s = perfect_superop(alpha, beta);
  const std::vector<double> classes = {
      0.0, 1.0, std::abs(logical_x_expectation(alpha, beta)),
      std::abs(logical_y_expectation(alpha, beta)),
      std::abs(logical_z_expectation(alpha, beta))};
  double worst_imag = 0.0, worst_class = 0.0;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      worst_imag = std::max(worst_imag, std::abs(s.matrix(j, i).imag()));
      const double mag = std::abs(s.matrix(j, i));
      double best = 1.0;
      for (double c : classes) best = std::min(best, std::abs(mag - c));
      worst_class = std::max(worst_class, best);
    }
  }
  EXPECT_LT(worst_imag, 1e-12);
  EXPECT_LT(worst_class, 1e-12);
}

TEST(VertexMap, WeightOneInputsMapToSingleWeightTwoOutputs) {
  const double alpha = 0.6, beta = 1.9;
  const double xb = logical_x_expectation(alpha, beta);
  const double yb = logical_y_expectation(alpha, beta);
  const double zb = logical_z_expectation(alpha, beta);

  struct Row {
    int pair_first;  // input legs {pair_first, pair_first + 1}
    int in;          // input basis index (weight 1)
    int out;         // the only nonzero output index
    double coeff;    // its value
  };
  // The six weight-1 insertions per leg pair each map to a single weight-2
  // output whose coefficient is (up to sign) one logical expectation value.
  const std::vector<Row> table = {
      {3, 4, 6, yb},    // X I -> <Y> X Y
      {3, 8, 11, zb},   // Y I -> <Z> Y Z
      {3, 12, 13, -xb}, // Z I -> -<X> Z X
      {3, 1, 10, -xb},  // I X -> -<X> Y Y
      {3, 2, 15, -yb},  // I Y -> -<Y> Z Z
      {3, 3, 5, -zb},   // I Z -> -<Z> X X
      {4, 4, 10, -xb},  // X I -> -<X> Y Y
      {4, 8, 15, -yb},  // Y I -> -<Y> Z Z
      {4, 12, 5, -zb},  // Z I -> -<Z> X X
      {4, 1, 9, yb},    // I X -> <Y> Y X
      {4, 2, 14, zb},   // I Y -> <Z> Z Y
      {4, 3, 7, -xb},   // I Z -> -<X> X Z
  };
  for (const Row& row : table) {
    const SuperOperator s =
        perfect_superop(alpha, beta, {row.pair_first, row.pair_first + 1});
    for (int j = 0; j < 16; ++j) {
      const double expected = (j == row.out) ? row.coeff : 0.0;
      EXPECT_NEAR(s.matrix(j, row.in).real(), expected, 1e-13)
          << "pair " << row.pair_first << " in " << row.in << " out " << j;
      EXPECT_NEAR(s.matrix(j, row.in).imag(), 0.0, 1e-13);
    }
  }
}

TEST(VertexMap, IdentityIsFixedAndTheUnitEigenvalueIsSimple) {
  for (double alpha : {0.5, M_PI / 3.0, 1.1}) {
    for (double beta : {0.4, 1.7, 3.0, 4.3, 5.6}) {
      const SuperOperator s = perfect_superop(alpha, beta);
      EXPECT_NEAR(std::abs(s.matrix(0, 0) - cplx(1.0, 0.0)), 0.0, 1e-12);
      for (int j = 1; j < 16; ++j) {
        EXPECT_NEAR(std::abs(s.matrix(j, 0)), 0.0, 1e-12);
      }
      EXPECT_NEAR(relative_image_norm(s, 0), 1.0, 1e-12);
      // Throws when the unit eigenvalue is missing or degenerate.
      const double sub = subleading_eigenvalue_modulus(s.matrix);
      EXPECT_LT(sub, 0.999) << alpha << ", " << beta;
    }
  }
}

TEST(VertexMap, SubleadingEigenvalueStaysInsideTheUnitDisk) {
  const double alpha = M_PI / 3.0;
  double worst = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double beta = 2.0 * M_PI * static_cast<double>(k) / 64.0;
    const SuperOperator s = perfect_superop(alpha, beta);
    worst = std::max(worst, subleading_eigenvalue_modulus(s.matrix));
  }
  EXPECT_LT(worst, 1.0 - 1e-3);
  EXPECT_NEAR(worst, 0.7154845405526282, 1e-9);
}

TEST(VertexMap, LegPairsAreRelatedByReflection) {
  const double alpha = 1.1, beta = 0.6;
  const SuperOperator s34 = perfect_superop(alpha, beta, {3, 4});
  const SuperOperator s45 = perfect_superop(alpha, beta, {4, 5});
  double worst = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        for (int d = 0; d < 4; ++d) {
          worst = std::max(
              worst, std::abs(s45.matrix(4 * c + d, 4 * a + b) -
                              s34.matrix(4 * d + c, 4 * b + a)));
        }
      }
    }
  }
  EXPECT_LT(worst, 1e-13);

  // Index swaps are similarity transforms, so the spectra coincide.
  const auto moduli = [](const Eigen::MatrixXcd& m) {
    Eigen::VectorXcd e =
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(m, false).eigenvalues();
    std::vector<double> out(static_cast<std::size_t>(e.size()));
    for (std::int64_t i = 0; i < e.size(); ++i) {
      out[static_cast<std::size_t>(i)] = std::abs(e(i));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto m34 = moduli(s34.matrix), m45 = moduli(s45.matrix);
  for (std::size_t i = 0; i < m34.size(); ++i) {
    EXPECT_NEAR(m34[i], m45[i], 1e-10);
  }
}

TEST(VertexMap, RejectsUnsupportedLegPairs) {
  EXPECT_THROW(perfect_superop(0.5, 0.0, {2, 3}), std::invalid_argument);
  EXPECT_THROW(perfect_superop(0.5, 0.0, {3, 5}), std::invalid_argument);
}

TEST(EdgeMap, ImagesMatchDirectTensorExpectations) {
  // Independent oracle: entries are ten-qubit Pauli expectations in the
  // deformed edge state, with the output letters on the inward merged leg
  // and the input letters on the chosen outward legs. The support-halving
  // pair map carries an extra factor 1/2.
  TensorParams params;
  params.theta = 0.4;
  const Eigen::VectorXcd state = imperfect_tensor(params).vectorized();
  const char* letter = "IXYZ";
  const auto embed = [&](std::string* p, int leg, int a) {
    (*p)[static_cast<std::size_t>(2 * (leg - 1))] = letter[a / 4];
    (*p)[static_cast<std::size_t>(2 * (leg - 1) + 1)] = letter[a % 4];
  };

  const SuperOperator pair = imperfect_superop(0.4, {3, 4});
  double worst = 0.0;
  for (int i = 0; i < 256; ++i) {
    for (int j = 0; j < 16; ++j) {
      std::string p = "IIIIIIIIII";
      embed(&p, 1, j);
      embed(&p, 3, i / 16);
      embed(&p, 4, i % 16);
      const cplx expected =
          0.5 * transpose_sign(j) *
          state.dot(PauliOperator::from_string(p).apply(state));
      worst = std::max(worst, std::abs(pair.matrix(j, i) - expected));
    }
  }
  EXPECT_LT(worst, 1e-12);

  const SuperOperator single = imperfect_superop(0.4, 5);
  worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      std::string p = "IIIIIIIIII";
      embed(&p, 1, j);
      embed(&p, 5, i);
      const cplx expected =
          transpose_sign(j) *
          state.dot(PauliOperator::from_string(p).apply(state));
      worst = std::max(worst, std::abs(single.matrix(j, i) - expected));
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(EdgeMap, IdentityColumnsAreUnitalInRelativeUnits) {
  for (int leg = 2; leg <= 5; ++leg) {
    const SuperOperator s = imperfect_superop(0.3, leg);
    EXPECT_EQ(s.kind, 1);
    EXPECT_EQ(s.in_dim, 4);
    EXPECT_EQ(s.out_dim, 4);
    EXPECT_NEAR(std::abs(s.matrix(0, 0) - cplx(1.0, 0.0)), 0.0, 1e-12);
    EXPECT_NEAR(relative_image_norm(s, 0), 1.0, 1e-12);
  }
  for (int first : {2, 3, 4}) {
    const SuperOperator s = imperfect_superop(0.3, {first, first + 1});
    EXPECT_EQ(s.kind, 3);
    EXPECT_EQ(s.in_dim, 16);
    EXPECT_EQ(s.out_dim, 4);
    // In raw Hilbert-Schmidt units the identity lands at sqrt(out/in) = 1/2;
    // in relative units it is exactly unital.
    EXPECT_NEAR(std::abs(s.matrix(0, 0) - cplx(0.5, 0.0)), 0.0, 1e-12);
    for (int j = 1; j < 16; ++j) {
      EXPECT_NEAR(std::abs(s.matrix(j, 0)), 0.0, 1e-12);
    }
    EXPECT_NEAR(relative_image_norm(s, 0), 1.0, 1e-12);
    EXPECT_THROW(relative_image_norm(s, 256), std::invalid_argument);
  }
}

TEST(EdgeMap, UndeformedCodeAnnihilatesSingleSiteInsertions) {
  for (int leg = 2; leg <= 5; ++leg) {
    const SuperOperator s = imperfect_superop(0.0, leg);
    for (int i = 1; i < 16; ++i) {
      EXPECT_NEAR(s.matrix.col(i).norm(), 0.0, 1e-14) << "leg " << leg;
    }
  }
}

TEST(EdgeMap, DeformedImagesStayBelowUnitNorm) {
  // At theta = 0 the undeformed code passes some two-site insertions through
  // at relative norm exactly 1; any deformation pulls every non-identity
  // image strictly inside the unit ball. The envelope is pinned at the
  // smallest grid point.
  double worst = 0.0;
  for (double theta : {0.02, 0.06, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.3}) {
    for (int first : {2, 3, 4}) {
      const SuperOperator s = imperfect_superop(theta, {first, first + 1});
      for (int i = 1; i < 256; ++i) {
        const double n = relative_image_norm(s, i);
        EXPECT_LT(n, 1.0) << "theta " << theta << " pair " << first;
        worst = std::max(worst, n);
      }
    }
  }
  EXPECT_NEAR(worst, 0.9996800426643907, 1e-12);
}

TEST(EdgeMap, OuterLegsAreRelatedByReflection) {
  const double theta = 0.37;
  const SuperOperator s23 = imperfect_superop(theta, {2, 3});
  const SuperOperator s45 = imperfect_superop(theta, {4, 5});
  double worst = 0.0;
  for (int a1 = 0; a1 < 16; ++a1) {
    for (int a2 = 0; a2 < 16; ++a2) {
      for (int j = 0; j < 16; ++j) {
        worst = std::max(worst, std::abs(s45.matrix(j, 16 * a1 + a2) -
                                         s23.matrix(j, 16 * a2 + a1)));
      }
    }
  }
  EXPECT_LT(worst, 1e-13);

  const SuperOperator l2 = imperfect_superop(theta, 2);
  const SuperOperator l5 = imperfect_superop(theta, 5);
  EXPECT_LT((l5.matrix - l2.matrix).cwiseAbs().maxCoeff(), 1e-13);
  const SuperOperator l3 = imperfect_superop(theta, 3);
  const SuperOperator l4 = imperfect_superop(theta, 4);
  EXPECT_LT((l4.matrix - l3.matrix).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(EdgeMap, ImagesOfHermitianInputsAreHermitian) {
  const SuperOperator s = imperfect_superop(0.55, {2, 3});
  EXPECT_LT(s.matrix.imag().cwiseAbs().maxCoeff(), 1e-13);

  // Reconstruct the dense image of one random real combination of inputs.
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXcd in = Eigen::MatrixXcd::Zero(16, 16);
  Eigen::VectorXd coeff(256);
  for (int i = 0; i < 256; ++i) {
    coeff(i) = dist(rng);
    in += coeff(i) * 0.25 *
          hmera_test::kron(qudit_dense(i / 16), qudit_dense(i % 16));
  }
  ASSERT_LT((in - in.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::MatrixXcd image = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < 256; ++i) {
    for (int j = 0; j < 16; ++j) {
      image += coeff(i) * s.matrix(j, i) * 0.5 * qudit_dense(j);
    }
  }
  EXPECT_LT((image - Eigen::MatrixXcd(image.adjoint())).cwiseAbs().maxCoeff(),
            1e-11);
}

TEST(EdgeMap, RejectsUnsupportedLegs) {
  EXPECT_THROW(imperfect_superop(0.3, 1), std::invalid_argument);
  EXPECT_THROW(imperfect_superop(0.3, 6), std::invalid_argument);
  EXPECT_THROW(imperfect_superop(0.3, {1, 2}), std::invalid_argument);
  EXPECT_THROW(imperfect_superop(0.3, {2, 4}), std::invalid_argument);
  EXPECT_THROW(imperfect_superop(0.3, {5, 6}), std::invalid_argument);
}

TEST(Panels, ContractionFactorsMatchTheCalibratedPoint) {
  const LambdaTable t = panel_lambdas(0.3, M_PI / 3.0, 0.0);
  ASSERT_EQ(t.values.size(), 7u);
  EXPECT_NEAR(t.values.at("1->1"), 0.15245755311303974, 1e-12);
  EXPECT_NEAR(t.values.at("1->2"), 0.86602540378443882, 1e-12);
  EXPECT_NEAR(t.values.at("2->1"), 0.48229641538272372, 1e-12);
  EXPECT_NEAR(t.values.at("2->2"), 0.023243305501215332, 1e-12);
  EXPECT_NEAR(t.values.at("2->3"), 0.13203211399470777, 1e-12);
  EXPECT_NEAR(t.values.at("3->2"), 0.073529731364440284, 1e-12);
  EXPECT_NEAR(t.values.at("3->3"), 0.41768094787561072, 1e-12);

  // At beta = 0 the weight 1 -> 2 factor is the logical X expectation.
  EXPECT_NEAR(t.values.at("1->2"), std::sqrt(3.0) / 2.0, 1e-14);
  EXPECT_NEAR(t.values.at("1->2"),
              logical_x_expectation(M_PI / 3.0, 0.0), 1e-12);

  // Composite panels are per-tile products.
  const double l11 = t.values.at("1->1");
  EXPECT_DOUBLE_EQ(t.values.at("2->2"), l11 * l11);
  EXPECT_DOUBLE_EQ(t.values.at("2->3"), l11 * t.values.at("1->2"));
  EXPECT_DOUBLE_EQ(t.values.at("3->2"), t.values.at("2->1") * l11);

  for (const auto& [key, value] : t.values) {
    EXPECT_TRUE(t.notes.count(key)) << key;
    EXPECT_FALSE(t.notes.at(key).empty()) << key;
    EXPECT_GT(value, 0.0);
    EXPECT_LT(value, 1.0);
  }
}

TEST(Panels, ScalingExponentAveragesTheFactorsGeometrically) {
  const TransitionTable probs = unconditional_probabilities();
  const LambdaTable lambdas = panel_lambdas(0.3, M_PI / 3.0, 0.0);
  const ScalingEstimate est = average_lambda(probs, lambdas);
  EXPECT_NEAR(est.lambda_bar, 0.23927229883922402, 1e-12);
  EXPECT_NEAR(est.delta, std::log(est.lambda_bar), 1e-14);
  EXPECT_NEAR(-2.0 * est.delta, 2.8603060998049119, 1e-11);

  // Degenerate factor tables pin the geometric mean.
  LambdaTable flat;
  for (const auto& [key, value] : lambdas.values) flat.values[key] = 1.0;
  EXPECT_DOUBLE_EQ(average_lambda(probs, flat).lambda_bar, 1.0);
  EXPECT_DOUBLE_EQ(average_lambda(probs, flat).delta, 0.0);
  for (auto& [key, value] : flat.values) value = 0.5;
  EXPECT_NEAR(average_lambda(probs, flat).lambda_bar, 0.5, 1e-15);

  LambdaTable vanishing = lambdas;
  vanishing.values["2->3"] = 0.0;
  const ScalingEstimate zero = average_lambda(probs, vanishing);
  EXPECT_EQ(zero.lambda_bar, 0.0);
  EXPECT_TRUE(std::isinf(zero.delta));
  EXPECT_LT(zero.delta, 0.0);

  LambdaTable expanding = lambdas;
  expanding.values["1->1"] = 1.5;
  EXPECT_THROW(average_lambda(probs, expanding), std::invalid_argument);

  LambdaTable incomplete = lambdas;
  incomplete.values.erase("3->3");
  EXPECT_THROW(average_lambda(probs, incomplete), std::invalid_argument);

  TransitionTable empty;
  EXPECT_THROW(average_lambda(empty, lambdas), std::invalid_argument);
}

}  // namespace
}  // namespace hmera
