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

#ifndef HMERA_SUPEROP_HPP
#define HMERA_SUPEROP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hmera/pauli.hpp"
#include "hmera/probabilities.hpp"
#include "hmera/tensor_zoo.hpp"

namespace hmera {

// Logical single-qubit expectation values in cos(a)|0> + e^{ib} sin(a)|1>.
inline double logical_x_expectation(double alpha, double beta) {
  return std::sin(2.0 * alpha) * std::cos(beta);
}
inline double logical_y_expectation(double alpha, double beta) {
  return std::sin(2.0 * alpha) * std::sin(beta);
}
inline double logical_z_expectation(double alpha, double /*beta*/) {
  return std::cos(2.0 * alpha);
}

// An ascending coarse-graining map written as a matrix over Hilbert-Schmidt
// normalized Pauli product bases (single qubit P/sqrt2, qubit pair P/2,
// merged-copy qudit P/2, qudit pair P/4). Rows index the output basis,
// columns the input basis. Leg labels follow the tensor's 1..5 convention
// with leg 1 (and 2, for the two-inward case) pointing inward.
struct SuperOperator {
  Eigen::MatrixXcd matrix;
  std::vector<int> in_legs;
  std::vector<int> out_legs;
  int in_weight = 0;
  int out_weight = 0;
  int in_dim = 0;   // Hilbert dimension of the input support
  int out_dim = 0;  // Hilbert dimension of the output support
  // Panel classification of the transition this map realizes on its
  // designated input sector: 1 = weight 1 kept by an edge tensor,
  // 2 = weight 1 spread to 2 by a vertex tensor, 3 = weight 2 collapsed to
  // 1 by an edge tensor. Composite panels (4-8) are per-tile products and
  // are reported through panel_lambdas.
  int kind = 0;
  std::string basis = "pauli/hilbert-schmidt";
};

namespace detail {

inline char pauli_letter(int a) {
  switch (a) {
    case 0: return 'I';
    case 1: return 'X';
    case 2: return 'Y';
    case 3: return 'Z';
    default: throw std::invalid_argument("pauli_letter: index out of range");
  }
}

// matrix[j, i] = Tr[out_j^dag (W^dag in_i W)] with `in` already carrying the
// input basis normalization and `out` the dense normalized output elements.
inline Eigen::MatrixXcd superop_matrix(
    const Eigen::MatrixXcd& w, const std::vector<PauliOperator>& in,
    double in_norm, const std::vector<Eigen::MatrixXcd>& out) {
  Eigen::MatrixXcd m(static_cast<std::int64_t>(out.size()),
                     static_cast<std::int64_t>(in.size()));
  const std::int64_t cols = w.cols();
  Eigen::MatrixXcd moved(w.rows(), cols);
  for (std::size_t i = 0; i < in.size(); ++i) {
    for (std::int64_t c = 0; c < cols; ++c) {
      moved.col(c) = in[i].apply(w.col(c));
    }
    const Eigen::MatrixXcd image = in_norm * (w.adjoint() * moved);
    for (std::size_t j = 0; j < out.size(); ++j) {
      m(static_cast<std::int64_t>(j), static_cast<std::int64_t>(i)) =
          (out[j].adjoint() * image).trace();
    }
  }
  return m;
}

// Dense normalized basis on one merged-copy qudit: element a is the
// two-qubit Pauli (a/4 on the first copy, a%4 on the second) over 2.
inline std::vector<Eigen::MatrixXcd> qudit_basis_dense() {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(16);
  for (int a = 0; a < 16; ++a) {
    const std::string s{pauli_letter(a / 4), pauli_letter(a % 4)};
    out.push_back(0.5 * PauliOperator::from_string(s).dense());
  }
  return out;
}

inline std::vector<Eigen::MatrixXcd> qubit_pair_basis_dense() {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(16);
  for (int a = 0; a < 16; ++a) {
    const std::string s{pauli_letter(a / 4), pauli_letter(a % 4)};
    out.push_back(0.5 * PauliOperator::from_string(s).dense());
  }
  return out;
}

}  // namespace detail

// The single-copy vertex-tensor map on a weight-2 operator: the code tensor
// with logical state cos(alpha)|0> + e^{i beta} sin(alpha)|1> is read as an
// isometry W from its two inward legs (1, 2) to the outward legs (3, 4, 5),
// and the returned 16x16 matrix represents O -> W^dag (O x I) W for O on
// the outward pair `in_legs` ({3,4} or {4,5}). Entries are real and equal
// to 0, +-1, or +- a logical expectation value.
inline SuperOperator perfect_superop(double alpha, double beta,
                                     std::pair<int, int> in_legs = {3, 4}) {
  if (!(in_legs == std::pair<int, int>{3, 4} ||
        in_legs == std::pair<int, int>{4, 5})) {
    throw std::invalid_argument(
        "perfect_superop: input legs must be {3,4} or {4,5}");
  }
  const DenseTensor t = contracted_with_state(
      perfect_tensor(), 0, bulk_logical_state(alpha, beta));
  const Eigen::MatrixXcd w = 2.0 * t.matricized({2, 3, 4});  // 8 x 4

  std::vector<PauliOperator> in;
  in.reserve(16);
  for (int i = 0; i < 16; ++i) {
    std::string s = "III";
    const int offset = in_legs.first - 3;
    s[offset] = detail::pauli_letter(i / 4);
    s[offset + 1] = detail::pauli_letter(i % 4);
    in.push_back(PauliOperator::from_string(s));
  }
  SuperOperator s;
  s.matrix = detail::superop_matrix(w, in, 0.5,
                                    detail::qubit_pair_basis_dense());
  s.in_legs = {in_legs.first, in_legs.second};
  s.out_legs = {1, 2};
  s.in_weight = 2;
  s.out_weight = 2;
  s.in_dim = 4;
  s.out_dim = 4;
  s.kind = 2;
  return s;
}

namespace detail {

inline Eigen::MatrixXcd edge_tensor_isometry(double theta) {
  TensorParams params;
  params.theta = theta;
  const DenseTensor t = imperfect_tensor(params);
  return 2.0 * t.matricized({1, 2, 3, 4});  // 256 x 4
}

// The 8-qubit Pauli placing merged-copy qudit Paulis `vals` at outward
// qudit positions `pos` (0..3 for legs 2..5).
inline PauliOperator qudit_pauli(const std::vector<int>& pos,
                                 const std::vector<int>& vals) {
  std::string s = "IIIIIIII";
  for (std::size_t k = 0; k < pos.size(); ++k) {
    s[2 * pos[k]] = pauli_letter(vals[k] / 4);
    s[2 * pos[k] + 1] = pauli_letter(vals[k] % 4);
  }
  return PauliOperator::from_string(s);
}

}  // namespace detail

// The edge-tensor map on a weight-2 qudit operator: W maps the inward leg 1
// to the outward legs 2..5, and the 16x256 matrix represents
// O -> W^dag (O x I) W for O on the adjacent pair `in_legs` ({2,3}, {3,4}
// or {4,5}). The input index is 16*a1 + a2 with a1 on the lower leg.
inline SuperOperator imperfect_superop(double theta,
                                       std::pair<int, int> in_legs) {
  if (in_legs.second != in_legs.first + 1 || in_legs.first < 2 ||
      in_legs.second > 5) {
    throw std::invalid_argument(
        "imperfect_superop: input legs must be {2,3}, {3,4} or {4,5}");
  }
  std::vector<PauliOperator> in;
  in.reserve(256);
  for (int i = 0; i < 256; ++i) {
    in.push_back(detail::qudit_pauli({in_legs.first - 2, in_legs.second - 2},
                                     {i / 16, i % 16}));
  }
  SuperOperator s;
  s.matrix = detail::superop_matrix(detail::edge_tensor_isometry(theta), in,
                                    0.25, detail::qudit_basis_dense());
  s.in_legs = {in_legs.first, in_legs.second};
  s.out_legs = {1};
  s.in_weight = 2;
  s.out_weight = 1;
  s.in_dim = 16;
  s.out_dim = 4;
  s.kind = 3;
  return s;
}

// Weight-1 variant: a single qudit operator on outward leg `in_leg` (2..5).
inline SuperOperator imperfect_superop(double theta, int in_leg) {
  if (in_leg < 2 || in_leg > 5) {
    throw std::invalid_argument("imperfect_superop: input leg must be 2..5");
  }
  std::vector<PauliOperator> in;
  in.reserve(16);
  for (int i = 0; i < 16; ++i) {
    in.push_back(detail::qudit_pauli({in_leg - 2}, {i}));
  }
  SuperOperator s;
  s.matrix = detail::superop_matrix(detail::edge_tensor_isometry(theta), in,
                                    0.5, detail::qudit_basis_dense());
  s.in_legs = {in_leg};
  s.out_legs = {1};
  s.in_weight = 1;
  s.out_weight = 1;
  s.in_dim = 4;
  s.out_dim = 4;
  s.kind = 1;
  return s;
}

// Norm of the image of input basis element `col`, measured in units of a
// unit-normalized Pauli on the output support rather than in raw
// Hilbert-Schmidt units.  The two differ by sqrt(in_dim / out_dim) when the
// map shrinks its support; with this scaling the identity always maps to the
// identity at exactly 1, and operators preserved by the undeformed code sit
// at exactly 1, so "every image norm < 1" is a sharp statement.
inline double relative_image_norm(const SuperOperator& s, int col) {
  if (col < 0 || col >= s.matrix.cols()) {
    throw std::invalid_argument("relative_image_norm: column out of range");
  }
  return s.matrix.col(col).norm() *
         std::sqrt(static_cast<double>(s.in_dim) / s.out_dim);
}

// Largest singular value of the block matrix[rows, cols].
inline double sector_sigma(const Eigen::MatrixXcd& m,
                           const std::vector<int>& rows,
                           const std::vector<int>& cols) {
  Eigen::MatrixXcd block(static_cast<std::int64_t>(rows.size()),
                         static_cast<std::int64_t>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      block(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)) =
          m(rows[r], cols[c]);
    }
  }
  return block.jacobiSvd().singularValues()(0);
}

// Largest eigenvalue modulus among eigenvalues that are not (numerically)
// the simple unit eigenvalue. Throws if no unit eigenvalue exists or if it
// is degenerate, since both would break the coarse-graining picture.
inline double subleading_eigenvalue_modulus(const Eigen::MatrixXcd& m,
                                            double unit_tol = 1e-9) {
  const Eigen::VectorXcd eig =
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(m, false).eigenvalues();
  int unit_count = 0;
  double best = 0.0;
  for (std::int64_t i = 0; i < eig.size(); ++i) {
    if (std::abs(eig(i) - std::complex<double>(1.0, 0.0)) < unit_tol) {
      ++unit_count;
    } else {
      best = std::max(best, std::abs(eig(i)));
    }
  }
  if (unit_count != 1) {
    throw std::runtime_error(
        "subleading_eigenvalue_modulus: unit eigenvalue is missing or "
        "degenerate");
  }
  return best;
}

namespace detail {

inline std::vector<int> all_indices(int n, bool skip_identity) {
  std::vector<int> out;
  for (int i = skip_identity ? 1 : 0; i < n; ++i) out.push_back(i);
  return out;
}

}  // namespace detail

// Dominant contraction factor per weight transition, plus the convention
// that produced it (recorded so downstream output can embed it).
struct LambdaTable {
  std::map<std::string, double> values;
  std::map<std::string, std::string> notes;
};

// Per-transition contraction factors at one parameter point. Weight-changing
// blocks use the largest singular value of the traceless->traceless block,
// maximized over inequivalent leg positions; the weight-preserving
// single-copy vertex map uses its largest non-unit eigenvalue modulus.
// Multi-tile panels multiply per-tile factors.
inline LambdaTable panel_lambdas(double theta, double alpha, double beta) {
  const std::vector<int> out15 = detail::all_indices(16, true);

  // Edge tensor, weight 1 -> 1: legs {2} and {3} ({5}, {4} are reflections).
  double l11 = 0.0;
  for (int leg : {2, 3}) {
    const SuperOperator s = imperfect_superop(theta, leg);
    l11 = std::max(l11, sector_sigma(s.matrix, out15, out15));
  }

  // Edge tensor, weight 2 -> 1: pairs {2,3} and {3,4}.
  const std::vector<int> in255 = detail::all_indices(256, true);
  double l21 = 0.0;
  for (int first : {2, 3}) {
    const SuperOperator s = imperfect_superop(theta, {first, first + 1});
    l21 = std::max(l21, sector_sigma(s.matrix, out15, in255));
  }

  // Vertex tensor (single copy): weight 1 -> 2 block and the 2 -> 2
  // eigenvalue. The {4,5} insertion is similar to {3,4}, so one suffices.
  const SuperOperator sp = perfect_superop(alpha, beta, {3, 4});
  std::vector<int> weight1;
  for (int a = 1; a < 4; ++a) {
    weight1.push_back(a);      // I x P
    weight1.push_back(4 * a);  // P x I
  }
  const double l12 = sector_sigma(sp.matrix, out15, weight1);
  const double s22 = subleading_eigenvalue_modulus(sp.matrix);

  LambdaTable t;
  t.values["1->1"] = l11;
  t.notes["1->1"] =
      "max singular value, traceless block, legs {2},{3} maximized";
  t.values["1->2"] = l12;
  t.notes["1->2"] =
      "max singular value, weight-1 inputs to traceless outputs";
  t.values["2->1"] = l21;
  t.notes["2->1"] =
      "max singular value, traceless block, pairs {2,3},{3,4} maximized";
  t.values["2->2"] = l11 * l11;
  t.notes["2->2"] = "two edge tensors: (1->1)^2";
  t.values["2->3"] = l11 * l12;
  t.notes["2->3"] = "edge times vertex: (1->1)*(1->2)";
  t.values["3->2"] = l21 * l11;
  t.notes["3->2"] = "edge pair times edge: (2->1)*(1->1)";
  t.values["3->3"] = std::max(l21 * l12, l11 * std::max(s22, s22 * s22));
  t.notes["3->3"] =
      "max of (2->1)*(1->2) and (1->1)*vertex 2->2 eigenvalue";
  return t;
}

// Weighted geometric mean of the contraction factors under the layer-type
// frequencies, and the scaling exponent it implies.
struct ScalingEstimate {
  double lambda_bar = 0.0;
  double delta = 0.0;  // log(lambda_bar); -inf when any factor vanishes
};

inline ScalingEstimate average_lambda(const TransitionTable& table,
                                      const LambdaTable& lambdas) {
  if (table.unconditional.empty()) {
    throw std::invalid_argument("average_lambda: unconditional part missing");
  }
  double log_sum = 0.0;
  bool vanishing = false;
  for (const auto& [key, prob] : table.unconditional) {
    // "p(i->j)" -> "i->j"
    const std::string kind = key.substr(2, key.size() - 3);
    const auto it = lambdas.values.find(kind);
    if (it == lambdas.values.end()) {
      throw std::invalid_argument("average_lambda: no factor for " + key);
    }
    const double l = it->second;
    if (l < 0.0 || l > 1.0 + 1e-12) {
      throw std::invalid_argument(
          "average_lambda: factors must lie in [0, 1]");
    }
    if (l == 0.0) {
      vanishing = true;
      continue;
    }
    log_sum += prob.value() * std::log(l);
  }
  ScalingEstimate out;
  if (vanishing) {
    out.lambda_bar = 0.0;
    out.delta = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.lambda_bar = std::exp(log_sum);
  out.delta = log_sum;
  return out;
}

}  // namespace hmera

#endif  // HMERA_SUPEROP_HPP
