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

#ifndef HMERA_TENSOR_ZOO_HPP
#define HMERA_TENSOR_ZOO_HPP

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmera/dense_tensor.hpp"
#include "hmera/pauli.hpp"

namespace hmera {

// Parameters for the deformed tensors. The boundary-layer tensor (edge tiles)
// mixes the double-copy encoding with two-copy Z insertions at angles
// theta_ij; the central tensor mixes the encoding map with per-leg Pauli
// insertions P_i at angles phi[i], weighted against phi0.
struct TensorParams {
  double theta = 0.0;
  // Explicit 20-entry table over ordered pairs (i, j), i != j, i, j in 1..5,
  // lexicographic. When absent, every entry is asin(sin(theta) / sqrt(20)).
  std::optional<std::array<double, 20>> theta_ij;
  double phi0 = 0.0;
  std::array<double, 5> phi{};
  std::string top_paulis = "ZZZZZ";
};

// Ordered-pair table layout: index k corresponds to the k-th pair in
// (1,2),(1,3),(1,4),(1,5),(2,1),(2,3),... (lexicographic, i != j).
inline std::pair<int, int> theta_pair(int k) {
  if (k < 0 || k >= 20) throw std::invalid_argument("theta_pair: bad index");
  const int i = k / 4 + 1;
  int j = k % 4 + 1;
  if (j >= i) ++j;
  return {i, j};
}

inline int theta_pair_index(int i, int j) {
  if (i < 1 || i > 5 || j < 1 || j > 5 || i == j) {
    throw std::invalid_argument("theta_pair_index: bad pair");
  }
  return (i - 1) * 4 + (j - (j > i ? 2 : 1));
}

inline std::array<double, 20> resolved_theta_ij(const TensorParams& params) {
  if (params.theta_ij) return *params.theta_ij;
  std::array<double, 20> out{};
  out.fill(std::asin(std::sin(params.theta) / std::sqrt(20.0)));
  return out;
}

// cos^2(theta) + sum sin^2(theta_ij) - 1, which must vanish for the deformed
// edge tensor to stay normalized.
inline double edge_normalization_deviation(const TensorParams& params) {
  const auto table = resolved_theta_ij(params);
  double s = std::cos(params.theta) * std::cos(params.theta);
  for (double t : table) s += std::sin(t) * std::sin(t);
  return s - 1.0;
}

// cos^2(phi0) + sum_i sin^2(phi_i) - 1 for the central tensor.
inline double top_normalization_deviation(const TensorParams& params) {
  double s = std::cos(params.phi0) * std::cos(params.phi0);
  for (double p : params.phi) s += std::sin(p) * std::sin(p);
  return s - 1.0;
}

// Symmetric central-tensor parameterization: all five insertion angles equal
// to phi_common, with phi0 chosen to restore normalization. Requires
// 5 sin^2(phi_common) <= 1.
inline TensorParams symmetric_top_params(double phi_common,
                                         TensorParams base = {}) {
  const double s2 = 5.0 * std::sin(phi_common) * std::sin(phi_common);
  if (s2 > 1.0 + 1e-14) {
    throw std::invalid_argument(
        "symmetric_top_params: 5 sin^2(phi) exceeds 1, no normalization");
  }
  base.phi.fill(phi_common);
  base.phi0 = std::acos(std::sqrt(std::max(0.0, 1.0 - s2)));
  return base;
}

// The logical qubit state cos(alpha)|0> + e^{i beta} sin(alpha)|1>.
inline Eigen::Vector2cd bulk_logical_state(double alpha, double beta) {
  Eigen::Vector2cd v;
  v << cplx(std::cos(alpha), 0.0),
      std::exp(cplx(0.0, beta)) * std::sin(alpha);
  return v;
}

// Six-leg encoding tensor of the five-qubit code: leg 0 is the logical input
// (dim 2), legs 1..5 the physical qubits (dim 2). T[l, s1..s5] = V[s, l].
inline DenseTensor perfect_tensor() {
  const Eigen::MatrixXcd enc = five_qubit_code().encoding_map();
  DenseTensor t = DenseTensor::from_matrix(enc, {2, 2, 2, 2, 2}, {2})
                      .permuted({5, 0, 1, 2, 3, 4});
  t.set_labels({"logical", "p1", "p2", "p3", "p4", "p5"});
  t.tags()["kind"] = "perfect";
  return t;
}

// 32x2 matrix cos(phi0) V + sum_i sin(phi_i) P_i V with P_i = top_paulis[i-1]
// acting on qubit i. No normalization check: callers inspect the Gram matrix.
inline Eigen::MatrixXcd top_encoding_matrix(const TensorParams& params) {
  if (params.top_paulis.size() != 5) {
    throw std::invalid_argument("top_encoding_matrix: need 5 Pauli letters");
  }
  const Eigen::MatrixXcd enc = five_qubit_code().encoding_map();
  Eigen::MatrixXcd out = std::cos(params.phi0) * enc;
  for (int i = 0; i < 5; ++i) {
    const char c = params.top_paulis[static_cast<std::size_t>(i)];
    if (c != 'X' && c != 'Y' && c != 'Z') {
      throw std::invalid_argument("top_encoding_matrix: letters must be XYZ");
    }
    std::string s = "IIIII";
    s[static_cast<std::size_t>(i)] = c;
    const PauliOperator p = PauliOperator::from_string(s);
    Eigen::MatrixXcd cols(32, 2);
    cols.col(0) = p.apply(enc.col(0));
    cols.col(1) = p.apply(enc.col(1));
    out += std::sin(params.phi[static_cast<std::size_t>(i)]) * cols;
  }
  return out;
}

// Six-leg central tensor (single copy): the skewed encoding map as a tensor
// with leg 0 logical, legs 1..5 physical. Throws when the mixing angles are
// not normalized.
inline DenseTensor top_tensor(const TensorParams& params, double tol = 1e-10) {
  if (std::abs(top_normalization_deviation(params)) > tol) {
    throw std::invalid_argument("top_tensor: mixing angles are not normalized");
  }
  const Eigen::MatrixXcd enc = top_encoding_matrix(params);
  DenseTensor t = DenseTensor::from_matrix(enc, {2, 2, 2, 2, 2}, {2})
                      .permuted({5, 0, 1, 2, 3, 4});
  t.set_labels({"logical", "p1", "p2", "p3", "p4", "p5"});
  t.tags()["kind"] = "top";
  return t;
}

// Interleaves two 5-qubit state vectors into one 5-qudit (dim 4) vector with
// merged index m_k = 2 s_k + t_k (first copy is the high bit).
inline Eigen::VectorXcd merge_copies(const Eigen::VectorXcd& a,
                                     const Eigen::VectorXcd& b) {
  if (a.size() != 32 || b.size() != 32) {
    throw std::invalid_argument("merge_copies: need two 32-dim states");
  }
  Eigen::VectorXcd prod(1024);
  for (int s = 0; s < 32; ++s) {
    for (int t = 0; t < 32; ++t) prod[s * 32 + t] = a[s] * b[t];
  }
  return DenseTensor::from_vector(prod, {2, 2, 2, 2, 2, 2, 2, 2, 2, 2})
      .permuted({0, 5, 1, 6, 2, 7, 3, 8, 4, 9})
      .vectorized();
}

// Takes a single-copy 6-leg tensor [logical, p1..p5] to its two-copy tensor
// with merged physical legs: [logical1, logical2, m1..m5], m legs of dim 4.
inline DenseTensor two_copy_merged(const DenseTensor& single) {
  if (single.rank() != 6) {
    throw std::invalid_argument("two_copy_merged: need a 6-leg tensor");
  }
  DenseTensor pair = outer(single, single)
                         .permuted({0, 6, 1, 7, 2, 8, 3, 9, 4, 10, 5, 11})
                         .reshaped({2, 2, 4, 4, 4, 4, 4});
  pair.set_labels({"logical1", "logical2", "m1", "m2", "m3", "m4", "m5"});
  pair.tags() = single.tags();
  return pair;
}

// Contracts one leg of t with a state vector; remaining legs keep their
// original order.
inline DenseTensor contracted_with_state(const DenseTensor& t, int leg,
                                         const Eigen::VectorXcd& v) {
  DenseTensor s = DenseTensor::from_vector(v, {static_cast<int>(v.size())});
  return contract(t, {leg}, s, {0});
}

// Seven-leg deformed edge tensor [logical1, logical2, m1..m5]: the two-copy
// encoding plus paired single-qubit Z insertions,
//   cos(theta) (V x V) + sum_{i!=j} sin(theta_ij) (Z_i V x Z_j V),
// physical copies merged into dim-4 legs. Throws when Eq-normalization of the
// angles is violated beyond tol.
inline DenseTensor imperfect_tensor_map(const TensorParams& params,
                                        double tol = 1e-10) {
  if (std::abs(edge_normalization_deviation(params)) > tol) {
    throw std::invalid_argument(
        "imperfect_tensor_map: insertion angles are not normalized");
  }
  const auto table = resolved_theta_ij(params);
  const Eigen::MatrixXcd enc = five_qubit_code().encoding_map();
  // Pre-apply the five single-qubit Z insertions to both code words.
  std::array<Eigen::VectorXcd, 2> base = {enc.col(0), enc.col(1)};
  std::array<std::array<Eigen::VectorXcd, 5>, 2> zed;
  for (int l = 0; l < 2; ++l) {
    for (int i = 0; i < 5; ++i) {
      std::string s = "IIIII";
      s[static_cast<std::size_t>(i)] = 'Z';
      zed[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] =
          PauliOperator::from_string(s).apply(base[static_cast<std::size_t>(l)]);
    }
  }
  DenseTensor t({2, 2, 4, 4, 4, 4, 4});
  const double c = std::cos(params.theta);
  for (int l1 = 0; l1 < 2; ++l1) {
    for (int l2 = 0; l2 < 2; ++l2) {
      Eigen::VectorXcd acc =
          c * merge_copies(base[static_cast<std::size_t>(l1)],
                           base[static_cast<std::size_t>(l2)]);
      for (int k = 0; k < 20; ++k) {
        const auto [i, j] = theta_pair(k);
        acc += std::sin(table[static_cast<std::size_t>(k)]) *
               merge_copies(zed[static_cast<std::size_t>(l1)]
                               [static_cast<std::size_t>(i - 1)],
                            zed[static_cast<std::size_t>(l2)]
                               [static_cast<std::size_t>(j - 1)]);
      }
      cplx* dst = t.data() + (l1 * 2 + l2) * 1024;
      std::copy(acc.data(), acc.data() + 1024, dst);
    }
  }
  t.set_labels({"logical1", "logical2", "m1", "m2", "m3", "m4", "m5"});
  t.tags()["kind"] = "imperfect";
  return t;
}

// Five-leg deformed edge tensor with the logical inputs fixed to the given
// 2-dim logical states (default: both the code's zero word).
inline DenseTensor imperfect_tensor(const TensorParams& params,
                                    const Eigen::Vector2cd& logical1,
                                    const Eigen::Vector2cd& logical2,
                                    double tol = 1e-10) {
  const DenseTensor map = imperfect_tensor_map(params, tol);
  DenseTensor t = contracted_with_state(
      contracted_with_state(map, 0, logical1), 0, logical2);
  t.set_labels({"m1", "m2", "m3", "m4", "m5"});
  t.tags()["kind"] = "imperfect";
  return t;
}

inline DenseTensor imperfect_tensor(const TensorParams& params,
                                    double tol = 1e-10) {
  Eigen::Vector2cd zero;
  zero << 1.0, 0.0;
  return imperfect_tensor(params, zero, zero, tol);
}

struct IsometryReport {
  bool is_isometry = false;
  // Frobenius norm of R / scale - identity, with R the contraction of the
  // tensor against its conjugate over the complement of in_legs.
  double deviation = 0.0;
  // Trace(R) / dim: 1 for maps normalized as isometries, 1/dim for unit
  // states whose marginal is maximally mixed.
  double scale = 0.0;
};

// Checks whether the map from in_legs to the remaining legs is an isometry
// up to overall normalization.
inline IsometryReport check_isometry(const DenseTensor& t,
                                     const std::vector<int>& in_legs,
                                     double tol = 1e-10) {
  if (in_legs.empty()) {
    throw std::invalid_argument("check_isometry: empty leg set");
  }
  if (static_cast<int>(in_legs.size()) >= t.rank()) {
    throw std::invalid_argument("check_isometry: empty complement");
  }
  const Eigen::MatrixXcd m = t.matricized(in_legs);
  const Eigen::MatrixXcd r = m * m.adjoint();
  IsometryReport rep;
  rep.scale = r.trace().real() / static_cast<double>(r.rows());
  if (rep.scale <= 0.0) {
    rep.deviation = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.deviation =
      (r / rep.scale -
       Eigen::MatrixXcd::Identity(r.rows(), r.cols())).norm();
  rep.is_isometry = rep.deviation <= tol;
  return rep;
}

struct PermutationInvarianceReport {
  bool invariant = false;
  double worst_deviation = 0.0;
  std::vector<int> worst_subset;
};

// True iff every size-ell subset of legs passes the isometry check.
inline PermutationInvarianceReport check_permutation_invariance(
    const DenseTensor& t, int ell, double tol = 1e-10) {
  if (ell < 1 || ell >= t.rank()) {
    throw std::invalid_argument("check_permutation_invariance: bad ell");
  }
  PermutationInvarianceReport rep;
  rep.invariant = true;
  std::vector<int> subset(static_cast<std::size_t>(ell));
  // Iterate all combinations of ell legs out of rank.
  std::vector<int> idx(static_cast<std::size_t>(ell));
  for (int i = 0; i < ell; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    for (int i = 0; i < ell; ++i) {
      subset[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)];
    }
    const auto r = check_isometry(t, subset, tol);
    if (r.deviation > rep.worst_deviation) {
      rep.worst_deviation = r.deviation;
      rep.worst_subset = subset;
    }
    if (!r.is_isometry) rep.invariant = false;
    int pos = ell - 1;
    while (pos >= 0 &&
           idx[static_cast<std::size_t>(pos)] == t.rank() - ell + pos) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < ell; ++i) {
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return rep;
}

}  // namespace hmera

#endif  // HMERA_TENSOR_ZOO_HPP
