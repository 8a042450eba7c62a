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

#ifndef HMERA_ANALYSIS_HPP
#define HMERA_ANALYSIS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hmera/network.hpp"
#include "hmera/pauli.hpp"
#include "hmera/superop.hpp"
#include "hmera/tiling.hpp"

namespace hmera {

// ---------------------------------------------------------------------------
// Boundary observables
// ---------------------------------------------------------------------------

// The fifteen traceless Hermitian products on one merged-copy qudit, labeled
// by one Pauli letter per copy ("XI", "XY", ...). All have operator norm 1.
inline const std::vector<std::string>& traceless_qudit_labels() {
  static const std::vector<std::string> labels = [] {
    std::vector<std::string> out;
    out.reserve(15);
    for (int a = 0; a < 16; ++a) {
      if (a == 0) continue;
      out.push_back({detail::pauli_letter(a / 4), detail::pauli_letter(a % 4)});
    }
    return out;
  }();
  return labels;
}

// Dense 4x4 operator for a two-letter qudit label, first copy first.
inline Eigen::Matrix4cd qudit_operator(const std::string& label) {
  if (label.size() != 2) {
    throw std::invalid_argument("qudit_operator: label needs two letters");
  }
  return PauliOperator::from_string(label).dense();
}

namespace detail {

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::int64_t r = 0; r < a.rows(); ++r) {
    for (std::int64_t c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

// Partial trace of a state on `sites` qudits down to the ascending index
// list `keep`. Site 0 is the most significant index digit, matching the
// ordering of reduced_density_matrix.
inline Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, int sites,
                                      const std::vector<int>& keep) {
  const std::int64_t dim = std::int64_t{1} << (2 * sites);
  if (rho.rows() != dim || rho.cols() != dim) {
    throw std::invalid_argument("partial_trace: matrix size mismatch");
  }
  std::vector<char> kept(static_cast<std::size_t>(sites), 0);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= sites ||
        (k > 0 && keep[k] <= keep[k - 1])) {
      throw std::invalid_argument("partial_trace: keep list must be an "
                                  "ascending subset of the sites");
    }
    kept[static_cast<std::size_t>(keep[k])] = 1;
  }
  std::vector<int> traced;
  for (int s = 0; s < sites; ++s) {
    if (!kept[static_cast<std::size_t>(s)]) traced.push_back(s);
  }
  const auto k = static_cast<int>(keep.size());
  const std::int64_t dk = std::int64_t{1} << (2 * k);
  const std::int64_t dt = std::int64_t{1} << (2 * traced.size());
  auto compose = [&](std::int64_t kept_index, std::int64_t traced_index) {
    std::int64_t full = 0;
    for (int s = 0; s < k; ++s) {
      const std::int64_t digit = (kept_index >> (2 * (k - 1 - s))) & 3;
      full |= digit << (2 * (sites - 1 - keep[static_cast<std::size_t>(s)]));
    }
    for (std::size_t s = 0; s < traced.size(); ++s) {
      const std::int64_t digit =
          (traced_index >> (2 * (traced.size() - 1 - s))) & 3;
      full |= digit << (2 * (sites - 1 - traced[s]));
    }
    return full;
  };
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (std::int64_t r = 0; r < dk; ++r) {
    for (std::int64_t c = 0; c < dk; ++c) {
      cplx sum = 0.0;
      for (std::int64_t m = 0; m < dt; ++m) {
        sum += rho(compose(r, m), compose(c, m));
      }
      out(r, c) = sum;
    }
  }
  return out;
}

// Largest singular value, via the Gram matrix of the smaller side.
inline double operator_norm(const Eigen::MatrixXcd& m) {
  const bool wide = m.cols() >= m.rows();
  const Eigen::MatrixXcd gram =
      wide ? Eigen::MatrixXcd(m * m.adjoint()) : Eigen::MatrixXcd(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

// Von Neumann entropy of a density matrix in nats.
inline double entropy_nats(const Eigen::MatrixXcd& rho) {
  const Eigen::VectorXd vals = density_eigenvalues(rho);
  double s = 0.0;
  for (std::int64_t k = 0; k < vals.size(); ++k) {
    if (vals[k] > 1e-14) s -= vals[k] * std::log(vals[k]);
  }
  return s;
}

inline bool proportional_to_identity(const Eigen::MatrixXcd& o) {
  const Eigen::MatrixXcd rest =
      o - (o.trace() / static_cast<double>(o.rows())) *
              Eigen::MatrixXcd::Identity(o.rows(), o.cols());
  return rest.cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Two-point functions
// ---------------------------------------------------------------------------

struct CorrelatorResult {
  int site_i = 0;
  int site_j = 0;
  std::string op_a;
  std::string op_b;
  // <O_A O_B> on the boundary state.
  cplx value{0.0, 0.0};
  // <O_A O_B> - <O_A><O_B>.
  cplx connected{0.0, 0.0};
  // Cyclic distance between the sites along the open boundary.
  int separation = 0;
};

// Connected two-point function of single-qudit operators at boundary sites
// i != j, computed from the joint causal-cone marginal of the pair. An
// operator proportional to the identity has an identically zero connected
// part, which is returned as an exact zero rather than rounding noise.
inline CorrelatorResult connected_correlator(const NetworkInstance& net,
                                             int i, int j,
                                             const Eigen::Matrix4cd& op_a,
                                             const Eigen::Matrix4cd& op_b,
                                             std::string label_a = "",
                                             std::string label_b = "") {
  if (i == j) {
    throw std::invalid_argument("connected_correlator: sites must differ");
  }
  const ReducedState pair = reduced_density_matrix(net, {i, j});
  const Eigen::MatrixXcd rho_i = detail::partial_trace(pair.matrix, 2, {0});
  const Eigen::MatrixXcd rho_j = detail::partial_trace(pair.matrix, 2, {1});

  CorrelatorResult res;
  res.site_i = i;
  res.site_j = j;
  res.op_a = std::move(label_a);
  res.op_b = std::move(label_b);
  res.value = (pair.matrix * detail::kron(op_a, op_b)).trace();
  if (detail::proportional_to_identity(op_a) ||
      detail::proportional_to_identity(op_b)) {
    res.connected = 0.0;
  } else {
    res.connected = res.value -
                    (rho_i * op_a).trace() * (rho_j * op_b).trace();
  }
  const auto n = static_cast<int>(net.open_boundary().size());
  const int d = std::abs(i - j);
  res.separation = std::min(d, n - d);
  return res;
}

// Boundary site pairs whose ascending cones stay disjoint for at least
// `min_disjoint_layers` layers before meeting; the separation regime where
// insertions must pass through a full coarse-graining step.
inline std::vector<std::pair<int, int>> well_separated_pairs(
    const TilingGraph& g, int min_disjoint_layers = 2) {
  const auto n = static_cast<int>(g.boundary().size());
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (layers_for_separation(i, j, g).meeting_depth >=
          min_disjoint_layers) {
        out.emplace_back(i, j);
      }
    }
  }
  return out;
}

// Connected correlators for every (pair, label_a, label_b) combination,
// ordered by pair then by label indices. `labels` defaults to the fifteen
// traceless qudit operators; the pair marginal is computed once per site
// pair and jobs > 1 distributes pairs over threads with identical output.
inline std::vector<CorrelatorResult> correlator_scan(
    const NetworkInstance& net, const std::vector<std::pair<int, int>>& pairs,
    std::vector<std::string> labels = {}, int jobs = 1) {
  if (jobs < 1) {
    throw std::invalid_argument("correlator_scan: jobs must be >= 1");
  }
  if (labels.empty()) labels = traceless_qudit_labels();
  std::vector<Eigen::Matrix4cd> ops;
  ops.reserve(labels.size());
  for (const auto& l : labels) ops.push_back(qudit_operator(l));
  std::vector<char> identity_like(labels.size());
  for (std::size_t a = 0; a < ops.size(); ++a) {
    identity_like[a] = detail::proportional_to_identity(ops[a]) ? 1 : 0;
  }
  std::vector<Eigen::MatrixXcd> joint(ops.size() * ops.size());
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = 0; b < ops.size(); ++b) {
      joint[a * ops.size() + b] = detail::kron(ops[a], ops[b]);
    }
  }

  const auto n = static_cast<int>(net.open_boundary().size());
  for (const auto& [i, j] : pairs) {
    if (i == j) {
      throw std::invalid_argument("correlator_scan: sites must differ");
    }
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw std::invalid_argument("correlator_scan: site out of range");
    }
  }
  const std::size_t per = labels.size() * labels.size();
  std::vector<CorrelatorResult> out(pairs.size() * per);
  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t p = first; p < pairs.size(); p += stride) {
      const auto [i, j] = pairs[p];
      const ReducedState pair = reduced_density_matrix(net, {i, j});
      const Eigen::MatrixXcd rho_i =
          detail::partial_trace(pair.matrix, 2, {0});
      const Eigen::MatrixXcd rho_j =
          detail::partial_trace(pair.matrix, 2, {1});
      std::vector<cplx> mean_i(ops.size()), mean_j(ops.size());
      for (std::size_t a = 0; a < ops.size(); ++a) {
        mean_i[a] = (rho_i * ops[a]).trace();
        mean_j[a] = (rho_j * ops[a]).trace();
      }
      const int d = std::abs(i - j);
      const int sep = std::min(d, n - d);
      for (std::size_t a = 0; a < ops.size(); ++a) {
        for (std::size_t b = 0; b < ops.size(); ++b) {
          CorrelatorResult& res = out[p * per + a * ops.size() + b];
          res.site_i = i;
          res.site_j = j;
          res.op_a = labels[a];
          res.op_b = labels[b];
          res.separation = sep;
          res.value = (pair.matrix * joint[a * ops.size() + b]).trace();
          res.connected = (identity_like[a] || identity_like[b])
                              ? cplx(0.0, 0.0)
                              : res.value - mean_i[a] * mean_j[b];
        }
      }
    }
  };
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), pairs.size());
  if (workers <= 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back(run, w, workers);
    }
    for (auto& t : threads) t.join();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Power-law fit
// ---------------------------------------------------------------------------

struct PowerLawFit {
  // |connected| ~ prefactor / separation^exponent.
  double exponent = 0.0;
  double prefactor = 0.0;
  // Root-mean-square residual of the log-log least-squares fit.
  double residual = 0.0;
  // Every connected value was zero within zero_tol: nothing to fit.
  bool trivial = false;
  int points = 0;
  int distinct_separations = 0;
};

// Least-squares fit of log |connected| against log separation. Values below
// zero_tol are dropped; an input with nothing above it yields the trivial
// report, while fewer than four distinct surviving separations throw.
inline PowerLawFit power_law_fit(const std::vector<CorrelatorResult>& results,
                                 double zero_tol = 1e-12) {
  std::vector<std::pair<double, double>> pts;
  std::set<int> seps;
  for (const auto& r : results) {
    const double c = std::abs(r.connected);
    if (c <= zero_tol || r.separation < 1) continue;
    pts.emplace_back(std::log(static_cast<double>(r.separation)),
                     std::log(c));
    seps.insert(r.separation);
  }
  PowerLawFit fit;
  if (pts.empty()) {
    fit.trivial = true;
    return fit;
  }
  if (seps.size() < 4) {
    throw std::invalid_argument(
        "power_law_fit: need at least 4 distinct separations with nonzero "
        "connected values");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const auto n = static_cast<double>(pts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double rss = 0.0;
  for (const auto& [x, y] : pts) {
    const double e = y - (slope * x + intercept);
    rss += e * e;
  }
  fit.exponent = -slope;
  fit.prefactor = std::exp(intercept);
  fit.residual = std::sqrt(rss / n);
  fit.points = static_cast<int>(pts.size());
  fit.distinct_separations = static_cast<int>(seps.size());
  return fit;
}

// ---------------------------------------------------------------------------
// Mutual-information bound
// ---------------------------------------------------------------------------

struct MutualInformationCheck {
  // (1/2) |<O_A O_B> - <O_A><O_B>|^2, the quantity the bound controls.
  double lhs = 0.0;
  // S(A) + S(B) - S(AB) in nats.
  double mutual_information = 0.0;
  bool holds = false;
  double slack = 0.0;
  cplx connected{0.0, 0.0};
};

// Checks (1/2) (connected correlator)^2 <= I(A:B) for observables with
// operator norm at most 1 on disjoint boundary regions A and B. The three
// marginals come from one joint cone contraction, so the inputs stay
// mutually consistent.
inline MutualInformationCheck mutual_information_check(
    const NetworkInstance& net, const std::vector<int>& region_a,
    const std::vector<int>& region_b, const Eigen::MatrixXcd& op_a,
    const Eigen::MatrixXcd& op_b) {
  if (region_a.empty() || region_b.empty()) {
    throw std::invalid_argument(
        "mutual_information_check: regions must be non-empty");
  }
  if (region_a.size() + region_b.size() > 4) {
    throw std::invalid_argument(
        "mutual_information_check: joint region exceeds four sites");
  }
  std::set<int> seen(region_a.begin(), region_a.end());
  for (int s : region_b) seen.insert(s);
  if (seen.size() != region_a.size() + region_b.size()) {
    throw std::invalid_argument(
        "mutual_information_check: regions must be disjoint");
  }
  const std::int64_t da = std::int64_t{1} << (2 * region_a.size());
  const std::int64_t db = std::int64_t{1} << (2 * region_b.size());
  if (op_a.rows() != da || op_a.cols() != da || op_b.rows() != db ||
      op_b.cols() != db) {
    throw std::invalid_argument(
        "mutual_information_check: operator dimensions do not match the "
        "regions");
  }
  if (detail::operator_norm(op_a) > 1.0 + 1e-9 ||
      detail::operator_norm(op_b) > 1.0 + 1e-9) {
    throw std::invalid_argument(
        "mutual_information_check: operator norm exceeds 1");
  }

  std::vector<int> region = region_a;
  region.insert(region.end(), region_b.begin(), region_b.end());
  const ReducedState joint = reduced_density_matrix(net, region);
  std::vector<int> keep_a, keep_b;
  for (std::size_t k = 0; k < region.size(); ++k) {
    (k < region_a.size() ? keep_a : keep_b).push_back(static_cast<int>(k));
  }
  const auto sites = static_cast<int>(region.size());
  const Eigen::MatrixXcd rho_a =
      detail::partial_trace(joint.matrix, sites, keep_a);
  const Eigen::MatrixXcd rho_b =
      detail::partial_trace(joint.matrix, sites, keep_b);

  MutualInformationCheck res;
  res.connected = (joint.matrix * detail::kron(op_a, op_b)).trace() -
                  (rho_a * op_a).trace() * (rho_b * op_b).trace();
  res.lhs = 0.5 * std::norm(res.connected);
  res.mutual_information = detail::entropy_nats(rho_a) +
                           detail::entropy_nats(rho_b) -
                           detail::entropy_nats(joint.matrix);
  res.holds = res.lhs <= res.mutual_information + 1e-12;
  res.slack = res.mutual_information - res.lhs;
  return res;
}

// ---------------------------------------------------------------------------
// Top-anchored vs fixed-point expectations
// ---------------------------------------------------------------------------

namespace detail {

// Stationary density of the descending adjoint of a square single-qudit
// coarse-graining map: the eigenoperator of matrix^dag at eigenvalue 1,
// Hermitized and normalized to unit trace.
inline Eigen::Matrix4cd descending_fixed_point(const SuperOperator& channel) {
  if (channel.in_dim != 4 || channel.out_dim != 4 ||
      channel.matrix.rows() != 16 || channel.matrix.cols() != 16) {
    throw std::invalid_argument(
        "descending_fixed_point: need a square single-qudit map");
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(
      channel.matrix.adjoint());
  std::int64_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < solver.eigenvalues().size(); ++k) {
    const double dist = std::abs(solver.eigenvalues()[k] - cplx(1.0, 0.0));
    if (dist < best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  if (best_dist > 1e-8) {
    throw std::runtime_error(
        "descending_fixed_point: the map has no unit eigenvalue");
  }
  const Eigen::VectorXcd coeffs = solver.eigenvectors().col(best);
  const auto basis = qudit_basis_dense();
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  for (int k = 0; k < 16; ++k) rho += coeffs[k] * basis[static_cast<std::size_t>(k)];
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double tr = rho.trace().real();
  if (std::abs(tr) < 1e-12) {
    throw std::runtime_error(
        "descending_fixed_point: fixed point has zero trace");
  }
  return rho / tr;
}

}  // namespace detail

struct FixedPointReport {
  // Expectation in the exact single-site marginal (anchored at the apex).
  cplx top_value{0.0, 0.0};
  // Expectation in the stationary density of the site's descending map.
  cplx fixed_point_value{0.0, 0.0};
  double discrepancy = 0.0;
  Eigen::Matrix4cd fixed_point = Eigen::Matrix4cd::Zero();
};

// Compares the exact one-site expectation at an edge-polygon boundary site
// against the stationary density of that site's own descending channel. The
// channel is resolved from the tile's scalar deformation angle (explicit
// per-pair angle tables are not carried into the channel).
inline FixedPointReport fixed_point_report(const NetworkInstance& net,
                                           int site,
                                           const Eigen::Matrix4cd& op) {
  const auto boundary = net.open_boundary();
  if (site < 0 || site >= static_cast<int>(boundary.size())) {
    throw std::invalid_argument("fixed_point_report: site out of range");
  }
  const BoundarySlot slot = boundary[static_cast<std::size_t>(site)];
  if (net.graph().tile(slot.tile).role != TileRole::kEdgePolygon) {
    throw std::invalid_argument(
        "fixed_point_report: available for edge-polygon sites only");
  }
  const SuperOperator channel =
      imperfect_superop(net.tile_theta(slot.tile), slot.leg + 1);
  FixedPointReport rep;
  rep.fixed_point = detail::descending_fixed_point(channel);
  const ReducedState one = reduced_density_matrix(net, {site});
  rep.top_value = (one.matrix * op).trace();
  rep.fixed_point_value = (rep.fixed_point * op).trace();
  rep.discrepancy = std::abs(rep.top_value - rep.fixed_point_value);
  return rep;
}

// ---------------------------------------------------------------------------
// Operator pushing
// ---------------------------------------------------------------------------

struct BoundaryLetter {
  // Index into open_boundary().
  int slot = 0;
  BoundarySlot location;
  // One Pauli letter per copy, first copy first.
  std::string letters;
};

struct PushResult {
  int source_tile = 0;
  std::string op;
  // Exact power of i relating the boundary letters to the inserted logical
  // operator.
  cplx phase{1.0, 0.0};
  std::vector<BoundaryLetter> boundary_support;
  // Sum over rewritten tiles of the defect norms below; zero whenever every
  // rewrite used an exact invariance of the tile it crossed.
  double residual_error = 0.0;
  // Largest singular value of each tile's substitution defect, read as a
  // map from the tile's input legs. The sum upper-bounds the Frobenius
  // error of the boundary action against the inserted logical action.
  std::map<int, double> tile_defects;
  std::string residual_note;
};

namespace detail {

inline char letter_at(const PauliOperator& p, int q) {
  const bool x = p.x_bit(q);
  const bool z = p.z_bit(q);
  return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
}

// Phase of p relative to the plain letter operator with the same letters
// (the form rebuilt by from_string, which carries one factor of i per Y):
// p = i^excess * letters.
inline int letter_phase_excess(const PauliOperator& p) {
  int y = 0;
  for (int q = 0; q < p.n_qubits(); ++q) {
    if (letter_at(p, q) == 'Y') ++y;
  }
  return (((p.phase_exponent() - y) % 4) + 4) % 4;
}

// Signed five-qubit invariance elements used to clean inward legs: the
// stabilizer group, optionally extended by the logical-Z coset (exact on
// the fixed zero word at every deformation angle).
inline std::vector<PauliOperator> cleaning_elements(bool extend_with_logical_z) {
  const StabilizerCode code = five_qubit_code();
  std::vector<PauliOperator> out = code.group();
  if (extend_with_logical_z) {
    const std::size_t base = out.size();
    out.reserve(2 * base);
    for (std::size_t k = 0; k < base; ++k) {
      out.push_back(out[k] * code.logical_ops[0].second);
    }
  }
  return out;
}

// Embeds per-copy five-qubit operators into a tile-state operator: copy c's
// letter for leg p sits at qubit offset + 2p + c, with offset covering the
// tile's open logical qubits (2) when bulk legs are open.
inline PauliOperator interleaved_pair(const PauliOperator& copy1,
                                      const PauliOperator& copy2,
                                      int offset) {
  std::string s(static_cast<std::size_t>(offset) + 10, 'I');
  for (int p = 0; p < 5; ++p) {
    s[static_cast<std::size_t>(offset + 2 * p)] = letter_at(copy1, p);
    s[static_cast<std::size_t>(offset + 2 * p + 1)] = letter_at(copy2, p);
  }
  const int k = letter_phase_excess(copy1) + letter_phase_excess(copy2);
  return PauliOperator::from_string(s).with_extra_phase(k % 4);
}

// Largest singular value of a tile defect read as a map from the first
// `lead` index values (open logical legs plus inward legs) to the rest.
inline double defect_map_norm(const Eigen::VectorXcd& vec, std::int64_t lead) {
  if (lead <= 1) return vec.norm();
  const std::int64_t cols = vec.size() / lead;
  Eigen::MatrixXcd m(lead, cols);
  for (std::int64_t r = 0; r < lead; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) {
      m(r, c) = vec[r * cols + c];
    }
  }
  return operator_norm(m);
}

// Two-copy product state on five merged qudits: copy `a` occupies the even
// qubit positions (the high bit of every qudit), copy `b` the odd ones.
inline Eigen::VectorXcd interleaved_product_state(const Eigen::VectorXcd& a,
                                                  const Eigen::VectorXcd& b) {
  if (a.size() != 32 || b.size() != 32) {
    throw std::invalid_argument(
        "interleaved_product_state: need five-qubit factors");
  }
  Eigen::VectorXcd out(1024);
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      int idx = 0;
      for (int k = 0; k < 5; ++k) {
        idx |= ((i >> (4 - k)) & 1) << (9 - 2 * k);
        idx |= ((j >> (4 - k)) & 1) << (8 - 2 * k);
      }
      out[idx] = a[i] * b[j];
    }
  }
  return out;
}

}  // namespace detail

// Pushes a logical operator inserted at a bulk tile outward to the open
// boundary. The insertion acts as the same logical letter on both copies;
// each traversed tile rewrites the letters arriving on its inward legs as
// letters on its outward legs times an invariance element of its assigned
// tensor, choosing the candidate with the smallest defect on the actual
// (deformed) tensor, then the smallest outward support. Cleaning uses the
// signed stabilizer group per copy; tiles holding the fixed code zero word
// (edge polygons with bulk legs closed) also admit the logical-Z coset,
// which is exact at every deformation angle. With bulk legs open the
// result relates (boundary letters) o (encoding map) to (encoding map) o
// (inserted logical); with fixed bulk states it relates boundary letters
// applied to the state to the state with the insertion applied.
inline PushResult push_operator(const NetworkInstance& net, int bulk_site,
                                const std::string& logical_op) {
  const TilingGraph& graph = net.graph();
  if (bulk_site < 0 ||
      bulk_site >= static_cast<int>(graph.tiles().size())) {
    throw std::invalid_argument("push_operator: bad tile id");
  }
  if (!net.is_active(bulk_site)) {
    throw std::invalid_argument("push_operator: source tile is not active");
  }
  int letter_index = -1;
  if (logical_op == "identity") letter_index = 0;
  if (logical_op == "Xbar") letter_index = 1;
  if (logical_op == "Ybar") letter_index = 2;
  if (logical_op == "Zbar") letter_index = 3;
  if (letter_index < 0) {
    throw std::invalid_argument(
        "push_operator: logical operator must be identity, Xbar, Ybar or "
        "Zbar");
  }

  PushResult res;
  res.source_tile = bulk_site;
  res.op = logical_op;
  res.residual_note =
      "sum over rewritten tiles of the largest singular value of the local "
      "substitution defect; upper-bounds the boundary-action error";
  if (letter_index == 0) return res;

  const bool open = net.bulk().open_bulk_legs;
  const int offset = open ? 2 : 0;
  const StabilizerCode code = five_qubit_code();
  const PauliOperator& xbar = code.logical_ops[0].first;
  const PauliOperator& zbar = code.logical_ops[0].second;
  const PauliOperator rep = letter_index == 1
                                ? xbar
                                : letter_index == 3
                                      ? zbar
                                      : (xbar * zbar).with_extra_phase(1);
  const auto plain = detail::cleaning_elements(false);
  const auto extended = detail::cleaning_elements(true);

  int phase_exp = (2 * detail::letter_phase_excess(rep)) % 4;
  std::map<int, std::string> pending;
  {
    std::string s(10, 'I');
    for (int p = 0; p < 5; ++p) {
      s[static_cast<std::size_t>(2 * p)] = detail::letter_at(rep, p);
      s[static_cast<std::size_t>(2 * p + 1)] = detail::letter_at(rep, p);
    }
    pending.emplace(bulk_site, std::move(s));
  }

  // Defect of the first rewrite: the true insertion against the claimed
  // two-copy logical representative on the source tile's qudit legs.
  {
    const TileRole role = graph.tile(bulk_site).role;
    const Eigen::VectorXcd tvec = net.tile_tensor(bulk_site).vectorized();
    const PauliOperator claimed = detail::interleaved_pair(rep, rep, offset);
    Eigen::VectorXcd truth;
    const char letter = "IXYZ"[letter_index];
    if (open) {
      std::string s(static_cast<std::size_t>(offset) + 10, 'I');
      s[0] = letter;
      s[1] = letter;
      truth = PauliOperator::from_string(s).apply(tvec);
    } else {
      const Eigen::Matrix2cd sig =
          PauliOperator::from_string(std::string(1, letter)).dense();
      if (role == TileRole::kEdgePolygon) {
        TensorParams p = net.params();
        const auto it = net.tile_thetas().find(bulk_site);
        if (it != net.tile_thetas().end()) {
          p.theta = it->second;
          p.theta_ij.reset();
        }
        Eigen::Vector2cd zero;
        zero << 1.0, 0.0;
        const Eigen::Vector2cd moved = sig * zero;
        truth = imperfect_tensor(p, moved, moved).scaled(2.0).vectorized();
      } else {
        const Eigen::MatrixXcd enc = role == TileRole::kTop
                                         ? top_encoding_matrix(net.params())
                                         : code.encoding_map();
        const auto it = net.bulk().tile_states.find(bulk_site);
        const double alpha = it == net.bulk().tile_states.end()
                                 ? net.bulk().alpha
                                 : it->second.first;
        const double beta = it == net.bulk().tile_states.end()
                                ? net.bulk().beta
                                : it->second.second;
        const Eigen::Vector2cd moved = sig * bulk_logical_state(alpha, beta);
        const Eigen::VectorXcd v = enc * moved;
        const double scale = role == TileRole::kVertexPolygon ? 4.0 : 1.0;
        truth = scale * detail::interleaved_product_state(v, v);
      }
    }
    const Eigen::VectorXcd defect = truth - claimed.apply(tvec);
    const std::int64_t lead = std::int64_t{open ? 4 : 1}
                              << (2 * graph.inward_leg_count(bulk_site));
    const double d = detail::defect_map_norm(defect, lead);
    res.residual_error += d;
    res.tile_defects[bulk_site] += d;
  }

  const auto boundary = net.open_boundary();
  auto slot_of = [&](int tile, int leg) {
    for (std::size_t s = 0; s < boundary.size(); ++s) {
      if (boundary[s].tile == tile && boundary[s].leg == leg) {
        return static_cast<int>(s);
      }
    }
    throw std::logic_error("push_operator: emitted leg is not an open slot");
  };

  // Children always carry larger ids than their parents, so draining the
  // smallest pending id processes tiles only after all their letters have
  // arrived.
  while (!pending.empty()) {
    const int t = pending.begin()->first;
    const std::string letters = pending.begin()->second;
    pending.erase(pending.begin());

    const TileRole role = graph.tile(t).role;
    const int inward = graph.inward_leg_count(t);
    std::string s1(5, 'I'), s2(5, 'I');
    for (int p = 0; p < 5; ++p) {
      s1[static_cast<std::size_t>(p)] = letters[static_cast<std::size_t>(2 * p)];
      s2[static_cast<std::size_t>(p)] =
          letters[static_cast<std::size_t>(2 * p + 1)];
    }
    const PauliOperator p1 = PauliOperator::from_string(s1);
    const PauliOperator p2 = PauliOperator::from_string(s2);

    const auto& cands =
        (role == TileRole::kEdgePolygon && !open) ? extended : plain;
    std::vector<std::size_t> match1, match2;
    for (std::size_t k = 0; k < cands.size(); ++k) {
      bool ok1 = true, ok2 = true;
      for (int leg = 0; leg < inward; ++leg) {
        const char c = detail::letter_at(cands[k], leg);
        ok1 = ok1 && c == s1[static_cast<std::size_t>(leg)];
        ok2 = ok2 && c == s2[static_cast<std::size_t>(leg)];
      }
      if (ok1) match1.push_back(k);
      if (ok2) match2.push_back(k);
    }
    if (match1.empty() || match2.empty()) {
      throw std::runtime_error(
          "push_operator: no pushing path (no invariance element matches "
          "the inward letters)");
    }

    const Eigen::VectorXcd tvec = net.tile_tensor(t).vectorized();
    const Eigen::VectorXcd before =
        detail::interleaved_pair(p1, p2, offset).apply(tvec);
    const std::int64_t lead = std::int64_t{open ? 4 : 1} << (2 * inward);

    bool have = false;
    double best_defect = 0.0;
    int best_weight = 0;
    PauliOperator best_a(5), best_b(5);
    for (const std::size_t a : match1) {
      for (const std::size_t b : match2) {
        const PauliOperator q1 = p1 * cands[a];
        const PauliOperator q2 = p2 * cands[b];
        int weight = 0;
        for (int leg = inward; leg < 5; ++leg) {
          if (detail::letter_at(q1, leg) != 'I' ||
              detail::letter_at(q2, leg) != 'I') {
            ++weight;
          }
        }
        const Eigen::VectorXcd defect =
            before - detail::interleaved_pair(q1, q2, offset).apply(tvec);
        const double d = detail::defect_map_norm(defect, lead);
        const bool better =
            !have || d < best_defect - 1e-12 ||
            (d < best_defect + 1e-12 && weight < best_weight);
        if (better) {
          have = true;
          best_defect = d;
          best_weight = weight;
          best_a = q1;
          best_b = q2;
        }
      }
    }

    res.residual_error += best_defect;
    res.tile_defects[t] += best_defect;
    phase_exp = (phase_exp + detail::letter_phase_excess(best_a) +
                 detail::letter_phase_excess(best_b)) %
                4;

    for (int leg = inward; leg < 5; ++leg) {
      const char c1 = detail::letter_at(best_a, leg);
      const char c2 = detail::letter_at(best_b, leg);
      if (c1 == 'I' && c2 == 'I') continue;
      const auto peer = graph.peer(t, leg);
      if (peer && net.is_active(peer->tile)) {
        auto slot = pending.try_emplace(peer->tile, std::string(10, 'I')).first;
        slot->second[static_cast<std::size_t>(2 * peer->leg)] = c1;
        slot->second[static_cast<std::size_t>(2 * peer->leg + 1)] = c2;
        // Transferring letters across a contracted bond transposes them,
        // which flips the sign of every Y.
        if (c1 == 'Y') phase_exp = (phase_exp + 2) % 4;
        if (c2 == 'Y') phase_exp = (phase_exp + 2) % 4;
      } else {
        res.boundary_support.push_back(
            {slot_of(t, leg), {t, leg}, std::string{c1, c2}});
      }
    }
  }

  std::sort(res.boundary_support.begin(), res.boundary_support.end(),
            [](const BoundaryLetter& a, const BoundaryLetter& b) {
              return a.slot < b.slot;
            });
  static const cplx kPhases[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0},
                                  {0.0, -1.0}};
  res.phase = kPhases[((phase_exp % 4) + 4) % 4];
  return res;
}

}  // namespace hmera

#endif  // HMERA_ANALYSIS_HPP
