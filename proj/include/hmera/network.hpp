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

#ifndef HMERA_NETWORK_HPP
#define HMERA_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hmera/dense_tensor.hpp"
#include "hmera/tensor_zoo.hpp"
#include "hmera/tiling.hpp"

namespace hmera {

inline const double kPi = std::acos(-1.0);

// Default per-copy logical state cos(a)|0> + e^{ib} sin(a)|1> placed on the
// vertex and central tiles.
inline const double kDefaultBulkAlpha = kPi / 3.0;
inline const double kDefaultBulkBeta = 0.0;

// Logical-state configuration for the network's bulk legs. Edge-polygon
// tiles always carry the code's zero word on both copies: that choice is
// what keeps the deformed edge tensor a single-leg isometry.
struct BulkConfig {
  double alpha = kDefaultBulkAlpha;
  double beta = kDefaultBulkBeta;
  // Per-tile (alpha, beta) overrides for vertex/central tiles.
  std::map<int, std::pair<double, double>> tile_states;
  // Keep all logical legs open: contractions return encoding maps instead
  // of states.
  bool open_bulk_legs = false;
};

// A tiling with a tensor assigned to every tile: the central tile carries
// the two-copy deformed code state, edge polygons the deformed edge tensor,
// vertex polygons the two-copy code encoder. Tensors are normalized so each
// tile is an exact isometry from its inward legs (scale 1), hence the fully
// contracted boundary state has unit norm. Instances are immutable after
// configuration and safe to read concurrently.
class NetworkInstance {
 public:
  NetworkInstance(TilingGraph graph, TensorParams params, BulkConfig bulk)
      : graph_(std::move(graph)),
        params_(std::move(params)),
        bulk_(std::move(bulk)),
        active_(graph_.tiles().size(), 1) {
    if (std::abs(edge_normalization_deviation(params_)) > 1e-10) {
      throw std::invalid_argument(
          "NetworkInstance: edge tensor parameters are not normalized");
    }
    if (std::abs(top_normalization_deviation(params_)) > 1e-10) {
      throw std::invalid_argument(
          "NetworkInstance: central tensor parameters are not normalized");
    }
    for (const auto& [tile, state] : bulk_.tile_states) {
      check_tile_id(tile);
      if (graph_.tile(tile).role == TileRole::kEdgePolygon) {
        throw std::invalid_argument(
            "NetworkInstance: edge polygons keep the code zero word; "
            "per-tile logical states apply to vertex/central tiles only");
      }
    }
  }

  const TilingGraph& graph() const { return graph_; }
  const TensorParams& params() const { return params_; }
  const BulkConfig& bulk() const { return bulk_; }

  // Per-tile deformation-angle override. The override replaces the scalar
  // angle and resolves the pair table from it (an explicit global pair
  // table does not carry over to overridden tiles).
  void set_tile_theta(int tile, double theta) {
    check_tile_id(tile);
    if (graph_.tile(tile).role != TileRole::kEdgePolygon) {
      throw std::invalid_argument(
          "NetworkInstance: only edge polygons carry a deformation angle");
    }
    tile_thetas_[tile] = theta;
  }
  const std::map<int, double>& tile_thetas() const { return tile_thetas_; }
  double tile_theta(int tile) const {
    const auto it = tile_thetas_.find(tile);
    return it == tile_thetas_.end() ? params_.theta : it->second;
  }

  // Restricts contraction to a parent-closed subset of tiles; legs toward
  // inactive tiles become open boundary legs. Used to compare cone-based
  // results against brute-force contraction at tractable sizes.
  void restrict_to(const std::vector<int>& tiles) {
    std::vector<char> next(graph_.tiles().size(), 0);
    for (int t : tiles) {
      check_tile_id(t);
      next[static_cast<std::size_t>(t)] = 1;
    }
    if (tiles.empty() || !next[0]) {
      throw std::invalid_argument(
          "NetworkInstance: active set must contain the central tile");
    }
    for (int t : tiles) {
      for (int parent : graph_.parents(t)) {
        if (!next[static_cast<std::size_t>(parent)]) {
          throw std::invalid_argument(
              "NetworkInstance: active set must be closed under parents");
        }
      }
    }
    active_ = std::move(next);
  }

  bool is_active(int tile) const {
    check_tile_id(tile);
    return active_[static_cast<std::size_t>(tile)] != 0;
  }

  std::vector<int> active_tiles() const {
    std::vector<int> out;
    for (std::size_t t = 0; t < active_.size(); ++t) {
      if (active_[t]) out.push_back(static_cast<int>(t));
    }
    return out;
  }

  bool is_restricted() const {
    return std::find(active_.begin(), active_.end(), 0) != active_.end();
  }

  // Open physical slots of the active sub-network in (tile, leg) order;
  // coincides with the graph's cyclic boundary when every tile is active.
  std::vector<BoundarySlot> open_boundary() const {
    std::vector<BoundarySlot> out;
    for (int t : active_tiles()) {
      for (int leg = 0; leg < graph_.p(); ++leg) {
        const auto peer = graph_.peer(t, leg);
        if (!peer || !active_[static_cast<std::size_t>(peer->tile)]) {
          out.push_back({t, leg});
        }
      }
    }
    return out;
  }

  // The tile's assigned tensor. Physical legs come last and map one-to-one
  // onto the tile's leg slots; when bulk legs are open the two logical legs
  // come first. Normalization makes the map from inward legs an isometry.
  DenseTensor tile_tensor(int tile) const {
    check_tile_id(tile);
    const TileRole role = graph_.tile(tile).role;
    if (role == TileRole::kEdgePolygon) {
      TensorParams p = params_;
      const auto it = tile_thetas_.find(tile);
      if (it != tile_thetas_.end()) {
        p.theta = it->second;
        p.theta_ij.reset();
      }
      if (bulk_.open_bulk_legs) return imperfect_tensor_map(p).scaled(2.0);
      return imperfect_tensor(p).scaled(2.0);
    }
    DenseTensor pair = role == TileRole::kTop
                           ? two_copy_merged(top_tensor(params_))
                           : two_copy_merged(perfect_tensor());
    const double scale = role == TileRole::kVertexPolygon ? 4.0 : 1.0;
    if (bulk_.open_bulk_legs) return pair.scaled(scale);
    const auto it = bulk_.tile_states.find(tile);
    const double alpha = it == bulk_.tile_states.end() ? bulk_.alpha
                                                       : it->second.first;
    const double beta = it == bulk_.tile_states.end() ? bulk_.beta
                                                      : it->second.second;
    const Eigen::Vector2cd state = bulk_logical_state(alpha, beta);
    DenseTensor fixed = contracted_with_state(
        contracted_with_state(pair, 0, state), 0, state);
    return fixed.scaled(scale);
  }

 private:
  void check_tile_id(int tile) const {
    if (tile < 0 || tile >= static_cast<int>(graph_.tiles().size())) {
      throw std::out_of_range("NetworkInstance: bad tile id");
    }
  }

  TilingGraph graph_;
  TensorParams params_;
  BulkConfig bulk_;
  std::map<int, double> tile_thetas_;
  std::vector<char> active_;
};

inline NetworkInstance build_network(const TilingGraph& graph,
                                     const TensorParams& params = {},
                                     const BulkConfig& bulk = {}) {
  return NetworkInstance(graph, params, bulk);
}

namespace detail {

inline std::string slot_label(int tile, int leg) {
  return "s" + std::to_string(tile) + "_" + std::to_string(leg);
}

// Label shared by both endpoints of an edge: the parent-side slot (parents
// always have the smaller tile id).
inline std::string edge_label(const TilingGraph& g, int tile, int leg) {
  const auto peer = g.peer(tile, leg);
  if (!peer) return slot_label(tile, leg);
  return peer->tile < tile ? slot_label(peer->tile, peer->leg)
                           : slot_label(tile, leg);
}

// Tensor for one tile with physical legs labeled by slot (shared label on
// contracted edges) and bulk legs, if open, labeled per tile.
inline DenseTensor labeled_tile_tensor(const NetworkInstance& net, int tile) {
  DenseTensor t = net.tile_tensor(tile);
  const int physical = net.graph().p();
  const int offset = t.rank() - physical;
  std::vector<std::string> labels(static_cast<std::size_t>(t.rank()));
  for (int b = 0; b < offset; ++b) {
    labels[static_cast<std::size_t>(b)] =
        "k" + std::to_string(tile) + "_" + std::to_string(b);
  }
  for (int leg = 0; leg < physical; ++leg) {
    const auto peer = net.graph().peer(tile, leg);
    const bool contracted = peer && net.is_active(peer->tile);
    labels[static_cast<std::size_t>(offset + leg)] =
        contracted ? edge_label(net.graph(), tile, leg)
                   : slot_label(tile, leg);
  }
  t.set_labels(labels);
  return t;
}

inline std::size_t shared_label_count(const DenseTensor& a,
                                      const DenseTensor& b) {
  std::size_t n = 0;
  for (const auto& l : a.labels()) {
    if (std::find(b.labels().begin(), b.labels().end(), l) !=
        b.labels().end()) {
      ++n;
    }
  }
  return n;
}

}  // namespace detail

// Exact dense contraction of the active sub-network. The result has one
// dimension-4 leg per open_boundary() slot, in that order; with open bulk
// legs the two logical legs of every active tile follow, in tile order.
// Guarded to at most 4^12 output amplitudes.
inline DenseTensor contract_full(const NetworkInstance& net) {
  const auto boundary = net.open_boundary();
  double log_size = static_cast<double>(boundary.size()) * std::log(4.0);
  if (net.bulk().open_bulk_legs) {
    log_size += static_cast<double>(2 * net.active_tiles().size()) *
                std::log(2.0);
  }
  if (log_size > std::log(4.0) * 12.0 + 1e-9) {
    throw std::invalid_argument(
        "contract_full: output exceeds the 4^12 amplitude guard");
  }

  std::vector<DenseTensor> work;
  for (int t : net.active_tiles()) {
    work.push_back(detail::labeled_tile_tensor(net, t));
  }
  while (work.size() > 1) {
    std::size_t best_i = 0, best_j = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < work.size(); ++i) {
      for (std::size_t j = i + 1; j < work.size(); ++j) {
        const std::size_t shared = detail::shared_label_count(work[i],
                                                              work[j]);
        if (shared == 0) continue;
        const double cost =
            static_cast<double>(work[i].size()) *
            static_cast<double>(work[j].size()) /
            std::pow(16.0, static_cast<double>(shared));
        if (cost < best_cost) {
          best_cost = cost;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (!std::isfinite(best_cost)) {
      throw std::logic_error("contract_full: network is disconnected");
    }
    DenseTensor merged = contract_labeled(work[best_i], work[best_j]);
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(best_j));
    work[best_i] = std::move(merged);
  }

  DenseTensor state = std::move(work.front());
  std::vector<int> perm;
  for (const auto& slot : boundary) {
    perm.push_back(state.leg_of_label(detail::slot_label(slot.tile,
                                                         slot.leg)));
  }
  if (net.bulk().open_bulk_legs) {
    for (int t : net.active_tiles()) {
      for (int b = 0; b < 2; ++b) {
        perm.push_back(state.leg_of_label("k" + std::to_string(t) + "_" +
                                          std::to_string(b)));
      }
    }
  }
  return state.permuted(perm);
}

struct ReducedState {
  // Indices into open_boundary() defining the marginal, in caller order.
  std::vector<int> region;
  Eigen::MatrixXcd matrix;
  // Non-empty when the region was accepted but flagged (e.g. the sites are
  // not contiguous on the boundary cycle).
  std::string warning;
};

// Eigenvalues of a Hermitian (density) matrix, descending.
inline Eigen::VectorXd density_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      (m + m.adjoint()) / 2.0);
  Eigen::VectorXd vals = solver.eigenvalues();
  std::sort(vals.data(), vals.data() + vals.size(),
            [](double a, double b) { return a > b; });
  return vals;
}

// Boundary marginal computed by contracting only the ascending cone of the
// region: every tile outside the cone cancels against its conjugate through
// the isometry property, and a tile's legs that exit the cone are traced
// out inside that tile's one-tile channel kernel. Memory therefore scales
// with the cone's width, not the network size.
inline ReducedState reduced_density_matrix(const NetworkInstance& net,
                                           const std::vector<int>& region) {
  if (net.bulk().open_bulk_legs) {
    throw std::invalid_argument(
        "reduced_density_matrix: bulk legs must be fixed, not open");
  }
  const auto boundary = net.open_boundary();
  if (region.empty() || region.size() > 4) {
    throw std::invalid_argument(
        "reduced_density_matrix: region must hold 1..4 sites");
  }
  std::set<int> seen;
  for (int r : region) {
    if (r < 0 || r >= static_cast<int>(boundary.size())) {
      throw std::invalid_argument(
          "reduced_density_matrix: region index out of range");
    }
    if (!seen.insert(r).second) {
      throw std::invalid_argument(
          "reduced_density_matrix: duplicate region index");
    }
  }

  ReducedState out;
  out.region = region;
  if (!net.is_restricted()) {
    // Contiguity on the boundary cycle (well defined only for the full
    // network, where open_boundary() is the cyclic boundary).
    std::vector<int> sorted(region.begin(), region.end());
    std::sort(sorted.begin(), sorted.end());
    const int count = static_cast<int>(boundary.size());
    bool contiguous = false;
    for (std::size_t rot = 0; rot < sorted.size(); ++rot) {
      bool run = true;
      for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        const int a = sorted[(rot + k) % sorted.size()];
        const int b = sorted[(rot + k + 1) % sorted.size()];
        if ((a + 1) % count != b % count) run = false;
      }
      if (run) contiguous = true;
    }
    if (!contiguous) {
      out.warning =
          "region is not contiguous on the boundary; contracting the cone "
          "union";
    }
  }

  // Cone tiles, processed in ascending-layer order starting at the center.
  std::vector<int> region_tiles;
  std::set<std::pair<int, int>> region_slots;
  for (int r : region) {
    const auto& slot = boundary[static_cast<std::size_t>(r)];
    region_tiles.push_back(slot.tile);
    region_slots.insert({slot.tile, slot.leg});
  }
  const auto cone = net.graph().ascending_cone(region_tiles);
  const std::set<int> in_cone(cone.begin(), cone.end());
  std::vector<int> order(cone.begin(), cone.end());
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return net.graph().tile(a).layer < net.graph().tile(b).layer;
  });

  std::optional<DenseTensor> rho;
  for (int t : order) {
    DenseTensor tensor = net.tile_tensor(t);  // physical legs only
    const int inward = net.graph().inward_leg_count(t);
    std::vector<std::string> labels(static_cast<std::size_t>(tensor.rank()));
    std::vector<int> exits;
    for (int leg = 0; leg < net.graph().p(); ++leg) {
      const auto peer = net.graph().peer(t, leg);
      const bool is_region = region_slots.count({t, leg}) != 0;
      const bool keeps =
          leg < inward ||
          (peer && net.is_active(peer->tile) && in_cone.count(peer->tile)) ||
          is_region;
      if (!keeps) {
        exits.push_back(leg);
        continue;
      }
      labels[static_cast<std::size_t>(leg)] =
          leg < inward ? detail::edge_label(net.graph(), t, leg)
                       : detail::slot_label(t, leg);
    }
    tensor.set_labels(labels);

    // One-tile channel kernel: |T><T| with the exiting legs traced.
    DenseTensor kernel =
        exits.empty()
            ? outer(tensor, tensor.conjugated())
            : contract(tensor, exits, tensor.conjugated(), exits);
    std::vector<std::string> kept;
    for (const auto& l : labels) {
      if (!l.empty()) kept.push_back(l);
    }
    std::vector<std::string> kernel_labels = kept;
    for (const auto& l : kept) kernel_labels.push_back("*" + l);
    kernel.set_labels(kernel_labels);

    if (!rho) {
      rho = std::move(kernel);
    } else {
      rho = contract_labeled(*rho, kernel);
    }
  }

  if (!rho || rho->rank() != 2 * static_cast<int>(region.size())) {
    throw std::logic_error("reduced_density_matrix: cone left stray legs");
  }
  std::vector<int> perm;
  std::vector<int> rows;
  for (int r : region) {
    const auto& slot = boundary[static_cast<std::size_t>(r)];
    perm.push_back(rho->leg_of_label(detail::slot_label(slot.tile,
                                                        slot.leg)));
    rows.push_back(static_cast<int>(rows.size()));
  }
  for (int r : region) {
    const auto& slot = boundary[static_cast<std::size_t>(r)];
    perm.push_back(
        rho->leg_of_label("*" + detail::slot_label(slot.tile, slot.leg)));
  }
  const DenseTensor ordered = rho->permuted(perm);
  out.matrix = ordered.matricized(rows);
  return out;
}

struct ContractibilityReport {
  bool ok = true;
  double worst_deviation = 0.0;
  int worst_tile = -1;
};

// Verifies that every active tile, as assigned, is an exact scale-1
// isometry from its inward legs (the central tile, with no inward legs, is
// checked for unit norm instead).
inline ContractibilityReport local_contractibility(const NetworkInstance& net,
                                                   double tol = 1e-10) {
  ContractibilityReport rep;
  for (int t : net.active_tiles()) {
    const DenseTensor tensor = net.tile_tensor(t);
    const int physical_offset = tensor.rank() - net.graph().p();
    const int inward = net.graph().inward_leg_count(t);
    double deviation = 0.0;
    if (inward == 0 && !net.bulk().open_bulk_legs) {
      deviation = std::abs(tensor.norm() - 1.0);
    } else {
      std::vector<int> in_legs;
      for (int b = 0; b < physical_offset; ++b) in_legs.push_back(b);
      for (int leg = 0; leg < inward; ++leg) {
        in_legs.push_back(physical_offset + leg);
      }
      if (in_legs.empty()) {
        deviation = std::abs(tensor.norm() - 1.0);
      } else {
        const auto report = check_isometry(tensor, in_legs, tol);
        deviation = std::max(report.deviation,
                             std::abs(report.scale - 1.0));
      }
    }
    if (deviation > rep.worst_deviation) {
      rep.worst_deviation = deviation;
      rep.worst_tile = t;
    }
    if (deviation > tol) rep.ok = false;
  }
  return rep;
}

}  // namespace hmera

#endif  // HMERA_NETWORK_HPP
