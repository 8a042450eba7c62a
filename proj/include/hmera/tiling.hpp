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

#ifndef HMERA_TILING_HPP
#define HMERA_TILING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hmera {

// Role of a tile in the layered tiling: the central tile, an edge polygon
// (one edge to the previous layer), or a vertex polygon (two edges to the
// previous layer, closing a vertex).
enum class TileRole { kTop, kEdgePolygon, kVertexPolygon };

struct Tile {
  int id = 0;
  int layer = 0;
  TileRole role = TileRole::kTop;
};

struct TilingEdge {
  int tile_a = 0;
  int leg_a = 0;
  int tile_b = 0;
  int leg_b = 0;
};

struct BoundarySlot {
  int tile = 0;
  int leg = 0;
};

// Dual graph of a layered {p,q} tiling disk. Legs are numbered 0..p-1
// counterclockwise per tile, with the inward legs first (leg 0 for edge
// polygons; legs 0 and 1 for vertex polygons). Immutable once built.
class TilingGraph {
 public:
  TilingGraph(int p, int q, int layers) : p_(p), q_(q), layers_(layers) {}

  int p() const { return p_; }
  int q() const { return q_; }
  int layers() const { return layers_; }

  const std::vector<Tile>& tiles() const { return tiles_; }
  const std::vector<TilingEdge>& edges() const { return edges_; }
  const std::vector<BoundarySlot>& boundary() const { return boundary_; }

  const Tile& tile(int id) const {
    return tiles_.at(static_cast<std::size_t>(id));
  }

  // Peer slot across the edge at (tile, leg); nullopt for boundary slots.
  std::optional<BoundarySlot> peer(int tile, int leg) const {
    const std::int64_t v = slot_peer_.at(slot_index(tile, leg));
    if (v < 0) return std::nullopt;
    return BoundarySlot{static_cast<int>(v / p_), static_cast<int>(v % p_)};
  }

  bool is_boundary_slot(int tile, int leg) const {
    return slot_peer_.at(slot_index(tile, leg)) < 0;
  }

  // Number of legs pointing to the previous layer.
  int inward_leg_count(int tile_id) const {
    switch (tile(tile_id).role) {
      case TileRole::kTop: return 0;
      case TileRole::kEdgePolygon: return 1;
      case TileRole::kVertexPolygon: return 2;
    }
    return 0;
  }

  // Tiles one layer inward, in leg order.
  std::vector<int> parents(int tile_id) const {
    std::vector<int> out;
    for (int leg = 0; leg < inward_leg_count(tile_id); ++leg) {
      const auto pr = peer(tile_id, leg);
      if (!pr) throw std::logic_error("TilingGraph: inward leg unconnected");
      out.push_back(pr->tile);
    }
    return out;
  }

  // All tiles in the ascending cone of the given tiles (inward closure,
  // including the inputs), as a sorted id list.
  std::vector<int> ascending_cone(const std::vector<int>& start) const {
    std::set<int> seen(start.begin(), start.end());
    std::vector<int> work(start.begin(), start.end());
    while (!work.empty()) {
      const int t = work.back();
      work.pop_back();
      for (int parent : parents(t)) {
        if (seen.insert(parent).second) work.push_back(parent);
      }
    }
    return {seen.begin(), seen.end()};
  }

 private:
  friend TilingGraph build_tiling(int p, int q, int layers);

  std::size_t slot_index(int tile, int leg) const {
    if (tile < 0 || tile >= static_cast<int>(tiles_.size()) || leg < 0 ||
        leg >= p_) {
      throw std::out_of_range("TilingGraph: bad slot");
    }
    return static_cast<std::size_t>(tile) * static_cast<std::size_t>(p_) +
           static_cast<std::size_t>(leg);
  }

  int add_tile(int layer, TileRole role) {
    const int id = static_cast<int>(tiles_.size());
    tiles_.push_back({id, layer, role});
    slot_peer_.resize(slot_peer_.size() + static_cast<std::size_t>(p_), -1);
    return id;
  }

  void connect(int tile_a, int leg_a, int tile_b, int leg_b) {
    edges_.push_back({tile_a, leg_a, tile_b, leg_b});
    slot_peer_[slot_index(tile_a, leg_a)] =
        static_cast<std::int64_t>(tile_b) * p_ + leg_b;
    slot_peer_[slot_index(tile_b, leg_b)] =
        static_cast<std::int64_t>(tile_a) * p_ + leg_a;
  }

  int p_;
  int q_;
  int layers_;
  std::vector<Tile> tiles_;
  std::vector<TilingEdge> edges_;
  std::vector<BoundarySlot> boundary_;
  std::vector<std::int64_t> slot_peer_;  // tile*p + leg -> peer slot or -1
};

// Grows the layered dual graph outward from the central tile. Each
// generation: boundary vertices incident to q-1 tiles are closed by a vertex
// polygon consuming their two flanking legs; every remaining boundary leg
// receives an edge polygon. Layer index equals dual-graph distance from the
// central tile.
inline TilingGraph build_tiling(int p, int q, int layers) {
  if ((static_cast<long long>(p) - 2) * (q - 2) <= 4) {
    throw std::invalid_argument("build_tiling: tiling is not hyperbolic");
  }
  if (p < 4 || q < 3) {
    // Triangular tiles would let a closing polygon emit no fresh boundary
    // vertices, which the growth bookkeeping does not support.
    throw std::invalid_argument("build_tiling: p < 4 is not supported");
  }
  if (q % 2 != 0) {
    throw std::invalid_argument(
        "build_tiling: odd vertex degree is not supported");
  }
  if (layers < 0) throw std::invalid_argument("build_tiling: negative layers");

  TilingGraph g(p, q, layers);
  g.add_tile(0, TileRole::kTop);

  // Boundary state: vertex k (with its incident tile count) sits immediately
  // before leg k, cyclically.
  std::vector<int> vertex_tiles(static_cast<std::size_t>(p), 1);
  std::vector<BoundarySlot> legs;
  for (int l = 0; l < p; ++l) legs.push_back({0, l});

  for (int n = 1; n <= layers; ++n) {
    const std::size_t count = legs.size();
    std::vector<char> ripe(count), consumed(count);
    for (std::size_t k = 0; k < count; ++k) {
      ripe[k] = vertex_tiles[k] == q - 1 ? 1 : 0;
    }
    for (std::size_t k = 0; k < count; ++k) {
      consumed[k] = (ripe[k] || ripe[(k + 1) % count]) ? 1 : 0;
    }
    std::vector<int> next_vertex_tiles;
    std::vector<BoundarySlot> next_legs;
    next_vertex_tiles.reserve(count * 2);
    next_legs.reserve(count * 2);
    for (std::size_t k = 0; k < count; ++k) {
      if (ripe[k]) {
        const std::size_t before = (k + count - 1) % count;
        const int id = g.add_tile(n, TileRole::kVertexPolygon);
        g.connect(legs[before].tile, legs[before].leg, id, 0);
        g.connect(legs[k].tile, legs[k].leg, id, 1);
        // The vertex preceding the consumed pair survives and gains the two
        // tiles glued onto its flanking legs this generation.
        next_vertex_tiles.push_back(vertex_tiles[before] + 2);
        next_legs.push_back({id, 2});
        for (int j = 3; j < p; ++j) {
          next_vertex_tiles.push_back(1);
          next_legs.push_back({id, j});
        }
      } else if (!consumed[k]) {
        const int id = g.add_tile(n, TileRole::kEdgePolygon);
        g.connect(legs[k].tile, legs[k].leg, id, 0);
        next_vertex_tiles.push_back(vertex_tiles[k] + 2);
        next_legs.push_back({id, 1});
        for (int j = 2; j < p; ++j) {
          next_vertex_tiles.push_back(1);
          next_legs.push_back({id, j});
        }
      }
    }
    vertex_tiles = std::move(next_vertex_tiles);
    legs = std::move(next_legs);
  }
  g.boundary_ = std::move(legs);
  return g;
}

struct LayerCount {
  int layer = 0;
  long long edge_polygons = 0;
  long long vertex_polygons = 0;
};

inline std::vector<LayerCount> layer_counts(const TilingGraph& g) {
  std::vector<LayerCount> out(static_cast<std::size_t>(g.layers()) + 1);
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n].layer = static_cast<int>(n);
  }
  for (const Tile& t : g.tiles()) {
    auto& row = out.at(static_cast<std::size_t>(t.layer));
    if (t.role == TileRole::kEdgePolygon) ++row.edge_polygons;
    if (t.role == TileRole::kVertexPolygon) ++row.vertex_polygons;
  }
  return out;
}

struct SeparationReport {
  // Layer of the deepest tile shared by both ascending cones.
  int meeting_layer = 0;
  // Layers between the boundary layer and the meeting layer.
  int meeting_depth = 0;
  // log(cyclic separation) / log((3+sqrt(5))/2), the growth-rate estimate of
  // the meeting depth.
  double log_estimate = 0.0;
};

inline SeparationReport layers_for_separation(int i, int j,
                                              const TilingGraph& g) {
  const auto count = static_cast<int>(g.boundary().size());
  if (i == j || i < 0 || j < 0 || i >= count || j >= count) {
    throw std::invalid_argument("layers_for_separation: bad boundary indices");
  }
  const auto cone_i = g.ascending_cone({g.boundary()[static_cast<std::size_t>(i)].tile});
  const auto cone_j = g.ascending_cone({g.boundary()[static_cast<std::size_t>(j)].tile});
  std::vector<int> common;
  std::set_intersection(cone_i.begin(), cone_i.end(), cone_j.begin(),
                        cone_j.end(), std::back_inserter(common));
  SeparationReport rep;
  rep.meeting_layer = 0;
  for (int t : common) {
    rep.meeting_layer = std::max(rep.meeting_layer, g.tile(t).layer);
  }
  rep.meeting_depth = g.layers() - rep.meeting_layer;
  const int cyc = std::min(std::abs(i - j), count - std::abs(i - j));
  rep.log_estimate =
      std::log(static_cast<double>(std::max(cyc, 1))) /
      std::log((3.0 + std::sqrt(5.0)) / 2.0);
  return rep;
}

}  // namespace hmera

#endif  // HMERA_TILING_HPP
