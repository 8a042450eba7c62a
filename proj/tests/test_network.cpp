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

#include "hmera/network.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "test_util.hpp"

namespace hmera {
namespace {

// Two independent copies of a qubit-leg state interleaved into qudit legs:
// each site index becomes m = 2 a + b with a from the first copy.
DenseTensor interleave_copies(const DenseTensor& single) {
  const int k = single.rank();
  DenseTensor pair = outer(single, single);
  std::vector<int> perm;
  for (int i = 0; i < k; ++i) {
    perm.push_back(i);
    perm.push_back(i + k);
  }
  return pair.permuted(perm).reshaped(std::vector<int>(
      static_cast<std::size_t>(k), 4));
}

// First boundary index whose slot starts a same-tile run of `len` legs on an
// edge polygon (legs 1..len of that tile).
int contiguous_edge_region_start(const TilingGraph& g, int len) {
  const auto& b = g.boundary();
  for (std::size_t i = 0; i + static_cast<std::size_t>(len) <= b.size();
       ++i) {
    if (g.tile(b[i].tile).role != TileRole::kEdgePolygon || b[i].leg != 1) {
      continue;
    }
    bool run = true;
    for (int r = 1; r < len; ++r) {
      if (b[i + static_cast<std::size_t>(r)].tile != b[i].tile) run = false;
    }
    if (run) return static_cast<int>(i);
  }
  throw std::logic_error("no contiguous edge-polygon region found");
}

// A layer-2 vertex polygon whose parents are the given two tiles.
int vertex_polygon_with_parents(const TilingGraph& g, int a, int b) {
  for (const Tile& t : g.tiles()) {
    if (t.role != TileRole::kVertexPolygon) continue;
    const auto parents = g.parents(t.id);
    if ((parents[0] == a && parents[1] == b) ||
        (parents[0] == b && parents[1] == a)) {
      return t.id;
    }
  }
  throw std::logic_error("no vertex polygon with the requested parents");
}

TEST(BuildNetwork, ValidatesParametersAndOverrides) {
  const TilingGraph g = build_tiling(5, 4, 2);
  TensorParams bad_top;
  bad_top.phi0 = 0.3;
  bad_top.phi.fill(0.3);
  EXPECT_THROW(build_network(g, bad_top), std::invalid_argument);

  TensorParams bad_edge;
  bad_edge.theta = 0.4;
  bad_edge.theta_ij.emplace();
  bad_edge.theta_ij->fill(0.2);  // does not resolve cos^2 + sum sin^2 = 1
  EXPECT_THROW(build_network(g, bad_edge), std::invalid_argument);

  BulkConfig edge_state;
  edge_state.tile_states[1] = {0.3, 0.0};  // tile 1 is an edge polygon
  EXPECT_THROW(build_network(g, {}, edge_state), std::invalid_argument);

  NetworkInstance net = build_network(g);
  EXPECT_THROW(net.set_tile_theta(0, 0.1), std::invalid_argument);
  EXPECT_THROW(net.restrict_to({1}), std::invalid_argument);  // center missing
  EXPECT_THROW(net.restrict_to({0, 6}), std::invalid_argument);  // open parent
}

TEST(OpenBoundary, MatchesGraphBoundaryWhenEveryTileIsActive) {
  const TilingGraph g = build_tiling(5, 4, 2);
  const NetworkInstance net = build_network(g);
  const auto open = net.open_boundary();
  ASSERT_EQ(open.size(), g.boundary().size());
  for (std::size_t i = 0; i < open.size(); ++i) {
    EXPECT_EQ(open[i].tile, g.boundary()[i].tile);
    EXPECT_EQ(open[i].leg, g.boundary()[i].leg);
  }
}

TEST(ContractFull, ZeroLayersGivesTheTwoCopyCodeword) {
  const TilingGraph g = build_tiling(5, 4, 0);
  BulkConfig bulk;
  bulk.alpha = 0.7;
  bulk.beta = 0.4;
  const NetworkInstance net = build_network(g, {}, bulk);
  const DenseTensor state = contract_full(net);
  ASSERT_EQ(state.rank(), 5);
  EXPECT_NEAR(state.norm(), 1.0, 1e-12);

  const Eigen::MatrixXcd enc = five_qubit_code().encoding_map();
  const Eigen::VectorXcd codeword = enc * bulk_logical_state(0.7, 0.4);
  const Eigen::VectorXcd expected = merge_copies(codeword, codeword);
  const Eigen::VectorXcd got = state.vectorized();
  EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ContractFull, GuardRejectsWideBoundaries) {
  const TilingGraph g = build_tiling(5, 4, 1);  // 20 qudits
  const NetworkInstance net = build_network(g);
  EXPECT_THROW(contract_full(net), std::invalid_argument);
}

// With no deformation the network is two uncoupled copies of the pentagon
// code network: the contracted state equals the interleaving of two
// independent single-copy contractions.
TEST(ContractFull, UndeformedNetworkIsTwoIndependentCopies) {
  const TilingGraph g = build_tiling(5, 4, 1);
  BulkConfig bulk;
  bulk.alpha = 0.7;
  bulk.beta = 0.4;
  NetworkInstance net = build_network(g, {}, bulk);
  net.restrict_to({0, 1});  // center plus one edge polygon: 8 qudits
  const DenseTensor state = contract_full(net);
  ASSERT_EQ(state.rank(), 8);

  // Single-copy oracle assembled directly from the code tensors.
  Eigen::Vector2cd zero;
  zero << 1.0, 0.0;
  const DenseTensor top_single =
      contracted_with_state(perfect_tensor(), 0, bulk_logical_state(0.7, 0.4));
  const DenseTensor edge_single =
      contracted_with_state(perfect_tensor(), 0, zero).scaled(std::sqrt(2.0));
  // Tile 1 hangs off the center's leg 0; open legs are then the center's
  // legs 1..4 followed by the edge tile's legs 1..4, matching open_boundary.
  const auto peer = g.peer(1, 0);
  ASSERT_TRUE(peer.has_value());
  ASSERT_EQ(peer->tile, 0);
  const DenseTensor single =
      contract(top_single, {peer->leg}, edge_single, {0});
  const DenseTensor expected = interleave_copies(single);
  EXPECT_LT(hmera_test::max_abs_diff(state.vectorized(),
                                     expected.vectorized()),
            1e-12);
}

TEST(ContractFull, UnitNormAtNonzeroDeformation) {
  const TilingGraph g = build_tiling(5, 4, 2);
  TensorParams params;
  params.theta = 0.3;
  NetworkInstance net = build_network(g, params);
  net.restrict_to({0, 1});
  EXPECT_NEAR(contract_full(net).norm(), 1.0, 1e-10);
  net.restrict_to({0, 1, 2});
  EXPECT_NEAR(contract_full(net).norm(), 1.0, 1e-10);
}

TEST(ContractFull, OpenBulkLegsExportTheEncodingMap) {
  const TilingGraph g = build_tiling(5, 4, 0);
  BulkConfig bulk;
  bulk.open_bulk_legs = true;
  const NetworkInstance net = build_network(g, {}, bulk);
  const DenseTensor map = contract_full(net);
  ASSERT_EQ(map.rank(), 7);  // five qudits + two logical qubits
  EXPECT_EQ(map.dim(5), 2);
  EXPECT_EQ(map.dim(6), 2);
  const auto rep = check_isometry(map, {5, 6});
  EXPECT_TRUE(rep.is_isometry);
  EXPECT_NEAR(rep.scale, 1.0, 1e-12);
}

// The deformed edge map stops being an isometry from (logical, inward) once
// the deformation couples the copies; with theta = 0 it is exact.
TEST(ContractFull, OpenBulkEdgeMapIsometryOnlyAtZeroDeformation) {
  TensorParams p0;
  const auto exact = check_isometry(imperfect_tensor_map(p0).scaled(2.0),
                                    {0, 1, 2});
  EXPECT_TRUE(exact.is_isometry);
  TensorParams p3;
  p3.theta = 0.3;
  const auto broken = check_isometry(imperfect_tensor_map(p3).scaled(2.0),
                                     {0, 1, 2});
  EXPECT_FALSE(broken.is_isometry);
  EXPECT_GT(broken.deviation, 1e-3);
}

TEST(ReducedDensity, MatchesPartialTraceOfFullState) {
  const TilingGraph g = build_tiling(5, 4, 2);
  TensorParams params;
  params.theta = 0.3;
  NetworkInstance net = build_network(g, params);
  net.restrict_to({0, 1, 2});  // 11 qudits
  const DenseTensor state = contract_full(net);
  ASSERT_EQ(state.rank(), 11);

  const std::vector<int> region = {4, 5, 6};
  const ReducedState rho = reduced_density_matrix(net, region);
  EXPECT_TRUE(rho.warning.empty());
  std::vector<int> rest;
  for (int l = 0; l < 11; ++l) {
    if (l != 4 && l != 5 && l != 6) rest.push_back(l);
  }
  const DenseTensor traced =
      contract(state, rest, state.conjugated(), rest);
  const Eigen::MatrixXcd oracle = traced.matricized({0, 1, 2});
  ASSERT_EQ(rho.matrix.rows(), oracle.rows());
  EXPECT_LT((rho.matrix - oracle).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(rho.matrix.trace().real(), 1.0, 1e-10);
  EXPECT_LT((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

// Widest brute-force cross-check: center, two edge polygons, and the vertex
// polygon closing them (12 qudits).
TEST(ReducedDensity, MatchesPartialTraceWithVertexPolygonActive) {
  const TilingGraph g = build_tiling(5, 4, 2);
  const int vp = vertex_polygon_with_parents(g, 1, 2);
  TensorParams params;
  params.theta = 0.3;
  NetworkInstance net = build_network(g, params);
  net.restrict_to({0, 1, 2, vp});
  const DenseTensor state = contract_full(net);
  ASSERT_EQ(state.rank(), 12);
  EXPECT_NEAR(state.norm(), 1.0, 1e-10);

  const std::vector<int> region = {8, 9};
  const ReducedState rho = reduced_density_matrix(net, region);
  std::vector<int> rest;
  for (int l = 0; l < 12; ++l) {
    if (l != 8 && l != 9) rest.push_back(l);
  }
  const DenseTensor traced =
      contract(state, rest, state.conjugated(), rest);
  const Eigen::MatrixXcd oracle = traced.matricized({0, 1});
  EXPECT_LT((rho.matrix - oracle).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ReducedDensity, SingleSiteIsMaximallyMixedAtAnyDeformation) {
  const TilingGraph g = build_tiling(5, 4, 3);
  for (double theta : {0.0, 0.3, 1.0}) {
    TensorParams params;
    params.theta = theta;
    const NetworkInstance net = build_network(g, params);
    for (int site : {0, 7, 40}) {
      const ReducedState rho = reduced_density_matrix(net, {site});
      const Eigen::MatrixXcd expected =
          Eigen::MatrixXcd::Identity(4, 4) / 4.0;
      EXPECT_LT((rho.matrix - expected).cwiseAbs().maxCoeff(), 1e-10)
          << "theta=" << theta << " site=" << site;
      // Purity of the maximally mixed qudit.
      EXPECT_NEAR((rho.matrix * rho.matrix).trace().real(), 0.25, 1e-12);
    }
  }
}

// Three contiguous sites on one boundary edge polygon. Undeformed, the
// marginal is flat: rank 16 with every nonzero eigenvalue 1/16. The same
// marginal equals the edge tensor's own pure-state marginal because the
// inward leg is fed a maximally mixed qudit.
TEST(ReducedDensity, FlatSpectrumWithoutDeformation) {
  const TilingGraph g = build_tiling(5, 4, 5);
  const int start = contiguous_edge_region_start(g, 3);
  const NetworkInstance net = build_network(g);
  const ReducedState rho =
      reduced_density_matrix(net, {start, start + 1, start + 2});
  EXPECT_TRUE(rho.warning.empty());
  const Eigen::VectorXd ev = density_eigenvalues(rho.matrix);
  for (int i = 0; i < 16; ++i) {
    EXPECT_NEAR(ev(i), 1.0 / 16.0, 1e-10) << i;
  }
  for (int i = 16; i < ev.size(); ++i) {
    EXPECT_LT(std::abs(ev(i)), 1e-10) << i;
  }
}

TEST(ReducedDensity, DeformationBroadensTheSpectrum) {
  const TilingGraph g = build_tiling(5, 4, 5);
  const int start = contiguous_edge_region_start(g, 3);
  // Ratio of extreme nonzero eigenvalues for the three-site marginal, from
  // an independent direct computation of the edge tensor's pure marginal.
  const std::vector<std::pair<double, double>> frozen = {
      {0.1, 1.488558}, {0.3, 3.148703}, {0.7, 8.011834}};
  for (const auto& [theta, expected_ratio] : frozen) {
    TensorParams params;
    params.theta = theta;
    const NetworkInstance net = build_network(g, params);
    const ReducedState rho =
        reduced_density_matrix(net, {start, start + 1, start + 2});
    const Eigen::VectorXd ev = density_eigenvalues(rho.matrix);
    EXPECT_GT(ev(0) / ev(15), 1.0 + 1e-3) << "theta=" << theta;
    EXPECT_NEAR(ev(0) / ev(15), expected_ratio, 1e-5 * expected_ratio)
        << "theta=" << theta;
    for (int i = 16; i < ev.size(); ++i) {
      EXPECT_LT(std::abs(ev(i)), 1e-10);
    }
    // Pure-marginal oracle for the same region.
    const DenseTensor t = imperfect_tensor(params);
    const DenseTensor traced = contract(t, {0, 4}, t.conjugated(), {0, 4});
    EXPECT_LT((rho.matrix - traced.matricized({0, 1, 2})).cwiseAbs()
                  .maxCoeff(),
              1e-10);
  }
}

// Disjoint single sites: flagged as non-contiguous; undeformed copies carry
// no connected correlations, so the joint marginal is exactly I/16.
TEST(ReducedDensity, NonContiguousRegionWarnsAndFactorizes) {
  const TilingGraph g = build_tiling(5, 4, 3);
  const NetworkInstance net = build_network(g);
  const ReducedState rho = reduced_density_matrix(net, {0, 7});
  EXPECT_FALSE(rho.warning.empty());
  const Eigen::MatrixXcd expected = Eigen::MatrixXcd::Identity(16, 16) / 16.0;
  EXPECT_LT((rho.matrix - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ReducedDensity, RejectsBadRegions) {
  const TilingGraph g = build_tiling(5, 4, 2);
  const NetworkInstance net = build_network(g);
  EXPECT_THROW(reduced_density_matrix(net, {}), std::invalid_argument);
  EXPECT_THROW(reduced_density_matrix(net, {0, 1, 2, 3, 4}),
               std::invalid_argument);
  EXPECT_THROW(reduced_density_matrix(net, {0, 0}), std::invalid_argument);
  EXPECT_THROW(reduced_density_matrix(net, {-1}), std::invalid_argument);
  BulkConfig open;
  open.open_bulk_legs = true;
  const NetworkInstance open_net = build_network(g, {}, open);
  EXPECT_THROW(reduced_density_matrix(open_net, {0}), std::invalid_argument);
}

TEST(LocalContractibility, EveryRolePassesAtAnyDeformation) {
  const TilingGraph g = build_tiling(5, 4, 3);
  for (double theta : {0.0, 0.5, 1.2}) {
    TensorParams params;
    params.theta = theta;
    NetworkInstance net = build_network(g, params);
    net.set_tile_theta(7, 0.9);  // per-tile override keeps the property
    const ContractibilityReport rep = local_contractibility(net);
    EXPECT_TRUE(rep.ok) << "theta=" << theta << " worst tile "
                        << rep.worst_tile;
    EXPECT_LT(rep.worst_deviation, 1e-10);
  }
}

TEST(BulkStates, PerTileOverridesChangeTheState) {
  const TilingGraph g = build_tiling(5, 4, 2);
  const int vp = vertex_polygon_with_parents(g, 1, 2);
  BulkConfig a;  // defaults everywhere
  BulkConfig b;
  b.tile_states[vp] = {1.2, 0.5};
  NetworkInstance na = build_network(g, {}, a);
  NetworkInstance nb = build_network(g, {}, b);
  na.restrict_to({0, 1, 2, vp});
  nb.restrict_to({0, 1, 2, vp});
  const Eigen::VectorXcd va = contract_full(na).vectorized();
  const Eigen::VectorXcd vb = contract_full(nb).vectorized();
  EXPECT_GT((va - vb).norm(), 0.1);  // distinct unit vectors
}

TEST(TileTensors, PerTileThetaOverrideAppliesOnlyToThatTile) {
  const TilingGraph g = build_tiling(5, 4, 1);
  TensorParams params;
  params.theta = 0.2;
  NetworkInstance net = build_network(g, params);
  net.set_tile_theta(2, 0.8);
  EXPECT_NEAR(net.tile_theta(1), 0.2, 0.0);
  EXPECT_NEAR(net.tile_theta(2), 0.8, 0.0);
  TensorParams p8;
  p8.theta = 0.8;
  const double diff = hmera_test::max_abs_diff(
      net.tile_tensor(2).vectorized(),
      imperfect_tensor(p8).scaled(2.0).vectorized());
  EXPECT_LT(diff, 1e-15);
}

}  // namespace
}  // namespace hmera
