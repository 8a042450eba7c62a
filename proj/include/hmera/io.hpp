// Copyright 2026 The HMERA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HMERA_IO_HPP
#define HMERA_IO_HPP

#include <charconv>
#include <complex>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "hmera/analysis.hpp"
#include "hmera/dense_tensor.hpp"
#include "hmera/network.hpp"
#include "hmera/run_config.hpp"
#include "hmera/tiling.hpp"
#include "hmera/version.hpp"

namespace hmera {

// Shortest decimal string that round-trips to the same double. Used for all
// CSV output so artifacts are byte-identical across runs.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, res.ptr);
}

// One artifact envelope shared by every output file: the artifact format
// version, the kind of payload, and the resolved configuration.
inline nlohmann::json artifact_header(const std::string& kind,
                                      const RunConfig& cfg) {
  nlohmann::json j;
  j["artifact_version"] = kVersion;
  j["kind"] = kind;
  j["config"] = cfg;
  return j;
}

// Leading comment lines carrying the same envelope for CSV artifacts.
inline std::string csv_header(const std::string& kind, const RunConfig& cfg) {
  const nlohmann::json config = cfg;
  std::string out;
  out += "# artifact_version=" + std::string(kVersion) + "\n";
  out += "# kind=" + kind + "\n";
  out += "# config=" + config.dump() + "\n";
  return out;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw std::runtime_error("short write to '" + path + "'");
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "' for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string json_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline nlohmann::json complex_to_json(const cplx& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(complex_to_json(m(r, c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline const char* role_name(TileRole role) {
  switch (role) {
    case TileRole::kTop: return "top";
    case TileRole::kEdgePolygon: return "edge";
    case TileRole::kVertexPolygon: return "vertex";
  }
  return "unknown";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tiling graphs.

inline nlohmann::json graph_to_json(const TilingGraph& g) {
  nlohmann::json j;
  j["p"] = g.p();
  j["q"] = g.q();
  j["layers"] = g.layers();
  nlohmann::json tiles = nlohmann::json::array();
  for (const Tile& t : g.tiles()) {
    tiles.push_back({{"id", t.id},
                     {"layer", t.layer},
                     {"role", detail::role_name(t.role)}});
  }
  j["tiles"] = std::move(tiles);
  nlohmann::json edges = nlohmann::json::array();
  for (const TilingEdge& e : g.edges()) {
    edges.push_back(nlohmann::json::array({e.tile_a, e.leg_a, e.tile_b,
                                           e.leg_b}));
  }
  j["edges"] = std::move(edges);
  nlohmann::json boundary = nlohmann::json::array();
  for (const BoundarySlot& s : g.boundary()) {
    boundary.push_back(nlohmann::json::array({s.tile, s.leg}));
  }
  j["boundary"] = std::move(boundary);
  return j;
}

// Rebuilds the tiling named by the file header and verifies that the stored
// tiles, edges, and boundary cycle match the rebuild exactly. Guards against
// hand-edited or stale graph files.
inline TilingGraph graph_from_json(const nlohmann::json& j) {
  const int p = j.at("p").get<int>();
  const int q = j.at("q").get<int>();
  const int layers = j.at("layers").get<int>();
  TilingGraph g = build_tiling(p, q, layers);
  const nlohmann::json expect = graph_to_json(g);
  for (const char* key : {"tiles", "edges", "boundary"}) {
    if (j.contains(key) && j.at(key) != expect.at(key)) {
      throw std::runtime_error(std::string("graph file '") + key +
                               "' does not match the {" + std::to_string(p) +
                               "," + std::to_string(q) + "} tiling with " +
                               std::to_string(layers) + " layers");
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Tensors.

// Row-major dump: the index of leg 0 varies slowest and the last leg
// fastest, matching the vectorization used throughout the library.
inline nlohmann::json tensor_to_json(const DenseTensor& t) {
  nlohmann::json j;
  j["legs"] = t.rank();
  j["dims"] = t.dims();
  j["labels"] = t.labels();
  j["tags"] = t.tags();
  nlohmann::json data = nlohmann::json::array();
  const cplx* p = t.data();
  for (std::int64_t i = 0; i < t.size(); ++i) {
    data.push_back(detail::complex_to_json(p[i]));
  }
  j["data"] = std::move(data);
  return j;
}

// ---------------------------------------------------------------------------
// Density matrices.

inline nlohmann::json rdm_to_json(const ReducedState& state) {
  nlohmann::json j;
  j["region"] = state.region;
  j["dim"] = static_cast<int>(state.matrix.rows());
  j["matrix"] = detail::matrix_to_json(state.matrix);
  const Eigen::VectorXd evals = density_eigenvalues(state.matrix);
  std::vector<double> eigenvalues(evals.data(), evals.data() + evals.size());
  j["eigenvalues"] = eigenvalues;
  if (!state.warning.empty()) j["warning"] = state.warning;
  return j;
}

// ---------------------------------------------------------------------------
// Operator pushing.

inline nlohmann::json push_to_json(const PushResult& push) {
  nlohmann::json j;
  j["source_tile"] = push.source_tile;
  j["op"] = push.op;
  j["phase"] = detail::complex_to_json(push.phase);
  nlohmann::json support = nlohmann::json::array();
  for (const BoundaryLetter& bl : push.boundary_support) {
    support.push_back({{"slot", bl.slot},
                       {"tile", bl.location.tile},
                       {"leg", bl.location.leg},
                       {"letters", bl.letters}});
  }
  j["boundary_support"] = std::move(support);
  j["residual_error"] = push.residual_error;
  nlohmann::json defects = nlohmann::json::object();
  for (const auto& [tile, defect] : push.tile_defects) {
    defects[std::to_string(tile)] = defect;
  }
  j["tile_defects"] = std::move(defects);
  j["residual_note"] = push.residual_note;
  return j;
}

// ---------------------------------------------------------------------------
// Series artifacts.

// eigs.csv: one row per eigenvalue per sweep point.
inline std::string eigenvalues_csv(
    const RunConfig& cfg,
    const std::vector<std::pair<double, Eigen::VectorXcd>>& sweep) {
  std::string out = csv_header("superop-eigenvalues", cfg);
  out += "beta,re,im\n";
  for (const auto& [beta, evals] : sweep) {
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
      out += csv_row({format_double(beta), format_double(evals[i].real()),
                      format_double(evals[i].imag())});
    }
  }
  return out;
}

// corr.csv: one row per (site pair, operator pair).
inline std::string correlators_csv(const RunConfig& cfg,
                                   const std::vector<CorrelatorResult>& rows) {
  std::string out = csv_header("correlators", cfg);
  out += "i,j,sep,op_a,op_b,re,im,connected_re,connected_im\n";
  for (const CorrelatorResult& r : rows) {
    out += csv_row({std::to_string(r.site_i), std::to_string(r.site_j),
                    std::to_string(r.separation), r.op_a, r.op_b,
                    format_double(r.value.real()),
                    format_double(r.value.imag()),
                    format_double(r.connected.real()),
                    format_double(r.connected.imag())});
  }
  return out;
}

}  // namespace hmera

#endif  // HMERA_IO_HPP
