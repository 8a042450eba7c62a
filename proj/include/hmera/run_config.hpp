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

#ifndef HMERA_RUN_CONFIG_HPP
#define HMERA_RUN_CONFIG_HPP

#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "json.hpp"

#include "hmera/network.hpp"
#include "hmera/tensor_zoo.hpp"
#include "hmera/tiling.hpp"

namespace hmera {

// Complete description of one run: tiling geometry, tensor deformation
// angles, bulk state choices, RNG seed, and free-form per-command options.
// Round-trips losslessly through JSON so that every artifact can embed the
// exact configuration that produced it.
struct RunConfig {
  // Geometry.
  int p = 5;
  int q = 4;
  int layers = 2;

  // Tensor deformation. `theta` is the common deformation angle; when
  // `theta_ij` is absent each of the 20 ordered-pair weights defaults to
  // sin(theta)/sqrt(20). `tile_theta` overrides the angle on single tiles.
  double theta = 0.0;
  std::optional<std::array<double, 20>> theta_ij;
  std::map<int, double> tile_theta;

  // Central-tensor mixing: cos(phi0) V + sum_i sin(phi[i]) P_i V with
  // P_i = top_paulis[i].
  double phi0 = 0.0;
  std::array<double, 5> phi{};
  std::string top_paulis = "ZZZZZ";

  // Bulk state: default qubit direction (alpha, beta) on every active tile,
  // per-tile overrides, or fully open bulk legs.
  double alpha = kDefaultBulkAlpha;
  double beta = kDefaultBulkBeta;
  std::map<int, std::pair<double, double>> tile_states;
  bool open_bulk_legs = false;

  // Sampling.
  std::uint64_t seed = 0;

  // Command-specific string options, carried verbatim into artifacts.
  std::map<std::string, std::string> options;

  TensorParams tensor_params() const {
    TensorParams params;
    params.theta = theta;
    params.theta_ij = theta_ij;
    params.phi0 = phi0;
    params.phi = phi;
    params.top_paulis = top_paulis;
    return params;
  }

  BulkConfig bulk_config() const {
    BulkConfig bulk;
    bulk.alpha = alpha;
    bulk.beta = beta;
    bulk.tile_states = tile_states;
    bulk.open_bulk_legs = open_bulk_legs;
    return bulk;
  }

  TilingGraph tiling() const { return build_tiling(p, q, layers); }

  NetworkInstance network(const TilingGraph& graph) const {
    NetworkInstance net = build_network(graph, tensor_params(), bulk_config());
    for (const auto& [tile, angle] : tile_theta) {
      net.set_tile_theta(tile, angle);
    }
    return net;
  }
};

namespace detail {

// JSON object keys for integer-keyed maps (JSON objects require string keys).
inline int parse_int_key(const std::string& key) {
  std::size_t pos = 0;
  const int value = std::stoi(key, &pos);
  if (pos != key.size()) {
    throw std::invalid_argument("RunConfig: bad integer key '" + key + "'");
  }
  return value;
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const RunConfig& cfg) {
  j = nlohmann::json{
      {"p", cfg.p},
      {"q", cfg.q},
      {"layers", cfg.layers},
      {"theta", cfg.theta},
      {"phi0", cfg.phi0},
      {"phi", cfg.phi},
      {"top_paulis", cfg.top_paulis},
      {"alpha", cfg.alpha},
      {"beta", cfg.beta},
      {"open_bulk_legs", cfg.open_bulk_legs},
      {"seed", cfg.seed},
  };
  if (cfg.theta_ij) {
    j["theta_ij"] = *cfg.theta_ij;
  } else {
    j["theta_ij"] = nullptr;
  }
  nlohmann::json tile_theta = nlohmann::json::object();
  for (const auto& [tile, angle] : cfg.tile_theta) {
    tile_theta[std::to_string(tile)] = angle;
  }
  j["tile_theta"] = std::move(tile_theta);
  nlohmann::json tile_states = nlohmann::json::object();
  for (const auto& [tile, state] : cfg.tile_states) {
    tile_states[std::to_string(tile)] =
        nlohmann::json::array({state.first, state.second});
  }
  j["tile_states"] = std::move(tile_states);
  j["options"] = cfg.options;
}

inline void from_json(const nlohmann::json& j, RunConfig& cfg) {
  cfg = RunConfig{};
  if (j.contains("p")) j.at("p").get_to(cfg.p);
  if (j.contains("q")) j.at("q").get_to(cfg.q);
  if (j.contains("layers")) j.at("layers").get_to(cfg.layers);
  if (j.contains("theta")) j.at("theta").get_to(cfg.theta);
  if (j.contains("theta_ij") && !j.at("theta_ij").is_null()) {
    std::array<double, 20> table{};
    j.at("theta_ij").get_to(table);
    cfg.theta_ij = table;
  }
  if (j.contains("tile_theta")) {
    for (const auto& [key, value] : j.at("tile_theta").items()) {
      cfg.tile_theta[detail::parse_int_key(key)] = value.get<double>();
    }
  }
  if (j.contains("phi0")) j.at("phi0").get_to(cfg.phi0);
  if (j.contains("phi")) j.at("phi").get_to(cfg.phi);
  if (j.contains("top_paulis")) j.at("top_paulis").get_to(cfg.top_paulis);
  if (j.contains("alpha")) j.at("alpha").get_to(cfg.alpha);
  if (j.contains("beta")) j.at("beta").get_to(cfg.beta);
  if (j.contains("tile_states")) {
    for (const auto& [key, value] : j.at("tile_states").items()) {
      if (!value.is_array() || value.size() != 2) {
        throw std::invalid_argument("RunConfig: tile_states entries are "
                                    "[alpha, beta] pairs");
      }
      cfg.tile_states[detail::parse_int_key(key)] = {value.at(0).get<double>(),
                                                     value.at(1).get<double>()};
    }
  }
  if (j.contains("open_bulk_legs")) {
    j.at("open_bulk_legs").get_to(cfg.open_bulk_legs);
  }
  if (j.contains("seed")) j.at("seed").get_to(cfg.seed);
  if (j.contains("options")) j.at("options").get_to(cfg.options);
}

// Applies the HMERA_SEED environment variable, if set, on top of the
// configured seed. Returns true when an override was applied. A value that
// is not a plain non-negative integer is a usage error.
inline bool apply_seed_override(RunConfig& cfg) {
  const char* raw = std::getenv("HMERA_SEED");
  if (raw == nullptr || *raw == '\0') return false;
  const std::string text(raw);
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("HMERA_SEED must be a non-negative integer, "
                                "got '" + text + "'");
  }
  if (pos != text.size() || text[0] == '-') {
    throw std::invalid_argument("HMERA_SEED must be a non-negative integer, "
                                "got '" + text + "'");
  }
  cfg.seed = static_cast<std::uint64_t>(value);
  return true;
}

}  // namespace hmera

#endif  // HMERA_RUN_CONFIG_HPP
