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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "json.hpp"

#include "hmera/analysis.hpp"
#include "hmera/io.hpp"
#include "hmera/network.hpp"
#include "hmera/probabilities.hpp"
#include "hmera/run_config.hpp"
#include "hmera/superop.hpp"
#include "hmera/tensor_zoo.hpp"
#include "hmera/tiling.hpp"
#include "hmera/version.hpp"

namespace {

using nlohmann::json;

// Raised when a `verify` check exceeds its tolerance; mapped to exit code 2.
struct ToleranceFailure : std::runtime_error {
  json diagnostic;
  explicit ToleranceFailure(json diag)
      : std::runtime_error(diag.value("message", "tolerance failure")),
        diagnostic(std::move(diag)) {}
};

// ---------------------------------------------------------------------------
// Shared configuration flags. Precedence: defaults < --config file < explicit
// command-line flags; HMERA_SEED overrides the seed last.

struct ConfigFlags {
  std::string config_path;
  int p = 5;
  int q = 4;
  int layers = 2;
  double theta = 0.0;
  double phi0 = 0.0;
  std::vector<double> phi;
  std::string top_paulis;
  double alpha = hmera::kDefaultBulkAlpha;
  double beta = hmera::kDefaultBulkBeta;
  bool open_bulk = false;
  std::uint64_t seed = 0;
  std::vector<std::string> tile_theta;
  std::vector<std::string> tile_state;

  CLI::Option* o_p = nullptr;
  CLI::Option* o_q = nullptr;
  CLI::Option* o_layers = nullptr;
  CLI::Option* o_theta = nullptr;
  CLI::Option* o_phi0 = nullptr;
  CLI::Option* o_phi = nullptr;
  CLI::Option* o_top = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_beta = nullptr;
  CLI::Option* o_open = nullptr;
  CLI::Option* o_seed = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "JSON run-configuration file; explicit flags override it");
    o_p = cmd->add_option("--p", p, "Sides per polygon");
    o_q = cmd->add_option("--q", q, "Polygons per vertex");
    o_layers = cmd->add_option("--layers", layers, "Tiling layers");
    o_theta = cmd->add_option("--theta", theta,
                              "Edge-tensor deformation angle (radians)");
    o_phi0 = cmd->add_option("--phi0", phi0, "Central-tensor base weight");
    o_phi = cmd->add_option("--phi", phi,
                            "Five central insertion angles (radians)")
                ->expected(5);
    o_top = cmd->add_option("--top-paulis", top_paulis,
                            "Central insertion Paulis, five letters");
    o_alpha = cmd->add_option("--alpha", alpha, "Bulk state polar angle");
    o_beta = cmd->add_option("--beta", beta, "Bulk state azimuthal angle");
    o_open = cmd->add_flag("--open-bulk", open_bulk,
                           "Leave every bulk logical leg open");
    o_seed = cmd->add_option("--seed", seed, "RNG seed (64-bit)");
    cmd->add_option("--tile-theta", tile_theta,
                    "Per-tile angle override, repeatable, e.g. 4=0.1");
    cmd->add_option("--tile-state", tile_state,
                    "Per-tile bulk state, repeatable, e.g. 0=0.5,1.5");
  }

  hmera::RunConfig resolve() const {
    hmera::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = json::parse(hmera::read_text_file(config_path))
                .get<hmera::RunConfig>();
    }
    if (o_p->count()) cfg.p = p;
    if (o_q->count()) cfg.q = q;
    if (o_layers->count()) cfg.layers = layers;
    if (o_theta->count()) cfg.theta = theta;
    if (o_phi0->count()) cfg.phi0 = phi0;
    if (o_phi->count()) {
      for (int i = 0; i < 5; ++i) cfg.phi[static_cast<std::size_t>(i)] =
          phi[static_cast<std::size_t>(i)];
    }
    if (o_top->count()) cfg.top_paulis = top_paulis;
    if (o_alpha->count()) cfg.alpha = alpha;
    if (o_beta->count()) cfg.beta = beta;
    if (o_open->count()) cfg.open_bulk_legs = open_bulk;
    if (o_seed->count()) cfg.seed = seed;
    for (const std::string& entry : tile_theta) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("--tile-theta expects TILE=ANGLE, got '" +
                                    entry + "'");
      }
      cfg.tile_theta[hmera::detail::parse_int_key(entry.substr(0, eq))] =
          std::stod(entry.substr(eq + 1));
    }
    for (const std::string& entry : tile_state) {
      const auto eq = entry.find('=');
      const auto comma = entry.find(',', eq + 1);
      if (eq == std::string::npos || comma == std::string::npos) {
        throw std::invalid_argument(
            "--tile-state expects TILE=ALPHA,BETA, got '" + entry + "'");
      }
      cfg.tile_states[hmera::detail::parse_int_key(entry.substr(0, eq))] = {
          std::stod(entry.substr(eq + 1, comma - eq - 1)),
          std::stod(entry.substr(comma + 1))};
    }
    hmera::apply_seed_override(cfg);
    return cfg;
  }
};

// Writes `content` to `path`, or to stdout when no path was given.
void emit(const std::string& path, const std::string& content,
          const std::string& note) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  hmera::write_text_file(path, content);
  std::cout << note << " -> " << path << "\n";
}

hmera::TilingGraph load_or_build_graph(const std::string& graph_path,
                                       hmera::RunConfig& cfg) {
  if (graph_path.empty()) return cfg.tiling();
  const json j = json::parse(hmera::read_text_file(graph_path));
  hmera::TilingGraph g = hmera::graph_from_json(j);
  cfg.p = g.p();
  cfg.q = g.q();
  cfg.layers = g.layers();
  return g;
}

// Bulk tile address: either a plain tile id or L<layer>T<index> with the
// index counted within the layer in tile-id order.
int parse_bulk_site(const std::string& text, const hmera::TilingGraph& g) {
  if (text.empty()) throw std::invalid_argument("--bulk: empty tile address");
  if (text[0] == 'L' || text[0] == 'l') {
    const auto t_pos = text.find_first_of("Tt", 1);
    if (t_pos == std::string::npos) {
      throw std::invalid_argument("--bulk expects L<layer>T<index> or a "
                                  "tile id, got '" + text + "'");
    }
    const int layer = hmera::detail::parse_int_key(text.substr(1, t_pos - 1));
    const int index = hmera::detail::parse_int_key(text.substr(t_pos + 1));
    int seen = 0;
    for (const hmera::Tile& t : g.tiles()) {
      if (t.layer != layer) continue;
      if (seen == index) return t.id;
      ++seen;
    }
    throw std::invalid_argument("--bulk: no tile " + std::to_string(index) +
                                " in layer " + std::to_string(layer));
  }
  return hmera::detail::parse_int_key(text);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string piece =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    if (!piece.empty()) out.push_back(hmera::detail::parse_int_key(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Deterministic eigenvalue order: modulus descending, then real part, then
// imaginary part.
std::vector<hmera::cplx> sorted_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m);
  std::vector<hmera::cplx> out(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + m.rows());
  std::sort(out.begin(), out.end(), [](const hmera::cplx& a,
                                       const hmera::cplx& b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return out;
}

// ---------------------------------------------------------------------------
// verify suites

struct Check {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  bool pass() const { return worst <= tolerance; }
};

double rows_orthonormality_defect(const Eigen::MatrixXcd& a) {
  const Eigen::MatrixXcd gram = a * a.adjoint();
  return (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()))
      .cwiseAbs()
      .maxCoeff();
}

// The cone contraction skips every tile outside a causal cone by cancelling
// it against its own conjugate, which is valid exactly when the map from the
// tile's inward legs (bulk legs fixed) to its outward legs has orthonormal
// rows. The deformation preserves this for edge tensors at every angle; the
// fully open logical maps are isometric only for the undeformed tensors.
std::vector<Check> isometry_checks(const hmera::RunConfig& cfg) {
  std::vector<Check> checks;
  std::vector<double> thetas = {0.0, 0.2, 0.5, 0.9, 1.3};
  if (std::find(thetas.begin(), thetas.end(), cfg.theta) == thetas.end()) {
    thetas.push_back(cfg.theta);
  }
  for (double theta : thetas) {
    hmera::TensorParams tp;
    tp.theta = theta;
    const Eigen::MatrixXcd a =
        hmera::imperfect_tensor(tp).scaled(2.0).matricized({0});
    checks.push_back({"edge-inward-isometry(theta=" +
                          hmera::format_double(theta) + ")",
                      rows_orthonormality_defect(a), 1e-12});
  }
  if (cfg.theta_ij) {
    const Eigen::MatrixXcd a =
        hmera::imperfect_tensor(cfg.tensor_params()).scaled(2.0).matricized(
            {0});
    checks.push_back({"edge-inward-isometry(config-table)",
                      rows_orthonormality_defect(a), 1e-12});
  }
  for (const auto& [alpha, beta] :
       std::vector<std::pair<double, double>>{{cfg.alpha, cfg.beta},
                                              {0.7, 2.1}}) {
    const Eigen::Vector2cd state = hmera::bulk_logical_state(alpha, beta);
    const hmera::DenseTensor pair =
        hmera::two_copy_merged(hmera::perfect_tensor());
    const hmera::DenseTensor fixed = hmera::contracted_with_state(
        hmera::contracted_with_state(pair, 0, state), 0, state);
    const Eigen::MatrixXcd a = fixed.scaled(4.0).matricized({0, 1});
    checks.push_back({"vertex-inward-isometry(alpha=" +
                          hmera::format_double(alpha) + ",beta=" +
                          hmera::format_double(beta) + ")",
                      rows_orthonormality_defect(a), 1e-12});
  }
  {
    hmera::TensorParams tp;
    tp.theta = 0.0;
    const Eigen::MatrixXcd ep =
        hmera::imperfect_tensor_map(tp).scaled(2.0).matricized({0, 1, 2});
    checks.push_back({"edge-open-isometry(theta=0)",
                      rows_orthonormality_defect(ep), 1e-12});
    const Eigen::MatrixXcd vp =
        hmera::two_copy_merged(hmera::perfect_tensor())
            .scaled(4.0)
            .matricized({0, 1, 2, 3});
    checks.push_back({"vertex-open-isometry", rows_orthonormality_defect(vp),
                      1e-12});
  }
  for (double phi : {0.0, 0.3}) {
    const hmera::TensorParams tp = hmera::symmetric_top_params(phi);
    const Eigen::MatrixXcd a =
        hmera::two_copy_merged(hmera::top_tensor(tp)).matricized({0, 1});
    checks.push_back({"central-isometry(phi=" + hmera::format_double(phi) +
                          ")",
                      rows_orthonormality_defect(a), 1e-12});
  }
  {
    const Eigen::MatrixXcd a = hmera::two_copy_merged(
                                   hmera::top_tensor(cfg.tensor_params()))
                                   .matricized({0, 1});
    checks.push_back({"central-isometry(config)",
                      rows_orthonormality_defect(a), 1e-12});
  }
  return checks;
}

std::vector<Check> spectrum_checks(const hmera::RunConfig& cfg) {
  std::vector<Check> checks;
  const hmera::SuperOperator s = hmera::perfect_superop(cfg.alpha, cfg.beta);
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(s.matrix);
  int unit = -1;
  int unit_count = 0;
  double subleading = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double mod = std::abs(solver.eigenvalues()[i]);
    if (std::abs(mod - 1.0) <= 1e-10) {
      ++unit_count;
      unit = static_cast<int>(i);
    } else {
      subleading = std::max(subleading, mod);
    }
  }
  checks.push_back({"one-unit-eigenvalue",
                    std::abs(static_cast<double>(unit_count) - 1.0), 0.5});
  checks.push_back({"subleading-inside-disk", subleading, 1.0 - 1e-4});
  if (unit_count == 1) {
    // The matrix acts on Pauli coefficient vectors; the identity operator is
    // the first basis element.
    const Eigen::VectorXcd v = solver.eigenvectors().col(unit);
    double dist = 1.0;
    if (std::abs(v[0]) > 1e-12) {
      dist = 0.0;
      for (Eigen::Index i = 1; i < v.size(); ++i) {
        dist = std::max(dist, std::abs(v[i]) / std::abs(v[0]));
      }
    }
    checks.push_back({"unit-eigenoperator-is-identity", dist, 1e-8});
  }
  return checks;
}

std::vector<Check> probability_checks() {
  std::vector<Check> checks;
  const hmera::TransitionTable t = hmera::unconditional_probabilities();
  hmera::Q5 sum = hmera::Q5::integer(0);
  for (const auto& [key, q] : t.unconditional) sum = sum + q;
  checks.push_back({"unconditional-sum-is-one",
                    sum == hmera::Q5::integer(1) ? 0.0 : 1.0, 0.5});
  const std::map<std::string, double> expected = {
      {"p(1->1)", -1.0 + 0.6 * std::sqrt(5.0)},
      {"p(1->2)", 1.0 - 0.4 * std::sqrt(5.0)},
      {"p(2->1)", 1.0 - 0.4 * std::sqrt(5.0)},
      {"p(2->2)", -4.0 + 1.8 * std::sqrt(5.0)},
      {"p(2->3)", 5.0 - 2.2 * std::sqrt(5.0)},
      {"p(3->2)", 5.0 - 2.2 * std::sqrt(5.0)},
      {"p(3->3)", -6.0 + 2.8 * std::sqrt(5.0)},
  };
  double worst = 0.0;
  for (const auto& [key, value] : expected) {
    worst = std::max(worst, std::abs(t.unconditional_value.at(key) - value));
  }
  checks.push_back({"unconditional-values", worst, 1e-12});
  return checks;
}

// ---------------------------------------------------------------------------
// Artifact builders shared by direct commands and `repro`.

std::string superop_csv_artifact(hmera::RunConfig cfg, const std::string& kind,
                                 int in_leg_first, int beta_sweep) {
  cfg.options["superop_kind"] = kind;
  if (kind == "perfect") {
    cfg.options["in_legs"] = std::to_string(in_leg_first) + "," +
                             std::to_string(in_leg_first + 1);
  } else {
    cfg.options["in_legs"] = std::to_string(in_leg_first);
  }
  std::vector<std::pair<double, Eigen::VectorXcd>> sweep;
  const auto eigen_rows = [&](double sweep_value,
                              const Eigen::MatrixXcd& matrix) {
    const std::vector<hmera::cplx> evals = sorted_eigenvalues(matrix);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(evals.size()));
    for (std::size_t i = 0; i < evals.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = evals[i];
    }
    sweep.emplace_back(sweep_value, std::move(v));
  };
  if (kind == "perfect") {
    if (beta_sweep > 0) {
      cfg.options["beta_sweep"] = std::to_string(beta_sweep);
      for (int k = 0; k < beta_sweep; ++k) {
        const double beta = 2.0 * hmera::kPi * (static_cast<double>(k) + 0.5) /
                            static_cast<double>(beta_sweep);
        eigen_rows(beta, hmera::perfect_superop(
                             cfg.alpha, beta,
                             {in_leg_first, in_leg_first + 1}).matrix);
      }
    } else {
      eigen_rows(cfg.beta, hmera::perfect_superop(
                               cfg.alpha, cfg.beta,
                               {in_leg_first, in_leg_first + 1}).matrix);
    }
  } else if (kind == "imperfect") {
    if (beta_sweep > 0) {
      throw std::invalid_argument(
          "--beta-sweep applies to --kind perfect only");
    }
    // Single-leg ascent channel; the two-leg deformed map is rectangular and
    // carries no spectrum.
    eigen_rows(cfg.theta,
               hmera::imperfect_superop(cfg.theta, in_leg_first).matrix);
  } else {
    throw std::invalid_argument("--kind must be 'perfect' or 'imperfect'");
  }
  return hmera::eigenvalues_csv(cfg, sweep);
}

json q5_to_json(const hmera::Q5& q) {
  return json{{"value", q.value()},
              {"rational", {q.a.num, q.a.den}},
              {"sqrt5", {q.b.num, q.b.den}}};
}

std::string probs_json_artifact(hmera::RunConfig cfg, std::int64_t samples,
                                int jobs, int tally_step) {
  if (tally_step <= 0) tally_step = std::min(8, cfg.layers);
  cfg.options["samples"] = std::to_string(samples);
  cfg.options["jobs"] = std::to_string(jobs);
  cfg.options["tally_step"] = std::to_string(tally_step);
  json j = hmera::artifact_header("transition-probabilities", cfg);

  const hmera::TransitionTable conditional = hmera::conditional_probabilities();
  const hmera::TransitionTable unconditional =
      hmera::unconditional_probabilities();
  json closed = json::object();
  for (const auto& [key, q] : unconditional.unconditional) {
    closed[key] = q5_to_json(q);
  }
  j["closed_form"] = std::move(closed);
  json cond = json::object();
  for (const auto& [key, q] : conditional.conditional) {
    cond[key] = q5_to_json(q);
  }
  j["conditional"] = std::move(cond);

  const hmera::TilingGraph g = cfg.tiling();
  json layer_rows = json::array();
  for (const hmera::LayerCount& row : hmera::layer_counts(g)) {
    layer_rows.push_back({{"layer", row.layer},
                          {"edge_polygons", row.edge_polygons},
                          {"vertex_polygons", row.vertex_polygons}});
  }
  j["layer_counts"] = std::move(layer_rows);
  j["boundary_qudits"] = g.boundary().size();

  const hmera::TransitionCounts mc =
      hmera::monte_carlo_transitions(g, samples, cfg.seed, jobs, tally_step);
  json monte = {{"samples", mc.samples},
                {"seed", cfg.seed},
                {"jobs", jobs},
                {"tally_step", mc.tally_step},
                {"counts", mc.counts},
                {"frequencies", mc.frequencies()}};
  json comparison = json::object();
  const auto freqs = mc.frequencies();
  for (const auto& [key, p] : unconditional.unconditional_value) {
    // Closed-form keys look like p(1->2); Monte Carlo keys like 1->2.
    const std::string mc_key = key.substr(2, key.size() - 3);
    const double freq = freqs.count(mc_key) ? freqs.at(mc_key) : 0.0;
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    comparison[key] = {{"closed_form", p},
                       {"frequency", freq},
                       {"standard_error", se},
                       {"deviation_se", (freq - p) / se}};
  }
  j["monte_carlo"] = std::move(monte);
  j["comparison"] = std::move(comparison);
  return hmera::json_dump(j);
}

// ---------------------------------------------------------------------------
// Subcommand wiring.

int run_cli(int argc, char** argv) {
  CLI::App app{"hyper-invariant tensor networks on the {5,4} tiling"};
  app.set_version_flag("--version", std::string("hmera ") + hmera::kVersion);
  app.require_subcommand(1);

  // --- tile ----------------------------------------------------------------
  auto* tile = app.add_subcommand("tile", "Build a tiling and export its "
                                          "dual graph as JSON");
  auto tile_flags = std::make_shared<ConfigFlags>();
  tile_flags->attach(tile);
  auto tile_out = std::make_shared<std::string>();
  tile->add_option("--out", *tile_out, "Output path (stdout when omitted)");
  tile->callback([tile_flags, tile_out] {
    const hmera::RunConfig cfg = tile_flags->resolve();
    const hmera::TilingGraph g = cfg.tiling();
    json j = hmera::artifact_header("tiling-graph", cfg);
    j.update(hmera::graph_to_json(g));
    emit(*tile_out, hmera::json_dump(j),
         "tiling-graph tiles=" + std::to_string(g.tiles().size()) +
             " edges=" + std::to_string(g.edges().size()) +
             " boundary=" + std::to_string(g.boundary().size()));
  });

  // --- build ---------------------------------------------------------------
  auto* build = app.add_subcommand("build", "Assemble the tensor network and "
                                            "report or dump its tensors");
  auto build_flags = std::make_shared<ConfigFlags>();
  build_flags->attach(build);
  auto build_out = std::make_shared<std::string>();
  auto build_dump = std::make_shared<int>(-1);
  build->add_option("--out", *build_out, "Output path (stdout when omitted)");
  build->add_option("--dump-tile", *build_dump,
                    "Dump this tile's tensor instead of the summary");
  build->callback([build_flags, build_out, build_dump] {
    const hmera::RunConfig cfg = build_flags->resolve();
    const hmera::TilingGraph g = cfg.tiling();
    const hmera::NetworkInstance net = cfg.network(g);
    if (*build_dump >= 0) {
      json j = hmera::artifact_header("tile-tensor", cfg);
      j["tile"] = *build_dump;
      j.update(hmera::tensor_to_json(net.tile_tensor(*build_dump)));
      emit(*build_out, hmera::json_dump(j),
           "tile-tensor tile=" + std::to_string(*build_dump));
      return;
    }
    long long edge = 0, vertex = 0;
    for (const hmera::Tile& t : g.tiles()) {
      if (t.role == hmera::TileRole::kEdgePolygon) ++edge;
      if (t.role == hmera::TileRole::kVertexPolygon) ++vertex;
    }
    json j = hmera::artifact_header("network-summary", cfg);
    j["tiles"] = g.tiles().size();
    j["edge_polygons"] = edge;
    j["vertex_polygons"] = vertex;
    j["boundary_qudits"] = g.boundary().size();
    j["open_bulk_legs"] = cfg.open_bulk_legs;
    json overrides = json::object();
    for (const auto& [t, angle] : net.tile_thetas()) {
      overrides[std::to_string(t)] = angle;
    }
    j["tile_theta"] = std::move(overrides);
    emit(*build_out, hmera::json_dump(j),
         "network-summary tiles=" + std::to_string(g.tiles().size()));
  });

  // --- verify ----------------------------------------------------------

  auto* verify = app.add_subcommand("verify", "Run numerical self-checks; "
                                              "exit 2 on tolerance failure");
  auto verify_flags = std::make_shared<ConfigFlags>();
  verify_flags->attach(verify);
  auto suite = std::make_shared<std::string>("isometry");
  verify->add_option("--suite", *suite,
                     "isometry, spectrum, probabilities, or all")
      ->check(CLI::IsMember({"isometry", "spectrum", "probabilities", "all"}));
  verify->callback([verify_flags, suite] {
    const hmera::RunConfig cfg = verify_flags->resolve();
    std::vector<Check> checks;
    if (*suite == "isometry" || *suite == "all") {
      const auto more = isometry_checks(cfg);
      checks.insert(checks.end(), more.begin(), more.end());
    }
    if (*suite == "spectrum" || *suite == "all") {
      const auto more = spectrum_checks(cfg);
      checks.insert(checks.end(), more.begin(), more.end());
    }
    if (*suite == "probabilities" || *suite == "all") {
      const auto more = probability_checks();
      checks.insert(checks.end(), more.begin(), more.end());
    }
    json failures = json::array();
    for (const Check& c : checks) {
      std::cout << (c.pass() ? "ok   " : "FAIL ") << c.name
                << " (worst=" << hmera::format_double(c.worst)
                << ", tol=" << hmera::format_double(c.tolerance) << ")\n";
      if (!c.pass()) {
        failures.push_back({{"check", c.name},
                            {"worst", c.worst},
                            {"tolerance", c.tolerance}});
      }
    }
    if (!failures.empty()) {
      throw ToleranceFailure(json{{"error", "tolerance"},
                                  {"suite", *suite},
                                  {"failures", failures},
                                  {"message", "verify checks failed"}});
    }
    std::cout << "verify: " << checks.size() << " checks passed ("
              << *suite << ")\n";
  });

  // --- rdm -------------------------------------------------------------
  auto* rdm = app.add_subcommand("rdm", "Reduced density matrix of a "
                                        "boundary region");
  auto rdm_flags = std::make_shared<ConfigFlags>();
  rdm_flags->attach(rdm);
  auto rdm_graph = std::make_shared<std::string>();
  auto rdm_region = std::make_shared<std::string>();
  auto rdm_out = std::make_shared<std::string>();
  rdm->add_option("--graph", *rdm_graph, "Tiling graph JSON file");
  rdm->add_option("--region", *rdm_region,
                  "Comma-separated boundary site indices")
      ->required();
  rdm->add_option("--out", *rdm_out, "Output path (stdout when omitted)");
  rdm->callback([rdm_flags, rdm_graph, rdm_region, rdm_out] {
    hmera::RunConfig cfg = rdm_flags->resolve();
    const hmera::TilingGraph g = load_or_build_graph(*rdm_graph, cfg);
    cfg.options["region"] = *rdm_region;
    const hmera::NetworkInstance net = cfg.network(g);
    const hmera::ReducedState state =
        hmera::reduced_density_matrix(net, parse_int_list(*rdm_region));
    json j = hmera::artifact_header("reduced-density-matrix", cfg);
    j.update(hmera::rdm_to_json(state));
    emit(*rdm_out, hmera::json_dump(j),
         "rdm region=" + *rdm_region + " dim=" +
             std::to_string(state.matrix.rows()));
  });

  // --- superop ---------------------------------------------------------
  auto* superop = app.add_subcommand("superop", "Ascending superoperator "
                                                "eigenvalues as CSV");
  auto superop_flags = std::make_shared<ConfigFlags>();
  superop_flags->attach(superop);
  auto superop_kind = std::make_shared<std::string>("perfect");
  auto superop_in = std::make_shared<int>(3);
  auto superop_sweep = std::make_shared<int>(0);
  auto superop_out = std::make_shared<std::string>();
  superop->add_option("--kind", *superop_kind, "perfect or imperfect")
      ->check(CLI::IsMember({"perfect", "imperfect"}));
  superop->add_option("--in-leg", *superop_in,
                      "Input leg (perfect: first of the adjacent pair)");
  superop->add_option("--beta-sweep", *superop_sweep,
                      "Number of beta samples strictly inside (0, 2*pi)");
  superop->add_option("--out", *superop_out,
                      "Output path (stdout when omitted)");
  superop->callback([superop_flags, superop_kind, superop_in, superop_sweep,
                     superop_out] {
    const hmera::RunConfig cfg = superop_flags->resolve();
    const std::string csv =
        superop_csv_artifact(cfg, *superop_kind, *superop_in, *superop_sweep);
    emit(*superop_out, csv,
         "superop-eigenvalues kind=" + *superop_kind);
  });

  // --- probs -----------------------------------------------------------
  auto* probs = app.add_subcommand("probs", "Closed-form ascent "
                                            "probabilities and Monte Carlo "
                                            "comparison");
  auto probs_flags = std::make_shared<ConfigFlags>();
  probs_flags->attach(probs);
  auto probs_samples = std::make_shared<std::int64_t>(100000);
  auto probs_jobs = std::make_shared<int>(1);
  auto probs_tally = std::make_shared<int>(0);
  auto probs_out = std::make_shared<std::string>();
  probs->add_option("--samples", *probs_samples, "Monte Carlo insertions");
  probs->add_option("--jobs", *probs_jobs, "Worker threads");
  probs->add_option("--tally-step", *probs_tally,
                    "First layer transition to tally (default: min(8, layers))");
  probs->add_option("--out", *probs_out, "Output path (stdout when omitted)");
  probs->callback([probs_flags, probs_samples, probs_jobs, probs_tally,
                   probs_out] {
    const hmera::RunConfig cfg = probs_flags->resolve();
    emit(*probs_out,
         probs_json_artifact(cfg, *probs_samples, *probs_jobs, *probs_tally),
         "transition-probabilities samples=" +
             std::to_string(*probs_samples));
  });

  // --- correlate -------------------------------------------------------
  auto* correlate = app.add_subcommand("correlate", "Boundary two-point "
                                                    "functions as CSV");
  auto corr_flags = std::make_shared<ConfigFlags>();
  corr_flags->attach(correlate);
  auto corr_graph = std::make_shared<std::string>();
  auto corr_sites = std::make_shared<std::string>("all-pairs");
  auto corr_max_sep = std::make_shared<int>(0);
  auto corr_ops = std::make_shared<std::string>();
  auto corr_jobs = std::make_shared<int>(1);
  auto corr_out = std::make_shared<std::string>();
  correlate->add_option("--graph", *corr_graph, "Tiling graph JSON file");
  correlate->add_option("--sites", *corr_sites,
                        "all-pairs, well-separated, or i,j");
  correlate->add_option("--max-sep", *corr_max_sep,
                        "Keep pairs with cyclic separation <= this (0 = all)");
  correlate->add_option("--ops", *corr_ops,
                        "Comma-separated two-letter operator labels "
                        "(default: all 15 traceless)");
  correlate->add_option("--jobs", *corr_jobs, "Worker threads");
  correlate->add_option("--out", *corr_out,
                        "Output path (stdout when omitted)");
  correlate->callback([corr_flags, corr_graph, corr_sites, corr_max_sep,
                       corr_ops, corr_jobs, corr_out] {
    hmera::RunConfig cfg = corr_flags->resolve();
    const hmera::TilingGraph g = load_or_build_graph(*corr_graph, cfg);
    cfg.options["sites"] = *corr_sites;
    cfg.options["max_sep"] = std::to_string(*corr_max_sep);
    cfg.options["jobs"] = std::to_string(*corr_jobs);
    const hmera::NetworkInstance net = cfg.network(g);

    std::vector<std::pair<int, int>> pairs;
    const int n = static_cast<int>(g.boundary().size());
    if (*corr_sites == "all-pairs") {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
      }
    } else if (*corr_sites == "well-separated") {
      pairs = hmera::well_separated_pairs(g);
    } else {
      const std::vector<int> sites = parse_int_list(*corr_sites);
      if (sites.size() != 2) {
        throw std::invalid_argument("--sites expects all-pairs, "
                                    "well-separated, or two indices i,j");
      }
      pairs.emplace_back(sites[0], sites[1]);
    }
    if (*corr_max_sep > 0) {
      std::vector<std::pair<int, int>> kept;
      for (const auto& [i, j] : pairs) {
        const int d = std::abs(i - j);
        if (std::min(d, n - d) <= *corr_max_sep) kept.emplace_back(i, j);
      }
      pairs = std::move(kept);
    }
    std::vector<std::string> labels;
    if (!corr_ops->empty()) {
      std::size_t start = 0;
      while (start <= corr_ops->size()) {
        const auto comma = corr_ops->find(',', start);
        const std::string piece = corr_ops->substr(
            start,
            comma == std::string::npos ? std::string::npos : comma - start);
        if (!piece.empty()) labels.push_back(piece);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      cfg.options["ops"] = *corr_ops;
    }
    const std::vector<hmera::CorrelatorResult> rows =
        hmera::correlator_scan(net, pairs, labels, *corr_jobs);
    emit(*corr_out, hmera::correlators_csv(cfg, rows),
         "correlators rows=" + std::to_string(rows.size()));
  });

  // --- push ------------------------------------------------------------
  auto* push = app.add_subcommand("push", "Push a bulk logical operator to "
                                          "the boundary");
  auto push_flags = std::make_shared<ConfigFlags>();
  push_flags->attach(push);
  auto push_graph = std::make_shared<std::string>();
  auto push_bulk = std::make_shared<std::string>();
  auto push_op = std::make_shared<std::string>("Zbar");
  auto push_closed = std::make_shared<bool>(false);
  auto push_out = std::make_shared<std::string>();
  push->add_option("--graph", *push_graph, "Tiling graph JSON file");
  push->add_option("--bulk", *push_bulk,
                   "Source tile: L<layer>T<index> or a tile id")
      ->required();
  push->add_option("--op", *push_op, "identity, Xbar, Ybar, or Zbar");
  push->add_flag("--closed-bulk", *push_closed,
                 "Keep spectator bulk legs fixed to their logical states");
  push->add_option("--out", *push_out, "Output path (stdout when omitted)");
  push->callback([push_flags, push_graph, push_bulk, push_op, push_closed,
                  push_out] {
    hmera::RunConfig cfg = push_flags->resolve();
    const hmera::TilingGraph g = load_or_build_graph(*push_graph, cfg);
    if (!*push_closed) cfg.open_bulk_legs = true;
    cfg.options["bulk"] = *push_bulk;
    cfg.options["op"] = *push_op;
    const hmera::NetworkInstance net = cfg.network(g);
    const int source = parse_bulk_site(*push_bulk, g);
    const hmera::PushResult result =
        hmera::push_operator(net, source, *push_op);
    json j = hmera::artifact_header("operator-push", cfg);
    j.update(hmera::push_to_json(result));
    emit(*push_out, hmera::json_dump(j),
         "operator-push tile=" + std::to_string(source) + " op=" + *push_op +
             " residual=" + hmera::format_double(result.residual_error));
  });

  // --- repro -----------------------------------------------------------
  auto* repro = app.add_subcommand("repro", "Reproduce a published data "
                                            "series with pinned settings");
  auto repro_target = std::make_shared<std::string>();
  auto repro_out = std::make_shared<std::string>();
  repro->add_option("target", *repro_target, "fig3 or probs")
      ->required()
      ->check(CLI::IsMember({"fig3", "probs"}));
  repro->add_option("--out", *repro_out, "Output path");
  repro->callback([repro_target, repro_out] {
    if (*repro_target == "fig3") {
      hmera::RunConfig cfg;
      cfg.alpha = hmera::kPi / 3.0;
      hmera::apply_seed_override(cfg);
      const std::string path =
          repro_out->empty() ? "fig3_eigs.csv" : *repro_out;
      emit(path, superop_csv_artifact(cfg, "perfect", 3, 64),
           "superop-eigenvalues sweep=64");
      return;
    }
    hmera::RunConfig cfg;
    cfg.layers = 12;
    cfg.seed = 7;
    hmera::apply_seed_override(cfg);
    const std::string path = repro_out->empty() ? "probs.json" : *repro_out;
    emit(path, probs_json_artifact(cfg, 100000, 1, 8),
         "transition-probabilities samples=100000");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ToleranceFailure& e) {
    std::cerr << e.diagnostic.dump() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", "invalid-config"}, {"message", e.what()}}
                     .dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "runtime"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
}
