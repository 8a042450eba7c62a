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

#ifndef HMERA_PROBABILITIES_HPP
#define HMERA_PROBABILITIES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hmera/tiling.hpp"

namespace hmera {

// Exact rational arithmetic. Numerators and denominators stay tiny here
// (transition probabilities), so int64 with 128-bit intermediates is ample.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rat() = default;
  Rat(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("Rat: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  static Rat from_i128(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr __int128 kMax = INT64_MAX;
    if (n > kMax || n < -kMax || d > kMax) {
      throw std::overflow_error("Rat: value out of int64 range");
    }
    Rat r;
    r.num = static_cast<std::int64_t>(n);
    r.den = static_cast<std::int64_t>(d);
    return r;
  }

  friend Rat operator+(const Rat& x, const Rat& y) {
    return from_i128(static_cast<__int128>(x.num) * y.den +
                         static_cast<__int128>(y.num) * x.den,
                     static_cast<__int128>(x.den) * y.den);
  }
  friend Rat operator-(const Rat& x, const Rat& y) {
    return from_i128(static_cast<__int128>(x.num) * y.den -
                         static_cast<__int128>(y.num) * x.den,
                     static_cast<__int128>(x.den) * y.den);
  }
  friend Rat operator*(const Rat& x, const Rat& y) {
    return from_i128(static_cast<__int128>(x.num) * y.num,
                     static_cast<__int128>(x.den) * y.den);
  }
  friend Rat operator/(const Rat& x, const Rat& y) {
    if (y.num == 0) throw std::invalid_argument("Rat: division by zero");
    return from_i128(static_cast<__int128>(x.num) * y.den,
                     static_cast<__int128>(x.den) * y.num);
  }
  friend Rat operator-(const Rat& x) { return Rat(-x.num, x.den); }
  friend bool operator==(const Rat& x, const Rat& y) {
    return x.num == y.num && x.den == y.den;
  }
  friend bool operator!=(const Rat& x, const Rat& y) { return !(x == y); }

  double value() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

// An element of the field Q(sqrt 5): a + b*sqrt(5) with rational a, b.
// Closed under +, -, *, / because sqrt(5)^2 = 5; equality is exact.
struct Q5 {
  Rat a;  // rational part
  Rat b;  // coefficient of sqrt(5)

  Q5() = default;
  Q5(Rat ra, Rat rb = Rat(0)) : a(ra), b(rb) {}
  static Q5 integer(std::int64_t n) { return Q5(Rat(n)); }
  static Q5 sqrt5() { return Q5(Rat(0), Rat(1)); }

  friend Q5 operator+(const Q5& x, const Q5& y) {
    return Q5(x.a + y.a, x.b + y.b);
  }
  friend Q5 operator-(const Q5& x, const Q5& y) {
    return Q5(x.a - y.a, x.b - y.b);
  }
  friend Q5 operator-(const Q5& x) { return Q5(-x.a, -x.b); }
  friend Q5 operator*(const Q5& x, const Q5& y) {
    return Q5(x.a * y.a + Rat(5) * (x.b * y.b), x.a * y.b + x.b * y.a);
  }
  Q5 inverse() const {
    // 1/(a + b sqrt5) = (a - b sqrt5) / (a^2 - 5 b^2)
    const Rat d = a * a - Rat(5) * (b * b);
    if (d.num == 0) throw std::invalid_argument("Q5: inverse of zero");
    return Q5(a / d, -(b / d));
  }
  friend Q5 operator/(const Q5& x, const Q5& y) { return x * y.inverse(); }
  friend bool operator==(const Q5& x, const Q5& y) {
    return x.a == y.a && x.b == y.b;
  }
  friend bool operator!=(const Q5& x, const Q5& y) { return !(x == y); }

  double value() const { return a.value() + b.value() * std::sqrt(5.0); }
};

// Conditional and unconditional transition probabilities for the weight
// random walk of an ascending operator insertion. All values are exact
// elements of Q(sqrt 5); `unconditional_value` carries rounded doubles.
struct TransitionTable {
  std::map<std::string, Q5> conditional;
  std::map<std::string, Q5> unconditional;
  std::map<std::string, double> unconditional_value;
};

// The conditional transition probabilities of the operator weight between
// adjacent layers, in the deep-network limit of the tile-count ratios.
inline TransitionTable conditional_probabilities() {
  TransitionTable t;
  const Q5 one = Q5::integer(1);
  const Q5 s5 = Q5::sqrt5();
  // A fresh boundary insertion lands on a uniformly random open leg:
  // 3g(n) of the 4f(n)+3g(n) legs belong to vertex polygons.
  t.conditional["P0(1->2)"] = Q5(Rat(3), Rat(-6, 5));  // 3 - 6/sqrt5
  t.conditional["P0(1->1)"] = Q5(Rat(-2), Rat(6, 5));
  // Mid-flow, a weight-1 operator sits on an inward leg of an edge polygon;
  // of those legs, g(n) continue into a vertex polygon and 2f(n) do not.
  t.conditional["P(1->2|1)"] = s5 - Q5::integer(2);
  t.conditional["P(1->1|1)"] = Q5::integer(3) - s5;
  // Just-expanded weight-2 operators: f(n-2) shrink paths vs 2g(n-1)
  // expansion paths out of the g(n) vertex polygons.
  t.conditional["P(2->2|1->2)"] = s5 - Q5::integer(2);
  t.conditional["P(2->3|1->2)"] = Q5::integer(3) - s5;
  // A weight-2 operator that stayed at weight 2, or shrank from weight 3,
  // always collapses to weight 1 at the next step.
  t.conditional["P(2->1|2->2)"] = one;
  t.conditional["P(2->1|3->2)"] = one;
  // Weight-3 operators branch with the same leg-count ratios as weight 1.
  t.conditional["P(3->2|3)"] = s5 - Q5::integer(2);
  t.conditional["P(3->3|3)"] = Q5::integer(3) - s5;
  return t;
}

// Solves the stationarity balance system for the per-layer transition
// frequencies p(i->j) exactly over Q(sqrt 5). Unknowns x = p(1->1) and
// y = p(3->3); every other frequency is a conditional-ratio multiple, the
// two equations are normalization and the flow balance p(2->3) =
// P(2->3|1->2) p(1->2).
inline TransitionTable unconditional_probabilities() {
  TransitionTable t = conditional_probabilities();
  const Q5 one = Q5::integer(1);
  const Q5 r1 = t.conditional["P(1->2|1)"] / t.conditional["P(1->1|1)"];
  const Q5 r3 = t.conditional["P(3->2|3)"] / t.conditional["P(3->3|3)"];
  const Q5 s = t.conditional["P(2->2|1->2)"] / t.conditional["P(2->3|1->2)"];
  const Q5 b = t.conditional["P(2->3|1->2)"];

  // Row 0: x (1 + 2 r1) + y (1 + 2 r3 + s r3) = 1   (sum of all seven)
  // Row 1: x (b r1) + y (-r3) = 0                    (2->3 follows 1->2)
  Q5 m[2][3] = {
      {one + Q5::integer(2) * r1, one + Q5::integer(2) * r3 + s * r3, one},
      {b * r1, -r3, Q5::integer(0)}};
  // Gaussian elimination on the 2x3 system.
  if (m[0][0] == Q5::integer(0)) std::swap(m[0], m[1]);
  const Q5 factor = m[1][0] / m[0][0];
  for (int c = 0; c < 3; ++c) m[1][c] = m[1][c] - factor * m[0][c];
  const Q5 y = m[1][2] / m[1][1];
  const Q5 x = (m[0][2] - m[0][1] * y) / m[0][0];

  t.unconditional["p(1->1)"] = x;
  t.unconditional["p(1->2)"] = r1 * x;
  t.unconditional["p(2->1)"] = r1 * x;
  t.unconditional["p(2->3)"] = r3 * y;
  t.unconditional["p(2->2)"] = s * (r3 * y);
  t.unconditional["p(3->2)"] = r3 * y;
  t.unconditional["p(3->3)"] = y;
  for (const auto& [key, q] : t.unconditional) {
    t.unconditional_value[key] = q.value();
  }
  return t;
}

// Empirical per-layer transition frequencies from tracing uniformly random
// boundary insertions up the tiling.
struct TransitionCounts {
  std::map<std::string, std::int64_t> counts;
  std::int64_t samples = 0;
  int tally_step = 0;

  std::map<std::string, double> frequencies() const {
    std::map<std::string, double> f;
    for (const auto& [key, c] : counts) {
      f[key] = static_cast<double>(c) / static_cast<double>(samples);
    }
    return f;
  }
};

namespace detail {

// Uniform integer in [0, n) by rejection; unbiased and identical across
// platforms (std::uniform_int_distribution is implementation-defined).
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = (UINT64_MAX / n) * n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// One coarse-graining step: the operator support, given as the parent-side
// slots carrying it, moves to the inward edges of the tiles it sits on.
// Returns the transition label "w_before->w_after".
inline std::string ascend_step(const TilingGraph& g,
                               std::vector<BoundarySlot>* support) {
  const int before = static_cast<int>(support->size());
  std::vector<int> tiles;
  for (const BoundarySlot& s : *support) tiles.push_back(s.tile);
  std::sort(tiles.begin(), tiles.end());
  tiles.erase(std::unique(tiles.begin(), tiles.end()), tiles.end());
  std::vector<BoundarySlot> next;
  for (int t : tiles) {
    for (int l = 0; l < g.inward_leg_count(t); ++l) {
      const auto peer = g.peer(t, l);
      if (!peer) throw std::logic_error("ascend_step: dangling inward leg");
      next.push_back(*peer);
    }
  }
  const int after = static_cast<int>(next.size());
  if (after > 3) {
    throw std::logic_error("ascend_step: operator weight exceeded 3");
  }
  *support = std::move(next);
  return std::to_string(before) + "->" + std::to_string(after);
}

}  // namespace detail

// Traces `samples` uniformly random boundary insertions `tally_step` layers
// up the tiling and tallies the weight transition taken at that step only
// (earlier steps are burn-in), so each path contributes one binomial count.
// Paths are processed in fixed chunks with chunk-derived RNG streams, making
// the result independent of `jobs`.
inline TransitionCounts monte_carlo_transitions(const TilingGraph& g,
                                                std::int64_t samples,
                                                std::uint64_t seed,
                                                int jobs = 1,
                                                int tally_step = 8) {
  if (samples <= 0) {
    throw std::invalid_argument("monte_carlo_transitions: samples < 1");
  }
  if (tally_step < 1 || tally_step > g.layers()) {
    throw std::invalid_argument(
        "monte_carlo_transitions: tally step outside the layer range");
  }
  if (jobs < 1) {
    throw std::invalid_argument("monte_carlo_transitions: jobs < 1");
  }
  const auto& boundary = g.boundary();
  if (boundary.empty()) {
    throw std::invalid_argument("monte_carlo_transitions: empty boundary");
  }

  constexpr std::int64_t kChunk = 1024;
  const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::map<std::string, std::int64_t>> partial(
      static_cast<std::size_t>(chunks));

  const auto run_chunk = [&](std::int64_t c) {
    // seed_seq consumes 32-bit words; split seed and chunk index explicitly.
    std::seed_seq sseq{static_cast<std::uint32_t>(seed),
                       static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(c),
                       static_cast<std::uint32_t>(c >> 32)};
    std::mt19937_64 rng(sseq);
    const std::int64_t begin = c * kChunk;
    const std::int64_t end = std::min(begin + kChunk, samples);
    auto& tally = partial[static_cast<std::size_t>(c)];
    std::vector<BoundarySlot> support;
    for (std::int64_t i = begin; i < end; ++i) {
      support.assign(
          {boundary[detail::bounded_draw(rng, boundary.size())]});
      std::string label;
      for (int step = 0; step < tally_step; ++step) {
        label = detail::ascend_step(g, &support);
      }
      ++tally[label];
    }
  };

  if (jobs == 1) {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (std::int64_t c = w; c < chunks; c += jobs) run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  TransitionCounts out;
  out.samples = samples;
  out.tally_step = tally_step;
  for (const auto& tally : partial) {
    for (const auto& [key, c] : tally) out.counts[key] += c;
  }
  return out;
}

}  // namespace hmera

#endif  // HMERA_PROBABILITIES_HPP
