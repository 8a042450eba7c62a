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

#ifndef HMERA_PAULI_HPP
#define HMERA_PAULI_HPP

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hmera {

using cplx = std::complex<double>;

// n-qubit Pauli with exact phase tracking: the operator is
// i^phase_exponent * prod_q X^{x_q} Z^{z_q}, with qubit 0 the first (leftmost)
// tensor factor, i.e. the most significant bit of a computational basis index.
class PauliOperator {
 public:
  explicit PauliOperator(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 32) {
      throw std::invalid_argument("PauliOperator: qubit count out of range");
    }
  }

  // ASCII form over {I,X,Y,Z} with an optional leading phase token among
  // {+, +i, -, -i} (also accepts bare "i").
  static PauliOperator from_string(std::string_view s) {
    int k = 0;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
      bool neg = s[0] == '-';
      s.remove_prefix(1);
      if (!s.empty() && s[0] == 'i') {
        k = 1;
        s.remove_prefix(1);
      }
      if (neg) k += 2;
    } else if (!s.empty() && s[0] == 'i') {
      k = 1;
      s.remove_prefix(1);
    }
    PauliOperator p(static_cast<int>(s.size()));
    for (int q = 0; q < p.n_; ++q) {
      switch (s[q]) {
        case 'I': break;
        case 'X': p.x_ |= bit(q); break;
        case 'Y': p.x_ |= bit(q); p.z_ |= bit(q); k += 1; break;
        case 'Z': p.z_ |= bit(q); break;
        default:
          throw std::invalid_argument("PauliOperator: bad letter in string");
      }
    }
    p.k_ = mod4(k);
    return p;
  }

  std::string to_string() const {
    std::string out;
    int y_count = 0;
    std::string letters;
    letters.reserve(n_);
    for (int q = 0; q < n_; ++q) {
      bool x = x_ & bit(q), z = z_ & bit(q);
      if (x && z) { letters += 'Y'; ++y_count; }
      else if (x) letters += 'X';
      else if (z) letters += 'Z';
      else letters += 'I';
    }
    switch (mod4(k_ - y_count)) {
      case 0: break;
      case 1: out += "+i"; break;
      case 2: out += "-"; break;
      case 3: out += "-i"; break;
    }
    out += letters;
    return out;
  }

  int n_qubits() const { return n_; }
  bool x_bit(int q) const { return x_ & bit(q); }
  bool z_bit(int q) const { return z_ & bit(q); }
  std::uint64_t x_bits() const { return x_; }
  std::uint64_t z_bits() const { return z_; }
  int phase_exponent() const { return k_; }

  cplx phase() const {
    static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[k_];
  }

  // Hamming weight of the support.
  int weight() const { return std::popcount(x_ | z_); }
  std::uint64_t support_mask() const { return x_ | z_; }

  bool is_identity() const { return x_ == 0 && z_ == 0 && k_ == 0; }
  bool is_identity_up_to_phase() const { return x_ == 0 && z_ == 0; }

  // True when supp(p) is contained in the given qubit set (bit q for qubit q).
  bool supported_inside(std::uint64_t qubit_mask) const {
    return (support_mask() & ~qubit_mask) == 0;
  }

  PauliOperator multiplied_by(const PauliOperator& rhs) const {
    if (rhs.n_ != n_) {
      throw std::invalid_argument("PauliOperator: size mismatch in product");
    }
    PauliOperator out(n_);
    out.x_ = x_ ^ rhs.x_;
    out.z_ = z_ ^ rhs.z_;
    out.k_ = mod4(k_ + rhs.k_ + 2 * std::popcount(z_ & rhs.x_));
    return out;
  }

  friend PauliOperator operator*(const PauliOperator& a,
                                 const PauliOperator& b) {
    return a.multiplied_by(b);
  }

  bool commutes_with(const PauliOperator& rhs) const {
    if (rhs.n_ != n_) {
      throw std::invalid_argument("PauliOperator: size mismatch in commutator");
    }
    return ((std::popcount(x_ & rhs.z_) + std::popcount(z_ & rhs.x_)) & 1) == 0;
  }

  PauliOperator adjoint() const {
    PauliOperator out = *this;
    out.k_ = mod4(-k_ + 2 * std::popcount(x_ & z_));
    return out;
  }

  // Same letters, phase multiplied by i^dk.
  PauliOperator with_extra_phase(int dk) const {
    PauliOperator out = *this;
    out.k_ = mod4(k_ + dk);
    return out;
  }

  bool same_letters(const PauliOperator& rhs) const {
    return n_ == rhs.n_ && x_ == rhs.x_ && z_ == rhs.z_;
  }

  bool operator==(const PauliOperator& rhs) const {
    return same_letters(rhs) && k_ == rhs.k_;
  }

  // Applies the operator to a 2^n state vector without materializing the
  // dense matrix: X^x Z^z |c> = (-1)^{z.c} |c ^ x|, times the global phase.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
    const std::int64_t dim = std::int64_t{1} << n_;
    if (v.size() != dim) {
      throw std::invalid_argument("PauliOperator: state dimension mismatch");
    }
    const std::uint64_t xm = index_mask(x_), zm = index_mask(z_);
    const cplx ph = phase();
    Eigen::VectorXcd out(dim);
    for (std::int64_t c = 0; c < dim; ++c) {
      const double sign =
          (std::popcount(zm & static_cast<std::uint64_t>(c)) & 1) ? -1.0 : 1.0;
      out[static_cast<std::int64_t>(c ^ static_cast<std::int64_t>(xm))] =
          ph * sign * v[c];
    }
    return out;
  }

  Eigen::MatrixXcd dense() const {
    const std::int64_t dim = std::int64_t{1} << n_;
    const std::uint64_t xm = index_mask(x_), zm = index_mask(z_);
    const cplx ph = phase();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::int64_t c = 0; c < dim; ++c) {
      const double sign =
          (std::popcount(zm & static_cast<std::uint64_t>(c)) & 1) ? -1.0 : 1.0;
      m(static_cast<std::int64_t>(c ^ static_cast<std::int64_t>(xm)), c) =
          ph * sign;
    }
    return m;
  }

 private:
  static std::uint64_t bit(int q) { return std::uint64_t{1} << q; }
  static int mod4(int k) { return ((k % 4) + 4) % 4; }

  // Converts a per-qubit mask (bit q = qubit q) to an index-space mask
  // (qubit q lives at index bit n-1-q).
  std::uint64_t index_mask(std::uint64_t qubit_mask) const {
    std::uint64_t out = 0;
    for (int q = 0; q < n_; ++q) {
      if (qubit_mask & bit(q)) out |= std::uint64_t{1} << (n_ - 1 - q);
    }
    return out;
  }

  int n_;
  std::uint64_t x_ = 0, z_ = 0;
  int k_ = 0;
};

// An [[n,k,d]] stabilizer code given by independent commuting generators and
// one (X, Z) logical pair per logical qubit.
struct StabilizerCode {
  int n = 0;
  int k = 0;
  std::vector<PauliOperator> generators;
  std::vector<std::pair<PauliOperator, PauliOperator>> logical_ops;

  // All 2^(n-k) signed group elements, ordered by generator subset mask.
  std::vector<PauliOperator> group() const {
    std::vector<PauliOperator> out;
    const std::size_t count = std::size_t{1} << generators.size();
    out.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
      PauliOperator p(n);
      for (std::size_t g = 0; g < generators.size(); ++g) {
        if (mask & (std::size_t{1} << g)) p = p * generators[g];
      }
      out.push_back(p);
    }
    return out;
  }

  // |0...0> projected into the code space and normalized. The projector is
  // applied generator by generator, fixing all phases deterministically.
  Eigen::VectorXcd codeword_zero() const {
    const std::int64_t dim = std::int64_t{1} << n;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v[0] = 1.0;
    for (const auto& g : generators) v = 0.5 * (v + g.apply(v));
    const double nrm = v.norm();
    if (nrm < 1e-12) {
      throw std::runtime_error(
          "StabilizerCode: |0...0> has no support in the code space");
    }
    return v / nrm;
  }

  // Orthonormal logical basis {|0bar>, Xbar|0bar>, ...} for k = 1.
  std::vector<Eigen::VectorXcd> logical_basis() const {
    if (k != 1 || logical_ops.size() != 1) {
      throw std::runtime_error(
          "StabilizerCode: logical basis implemented for k = 1 only");
    }
    std::vector<Eigen::VectorXcd> basis;
    basis.push_back(codeword_zero());
    basis.push_back(logical_ops[0].first.apply(basis[0]));
    return basis;
  }

  // Encoding isometry V: C^{2^k} -> C^{2^n} with columns the logical basis.
  Eigen::MatrixXcd encoding_map() const {
    auto basis = logical_basis();
    Eigen::MatrixXcd v(std::int64_t{1} << n, basis.size());
    for (std::size_t c = 0; c < basis.size(); ++c) v.col(c) = basis[c];
    return v;
  }
};

// The [[5,1,3]] code with generators XZZXI, IXZZX, XIXZZ, ZXIXZ and logical
// pair Xbar = XXXXX, Zbar = ZZZZZ.
inline StabilizerCode five_qubit_code() {
  StabilizerCode code;
  code.n = 5;
  code.k = 1;
  code.generators = {
      PauliOperator::from_string("XZZXI"), PauliOperator::from_string("IXZZX"),
      PauliOperator::from_string("XIXZZ"), PauliOperator::from_string("ZXIXZ")};
  code.logical_ops = {{PauliOperator::from_string("XXXXX"),
                       PauliOperator::from_string("ZZZZZ")}};
  return code;
}

struct KnillLaflammeResult {
  // coefficients(a, b) is the scalar c with <i|E_a^dag E_b|j> = c delta_ij
  // (meaningful when satisfied).
  Eigen::MatrixXcd coefficients;
  bool satisfied = false;
  double max_deviation = 0.0;
};

// Checks <i|E_a^dag E_b|j> = C_ab delta_ij over the orthonormal logical basis.
inline KnillLaflammeResult knill_laflamme_matrix(
    const StabilizerCode& code, const std::vector<PauliOperator>& errors,
    double tol = 1e-10) {
  for (const auto& e : errors) {
    if (e.n_qubits() != code.n) {
      throw std::invalid_argument("knill_laflamme_matrix: error size mismatch");
    }
  }
  const auto basis = code.logical_basis();
  const std::size_t d = basis.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const cplx g = basis[i].dot(basis[j]);
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - want) > 1e-10) {
        throw std::runtime_error(
            "knill_laflamme_matrix: logical basis is not orthonormal");
      }
    }
  }
  std::vector<std::vector<Eigen::VectorXcd>> applied(errors.size());
  for (std::size_t a = 0; a < errors.size(); ++a) {
    for (const auto& b : basis) applied[a].push_back(errors[a].apply(b));
  }
  KnillLaflammeResult res;
  res.coefficients = Eigen::MatrixXcd::Zero(errors.size(), errors.size());
  res.satisfied = true;
  for (std::size_t a = 0; a < errors.size(); ++a) {
    for (std::size_t b = 0; b < errors.size(); ++b) {
      Eigen::MatrixXcd block(d, d);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          block(i, j) = applied[a][i].dot(applied[b][j]);
        }
      }
      const cplx c = block.trace() / static_cast<double>(d);
      res.coefficients(a, b) = c;
      const double dev =
          (block - c * Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
      res.max_deviation = std::max(res.max_deviation, dev);
      if (dev > tol) res.satisfied = false;
    }
  }
  return res;
}

// Searches the stabilizer group (optionally extended by the logical Z
// representative, matching states stabilized by Zbar) for an element that is
// supported inside `support` (1-based qubit numbers; phase ignored) and
// anticommutes with `target`. Returns the first hit in deterministic group
// order, or nullopt.
inline std::optional<PauliOperator> anticommuting_stabilizer(
    const StabilizerCode& code, const PauliOperator& target,
    const std::vector<int>& support, bool extend_with_logical_z = false) {
  if (target.n_qubits() != code.n) {
    throw std::invalid_argument("anticommuting_stabilizer: size mismatch");
  }
  std::uint64_t mask = 0;
  for (int q : support) {
    if (q < 1 || q > code.n) {
      throw std::invalid_argument("anticommuting_stabilizer: bad qubit index");
    }
    mask |= std::uint64_t{1} << (q - 1);
  }
  std::vector<PauliOperator> candidates = code.group();
  if (extend_with_logical_z) {
    const std::size_t base = candidates.size();
    for (std::size_t i = 0; i < base; ++i) {
      candidates.push_back(candidates[i] * code.logical_ops[0].second);
    }
  }
  for (const auto& s : candidates) {
    if (s.is_identity_up_to_phase()) continue;
    if (!s.supported_inside(mask)) continue;
    if (!s.commutes_with(target)) return s;
  }
  return std::nullopt;
}

// Classification of an n-qubit Pauli against the code normalizer: every
// element of N(S) is (phase) * S * L with S in the stabilizer group and L a
// logical representative. For k = 1 the logical classes are indexed
// 0:I, 1:Xbar, 2:Ybar, 3:Zbar.
struct LogicalCoset {
  int logical_index = 0;
  cplx relative_phase = 1.0;  // p = relative_phase * (group element) * L
};

class NormalizerTable {
 public:
  explicit NormalizerTable(const StabilizerCode& code) {
    if (code.k != 1) {
      throw std::invalid_argument("NormalizerTable: requires k = 1");
    }
    const auto& xbar = code.logical_ops[0].first;
    const auto& zbar = code.logical_ops[0].second;
    // Ybar = i * Xbar * Zbar is Hermitian when Xbar, Zbar are.
    std::vector<PauliOperator> logicals = {PauliOperator(code.n), xbar,
                                           (xbar * zbar).with_extra_phase(1),
                                           zbar};
    const auto group = code.group();
    for (int l = 0; l < 4; ++l) {
      for (const auto& s : group) {
        const PauliOperator rep = s * logicals[l];
        table_.emplace(key(rep), Entry{l, rep.phase_exponent()});
      }
    }
  }

  std::optional<LogicalCoset> classify(const PauliOperator& p) const {
    auto it = table_.find(key(p));
    if (it == table_.end()) return std::nullopt;
    LogicalCoset out;
    out.logical_index = it->second.logical_index;
    const int rel = (((p.phase_exponent() - it->second.phase_exponent) % 4) +
                     4) % 4;
    static const cplx ph[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    out.relative_phase = ph[rel];
    return out;
  }

 private:
  struct Entry {
    int logical_index;
    int phase_exponent;
  };

  static std::pair<std::uint64_t, std::uint64_t> key(const PauliOperator& p) {
    return {p.x_bits(), p.z_bits()};
  }

  std::map<std::pair<std::uint64_t, std::uint64_t>, Entry> table_;
};

// Enumerates all 4^n phase-free Paulis of weight <= max_weight, sorted by
// weight (stable within a weight class: per-qubit letter scan order).
inline std::vector<PauliOperator> paulis_up_to_weight(int n, int max_weight) {
  if (n < 1 || n > 15) {
    throw std::invalid_argument("paulis_up_to_weight: qubit count out of range");
  }
  std::vector<PauliOperator> out;
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  for (std::uint64_t code = 0; code < count; ++code) {
    std::string s;
    int w = 0;
    for (int q = 0; q < n; ++q) {
      const int letter = (code >> (2 * q)) & 3;
      s += "IXYZ"[letter];
      if (letter != 0) ++w;
    }
    if (w <= max_weight) out.push_back(PauliOperator::from_string(s));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PauliOperator& a, const PauliOperator& b) {
                     return a.weight() < b.weight();
                   });
  return out;
}

}  // namespace hmera

#endif  // HMERA_PAULI_HPP
