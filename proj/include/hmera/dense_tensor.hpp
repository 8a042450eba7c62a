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

#ifndef HMERA_DENSE_TENSOR_HPP
#define HMERA_DENSE_TENSOR_HPP

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hmera {

using cplx = std::complex<double>;

// Dense complex tensor, row-major with leg 0 slowest. Legs may carry string
// labels (used for label-driven contraction in the network) and the tensor
// may carry free-form metadata tags.
class DenseTensor {
 public:
  DenseTensor() = default;

  explicit DenseTensor(std::vector<int> dims) : dims_(std::move(dims)) {
    for (int d : dims_) {
      if (d < 1) throw std::invalid_argument("DenseTensor: bad dimension");
    }
    data_.assign(static_cast<std::size_t>(size()), cplx(0, 0));
  }

  static DenseTensor from_vector(const Eigen::VectorXcd& v,
                                 std::vector<int> dims) {
    DenseTensor t(std::move(dims));
    if (v.size() != t.size()) {
      throw std::invalid_argument("DenseTensor: vector size mismatch");
    }
    std::copy(v.data(), v.data() + v.size(), t.data_.begin());
    return t;
  }

  // Builds the tensor with legs [row_dims..., col_dims...] from a matrix
  // whose row index combines row_dims (first slowest) and likewise columns.
  static DenseTensor from_matrix(const Eigen::MatrixXcd& m,
                                 std::vector<int> row_dims,
                                 std::vector<int> col_dims) {
    std::int64_t rows = 1, cols = 1;
    for (int d : row_dims) rows *= d;
    for (int d : col_dims) cols *= d;
    if (m.rows() != rows || m.cols() != cols) {
      throw std::invalid_argument("DenseTensor: matrix shape mismatch");
    }
    std::vector<int> dims = row_dims;
    dims.insert(dims.end(), col_dims.begin(), col_dims.end());
    DenseTensor t(std::move(dims));
    for (std::int64_t r = 0; r < rows; ++r) {
      for (std::int64_t c = 0; c < cols; ++c) {
        t.data_[static_cast<std::size_t>(r * cols + c)] = m(r, c);
      }
    }
    return t;
  }

  int rank() const { return static_cast<int>(dims_.size()); }
  int dim(int leg) const { return dims_.at(static_cast<std::size_t>(leg)); }
  const std::vector<int>& dims() const { return dims_; }

  std::int64_t size() const {
    std::int64_t n = 1;
    for (int d : dims_) n *= d;
    return n;
  }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  cplx& at(const std::vector<int>& idx) {
    return data_[static_cast<std::size_t>(linear_index(idx))];
  }
  const cplx& at(const std::vector<int>& idx) const {
    return data_[static_cast<std::size_t>(linear_index(idx))];
  }

  std::vector<std::string>& labels() { return labels_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::map<std::string, std::string>& tags() { return tags_; }
  const std::map<std::string, std::string>& tags() const { return tags_; }

  DenseTensor& set_labels(std::vector<std::string> labels) {
    if (static_cast<int>(labels.size()) != rank()) {
      throw std::invalid_argument("DenseTensor: label count mismatch");
    }
    labels_ = std::move(labels);
    return *this;
  }

  int leg_of_label(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
      throw std::invalid_argument("DenseTensor: unknown label " + label);
    }
    return static_cast<int>(it - labels_.begin());
  }

  // New leg i is old leg perm[i] (so perm is the new-from-old leg list).
  DenseTensor permuted(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != rank()) {
      throw std::invalid_argument("DenseTensor: permutation rank mismatch");
    }
    std::vector<bool> seen(perm.size(), false);
    for (int p : perm) {
      if (p < 0 || p >= rank() || seen[static_cast<std::size_t>(p)]) {
        throw std::invalid_argument("DenseTensor: invalid permutation");
      }
      seen[static_cast<std::size_t>(p)] = true;
    }
    std::vector<int> new_dims(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      new_dims[i] = dims_[static_cast<std::size_t>(perm[i])];
    }
    DenseTensor out(new_dims);
    if (!labels_.empty()) {
      out.labels_.resize(perm.size());
      for (std::size_t i = 0; i < perm.size(); ++i) {
        out.labels_[i] = labels_[static_cast<std::size_t>(perm[i])];
      }
    }
    out.tags_ = tags_;
    const auto old_strides = strides();
    // Stride of the old tensor along each *new* axis.
    std::vector<std::int64_t> gather(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      gather[i] = old_strides[static_cast<std::size_t>(perm[i])];
    }
    std::vector<int> counter(perm.size(), 0);
    std::int64_t src = 0;
    const std::int64_t total = out.size();
    for (std::int64_t dst = 0; dst < total; ++dst) {
      out.data_[static_cast<std::size_t>(dst)] =
          data_[static_cast<std::size_t>(src)];
      for (int axis = rank() - 1; axis >= 0; --axis) {
        auto a = static_cast<std::size_t>(axis);
        if (++counter[a] < new_dims[a]) {
          src += gather[a];
          break;
        }
        counter[a] = 0;
        src -= gather[a] * (new_dims[a] - 1);
      }
    }
    return out;
  }

  // Same data, new leg structure (labels dropped, tags kept).
  DenseTensor reshaped(std::vector<int> new_dims) const {
    DenseTensor out(std::move(new_dims));
    if (out.size() != size()) {
      throw std::invalid_argument("DenseTensor: reshape size mismatch");
    }
    out.data_ = data_;
    out.tags_ = tags_;
    return out;
  }

  // Matrix with rows indexed by row_legs (in the given order, first slowest)
  // and columns by the remaining legs in original order.
  Eigen::MatrixXcd matricized(const std::vector<int>& row_legs) const {
    std::vector<int> perm = row_legs;
    std::vector<bool> used(dims_.size(), false);
    for (int l : row_legs) {
      if (l < 0 || l >= rank() || used[static_cast<std::size_t>(l)]) {
        throw std::invalid_argument("DenseTensor: invalid matricize legs");
      }
      used[static_cast<std::size_t>(l)] = true;
    }
    for (int l = 0; l < rank(); ++l) {
      if (!used[static_cast<std::size_t>(l)]) perm.push_back(l);
    }
    const DenseTensor p = permuted(perm);
    std::int64_t rows = 1;
    for (int l : row_legs) rows *= dims_[static_cast<std::size_t>(l)];
    const std::int64_t cols = size() / std::max<std::int64_t>(rows, 1);
    Eigen::MatrixXcd m(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r) {
      for (std::int64_t c = 0; c < cols; ++c) {
        m(r, c) = p.data_[static_cast<std::size_t>(r * cols + c)];
      }
    }
    return m;
  }

  Eigen::VectorXcd vectorized() const {
    Eigen::VectorXcd v(size());
    std::copy(data_.begin(), data_.end(), v.data());
    return v;
  }

  DenseTensor conjugated() const {
    DenseTensor out = *this;
    for (auto& x : out.data_) x = std::conj(x);
    return out;
  }

  DenseTensor scaled(cplx factor) const {
    DenseTensor out = *this;
    for (auto& x : out.data_) x *= factor;
    return out;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& x : data_) s += std::norm(x);
    return std::sqrt(s);
  }

  std::vector<std::int64_t> strides() const {
    std::vector<std::int64_t> s(dims_.size());
    std::int64_t acc = 1;
    for (int i = rank() - 1; i >= 0; --i) {
      s[static_cast<std::size_t>(i)] = acc;
      acc *= dims_[static_cast<std::size_t>(i)];
    }
    return s;
  }

 private:
  std::int64_t linear_index(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != rank()) {
      throw std::invalid_argument("DenseTensor: index rank mismatch");
    }
    std::int64_t lin = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= dims_[i]) {
        throw std::out_of_range("DenseTensor: index out of range");
      }
      lin = lin * dims_[i] + idx[i];
    }
    return lin;
  }

  std::vector<int> dims_;
  std::vector<std::string> labels_;
  std::map<std::string, std::string> tags_;
  std::vector<cplx> data_;
};

// Contracts legs_a of a against legs_b of b (paired in order). Output legs:
// free legs of a (original order), then free legs of b. Labels of the free
// legs are preserved when both inputs are fully labeled.
inline DenseTensor contract(const DenseTensor& a, const std::vector<int>& legs_a,
                            const DenseTensor& b,
                            const std::vector<int>& legs_b) {
  if (legs_a.size() != legs_b.size()) {
    throw std::invalid_argument("contract: leg list size mismatch");
  }
  for (std::size_t i = 0; i < legs_a.size(); ++i) {
    if (a.dim(legs_a[i]) != b.dim(legs_b[i])) {
      throw std::invalid_argument("contract: bond dimension mismatch");
    }
  }
  std::vector<bool> used_a(a.dims().size(), false), used_b(b.dims().size(),
                                                           false);
  for (int l : legs_a) {
    if (used_a[static_cast<std::size_t>(l)]) {
      throw std::invalid_argument("contract: duplicate leg on left tensor");
    }
    used_a[static_cast<std::size_t>(l)] = true;
  }
  for (int l : legs_b) {
    if (used_b[static_cast<std::size_t>(l)]) {
      throw std::invalid_argument("contract: duplicate leg on right tensor");
    }
    used_b[static_cast<std::size_t>(l)] = true;
  }
  std::vector<int> free_a, free_b;
  for (int l = 0; l < a.rank(); ++l) {
    if (!used_a[static_cast<std::size_t>(l)]) free_a.push_back(l);
  }
  for (int l = 0; l < b.rank(); ++l) {
    if (!used_b[static_cast<std::size_t>(l)]) free_b.push_back(l);
  }
  const Eigen::MatrixXcd ma = a.matricized(free_a);          // fa x c
  // matricized(free_a) orders columns by the remaining legs in original
  // order, which is legs_a sorted ascending -- not the pairing order. Fix by
  // permuting b's contraction legs into that same sorted-by-a order.
  std::vector<std::size_t> order(legs_a.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return legs_a[x] < legs_a[y];
  });
  std::vector<int> legs_b_sorted(legs_b.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    legs_b_sorted[i] = legs_b[order[i]];
  }
  const Eigen::MatrixXcd mb = b.matricized(legs_b_sorted);   // c x fb
  const Eigen::MatrixXcd prod = ma * mb;
  std::vector<int> out_dims;
  for (int l : free_a) out_dims.push_back(a.dim(l));
  for (int l : free_b) out_dims.push_back(b.dim(l));
  std::vector<int> row_dims(out_dims.begin(),
                            out_dims.begin() + static_cast<long>(free_a.size()));
  std::vector<int> col_dims(out_dims.begin() + static_cast<long>(free_a.size()),
                            out_dims.end());
  if (row_dims.empty()) row_dims.push_back(1);
  if (col_dims.empty()) col_dims.push_back(1);
  DenseTensor out = DenseTensor::from_matrix(prod, row_dims, col_dims);
  // Drop the padding legs introduced for scalar-like results.
  std::vector<int> final_dims;
  for (int l : free_a) final_dims.push_back(a.dim(l));
  for (int l : free_b) final_dims.push_back(b.dim(l));
  if (final_dims.empty()) final_dims.push_back(1);
  out = out.reshaped(final_dims);
  if (!a.labels().empty() && !b.labels().empty() && !final_dims.empty()) {
    std::vector<std::string> labels;
    for (int l : free_a) labels.push_back(a.labels()[static_cast<std::size_t>(l)]);
    for (int l : free_b) labels.push_back(b.labels()[static_cast<std::size_t>(l)]);
    if (labels.size() == out.dims().size()) out.set_labels(labels);
  }
  return out;
}

// Contracts every leg label shared between a and b; labels must be unique
// per tensor. With no shared labels this is the outer product.
inline DenseTensor contract_labeled(const DenseTensor& a,
                                    const DenseTensor& b) {
  if (a.labels().empty() || b.labels().empty()) {
    throw std::invalid_argument("contract_labeled: tensors must be labeled");
  }
  std::vector<int> legs_a, legs_b;
  for (int la = 0; la < a.rank(); ++la) {
    const auto& lab = a.labels()[static_cast<std::size_t>(la)];
    for (int lb = 0; lb < b.rank(); ++lb) {
      if (b.labels()[static_cast<std::size_t>(lb)] == lab) {
        legs_a.push_back(la);
        legs_b.push_back(lb);
      }
    }
  }
  return contract(a, legs_a, b, legs_b);
}

// Outer product with a's legs first.
inline DenseTensor outer(const DenseTensor& a, const DenseTensor& b) {
  return contract(a, {}, b, {});
}

}  // namespace hmera

#endif  // HMERA_DENSE_TENSOR_HPP
