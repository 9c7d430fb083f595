#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <type_traits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "multitrek/errors.hpp"
#include "multitrek/scalar.hpp"

namespace multitrek {

/// Dense order-k array, row-major (last index fastest).
template <class Scalar>
class Tensor {
 public:
  using value_type = Scalar;
  using Index = std::vector<std::size_t>;

  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> dims, const Scalar& fill = Scalar(0))
      : dims_(std::move(dims)) {
    std::size_t count = 1;
    for (std::size_t d : dims_) count *= d;
    data_.assign(count, fill);
  }

  Tensor(std::vector<std::size_t> dims, std::vector<Scalar> data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    std::size_t count = 1;
    for (std::size_t d : dims_) count *= d;
    if (count != data_.size()) throw DimMismatch("entry count does not match dims");
  }

  /// order-k tensor with every dimension n.
  static Tensor cubical(std::size_t order, std::size_t n, const Scalar& fill = Scalar(0)) {
    return Tensor(std::vector<std::size_t>(order, n), fill);
  }

  static Tensor matrix(std::size_t rows, std::size_t cols, const Scalar& fill = Scalar(0)) {
    return Tensor({rows, cols}, fill);
  }

  static Tensor identity(std::size_t n) {
    Tensor m = matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar(1);
    return m;
  }

  std::size_t order() const noexcept { return dims_.size(); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
  std::size_t size() const noexcept { return data_.size(); }
  const std::vector<Scalar>& data() const noexcept { return data_; }
  std::vector<Scalar>& data() noexcept { return data_; }

  bool is_cubical() const {
    for (std::size_t d : dims_)
      if (d != dims_.front()) return false;
    return true;
  }

  std::size_t offset(std::span<const std::size_t> idx) const {
    if (idx.size() != dims_.size()) throw DimMismatch("index has wrong arity");
    std::size_t off = 0;
    for (std::size_t m = 0; m < idx.size(); ++m) {
      if (idx[m] >= dims_[m])
        throw IndexOutOfRange("index " + std::to_string(idx[m]) + " out of range in mode " +
                              std::to_string(m));
      off = off * dims_[m] + idx[m];
    }
    return off;
  }

  Index unravel(std::size_t off) const {
    Index idx(dims_.size());
    for (std::size_t m = dims_.size(); m-- > 0;) {
      idx[m] = off % dims_[m];
      off /= dims_[m];
    }
    return idx;
  }

  Scalar& operator[](std::span<const std::size_t> idx) { return data_[offset(idx)]; }
  const Scalar& operator[](std::span<const std::size_t> idx) const { return data_[offset(idx)]; }
  Scalar& at(const Index& idx) { return data_[offset(idx)]; }
  const Scalar& at(const Index& idx) const { return data_[offset(idx)]; }

  template <class... I>
  Scalar& operator()(I... i) {
    const std::size_t idx[] = {static_cast<std::size_t>(i)...};
    return data_[offset(idx)];
  }
  template <class... I>
  const Scalar& operator()(I... i) const {
    const std::size_t idx[] = {static_cast<std::size_t>(i)...};
    return data_[offset(idx)];
  }

  /// Calls f(index, value) for every entry in row-major order.
  template <class F>
  void for_each(F&& f) const {
    Index idx(dims_.size(), 0);
    for (std::size_t off = 0; off < data_.size(); ++off) {
      f(static_cast<const Index&>(idx), data_[off]);
      for (std::size_t m = dims_.size(); m-- > 0;) {
        if (++idx[m] < dims_[m]) break;
        idx[m] = 0;
      }
    }
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<Scalar> data_;
};

/// Matrices are order-2 tensors.
template <class Scalar>
using Matrix = Tensor<Scalar>;

template <class Scalar>
Matrix<Scalar> matmul(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  if (a.order() != 2 || b.order() != 2 || a.dim(1) != b.dim(0)) throw DimMismatch("matmul shapes");
  Matrix<Scalar> c = Matrix<Scalar>::matrix(a.dim(0), b.dim(1));
  for (std::size_t i = 0; i < a.dim(0); ++i)
    for (std::size_t l = 0; l < a.dim(1); ++l) {
      if (is_zero(a(i, l))) continue;
      for (std::size_t j = 0; j < b.dim(1); ++j) c(i, j) += a(i, l) * b(l, j);
    }
  return c;
}

template <class Scalar>
Matrix<Scalar> transpose(const Matrix<Scalar>& a) {
  Matrix<Scalar> t = Matrix<Scalar>::matrix(a.dim(1), a.dim(0));
  for (std::size_t i = 0; i < a.dim(0); ++i)
    for (std::size_t j = 0; j < a.dim(1); ++j) t(j, i) = a(i, j);
  return t;
}

/// Contracts mode `mode` of T against the rows of B:
/// out[.., i, ..] = sum_l T[.., l, ..] * B[l, i].
template <class Scalar>
Tensor<Scalar> mode_product(const Tensor<Scalar>& t, std::size_t mode, const Matrix<Scalar>& b) {
  if (mode >= t.order()) throw DimMismatch("mode out of range");
  if (b.order() != 2 || b.dim(0) != t.dim(mode)) throw DimMismatch("mode_product shapes");
  std::vector<std::size_t> dims = t.dims();
  dims[mode] = b.dim(1);
  Tensor<Scalar> out(dims);

  std::size_t outer = 1, inner = 1;
  for (std::size_t m = 0; m < mode; ++m) outer *= t.dim(m);
  for (std::size_t m = mode + 1; m < t.order(); ++m) inner *= t.dim(m);
  const std::size_t d_in = t.dim(mode), d_out = b.dim(1);
  const auto& src = t.data();
  auto& dst = out.data();
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t l = 0; l < d_in; ++l)
      for (std::size_t r = 0; r < inner; ++r) {
        const Scalar& v = src[(o * d_in + l) * inner + r];
        if (is_zero(v)) continue;
        for (std::size_t i = 0; i < d_out; ++i) {
          const Scalar& w = b(l, i);
          if (is_zero(w)) continue;
          dst[(o * d_out + i) * inner + r] += v * w;
        }
      }
  return out;
}

/// T x_1 M_1 x_2 ... x_k M_k with one (possibly rectangular) matrix per mode.
template <class Scalar>
Tensor<Scalar> multilinear_apply(Tensor<Scalar> t, const std::vector<Matrix<Scalar>>& mats) {
  if (mats.size() != t.order()) throw DimMismatch("one matrix per mode required");
  for (std::size_t m = 0; m < mats.size(); ++m) t = mode_product(t, m, mats[m]);
  return t;
}

/// Tucker product T . M^k: out[i_1..i_k] = sum_j T[j_1..j_k] M[j_1,i_1]...M[j_k,i_k].
template <class Scalar>
Tensor<Scalar> tucker_apply(const Tensor<Scalar>& t, const Matrix<Scalar>& m) {
  if (m.order() != 2 || m.dim(0) != m.dim(1)) throw DimMismatch("Tucker factor must be square");
  for (std::size_t d : t.dims())
    if (d != m.dim(0)) throw DimMismatch("Tucker factor does not match tensor dims");
  return multilinear_apply(t, std::vector<Matrix<Scalar>>(t.order(), m));
}

/// Entry (a_1..a_k) = T[sets[0][a_1], ..., sets[k-1][a_k]].
template <class Scalar>
Tensor<Scalar> subtensor(const Tensor<Scalar>& t, const std::vector<std::vector<std::size_t>>& sets) {
  if (sets.size() != t.order()) throw DimMismatch("one index list per mode required");
  std::vector<std::size_t> dims;
  for (std::size_t m = 0; m < sets.size(); ++m) {
    for (std::size_t i : sets[m])
      if (i >= t.dim(m)) throw IndexOutOfRange("subtensor index " + std::to_string(i) + " out of range");
    dims.push_back(sets[m].size());
  }
  Tensor<Scalar> out(dims);
  std::vector<std::size_t> src(t.order());
  std::size_t off = 0;
  out.for_each([&](const auto& idx, const Scalar&) {
    for (std::size_t m = 0; m < idx.size(); ++m) src[m] = sets[m][idx[m]];
    out.data()[off++] = t[src];
  });
  return out;
}

/// Zero everywhere except T[j,...,j] = values[j].
template <class Scalar>
Tensor<Scalar> diagonal_tensor(std::size_t order, const std::vector<Scalar>& values) {
  Tensor<Scalar> t = Tensor<Scalar>::cubical(order, values.size());
  std::vector<std::size_t> idx(order);
  for (std::size_t j = 0; j < values.size(); ++j) {
    std::fill(idx.begin(), idx.end(), j);
    t[idx] = values[j];
  }
  return t;
}

template <class Scalar>
bool is_symmetric(const Tensor<Scalar>& t) {
  if (!t.is_cubical()) return false;
  bool ok = true;
  t.for_each([&](const auto& idx, const Scalar& v) {
    if (!ok) return;
    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (!(t[sorted] == v)) ok = false;
  });
  return ok;
}

namespace detail {

template <class Scalar>
void hyperdet_rows(const Tensor<Scalar>& t, std::size_t row, std::vector<std::uint32_t>& used,
                   std::vector<std::size_t>& idx, const Scalar& partial, bool negative, Scalar& acc) {
  const std::size_t n = t.dim(0);
  const std::size_t free_modes = t.order() - 1;
  if (row == n) {
    if (negative)
      acc -= partial;
    else
      acc += partial;
    return;
  }
  // Odometer over (sigma_2(row), ..., sigma_k(row)) restricted to unused values.
  // Deeper rows overwrite idx, so this row's choices live in `mine`.
  std::vector<std::size_t> mine(free_modes);
  std::function<void(std::size_t, bool)> pick = [&](std::size_t m, bool neg) {
    if (m == free_modes) {
      idx[0] = row;
      std::copy(mine.begin(), mine.end(), idx.begin() + 1);
      const Scalar& v = t[idx];
      if (is_zero(v)) return;
      Scalar next = partial * v;
      hyperdet_rows(t, row + 1, used, idx, next, neg, acc);
      return;
    }
    for (std::size_t c = 0; c < n; ++c) {
      const std::uint32_t bit = 1u << c;
      if (used[m] & bit) continue;
      // Earlier rows that took a larger value form inversions with this one.
      const bool flip = (std::popcount(used[m] >> (c + 1)) & 1) != 0;
      used[m] |= bit;
      mine[m] = c;
      pick(m + 1, neg != flip);
      used[m] &= ~bit;
    }
  };
  pick(0, negative);
}

}  // namespace detail

/// Combinatorial (Cayley) hyperdeterminant of a cubical tensor:
/// sum over sigma_2..sigma_k of prod sign(sigma_j) prod_i T[i, sigma_2(i), ..., sigma_k(i)].
/// Zero entries prune the enumeration. n = 0 gives 1.
template <class Scalar>
Scalar hyperdeterminant(const Tensor<Scalar>& t) {
  if (t.order() == 0) throw NotCubical("order-0 tensor has no determinant");
  if (!t.is_cubical()) throw NotCubical("hyperdeterminant needs equal dimensions");
  const std::size_t n = t.dim(0);
  if (n == 0) return Scalar(1);
  if (n > 32) throw NotCubical("side length above 32 not supported");
  if (t.order() == 1) {
    Scalar p(1);
    for (const auto& v : t.data()) p *= v;
    return p;
  }
  std::vector<std::uint32_t> used(t.order() - 1, 0);
  std::vector<std::size_t> idx(t.order(), 0);
  Scalar acc(0);
  detail::hyperdet_rows(t, 0, used, idx, Scalar(1), false, acc);
  return acc;
}

/// Matrix determinant (the k = 2 hyperdeterminant).
template <class Scalar>
Scalar determinant(const Matrix<Scalar>& m) {
  if (m.order() != 2) throw NotCubical("determinant needs a matrix");
  return hyperdeterminant(m);
}

/// Checks the tensor Cauchy-Binet identity
///   det(A x_2 B) = sum_{I subset [n], #I = p} det(A_{[p], I, [p], ...}) det(B_{I, [p]})
/// for A of shape p x n x p x ... x p and B of shape n x p. Exact for exact
/// scalars. Test oracle only.
template <class Scalar>
bool cauchy_binet_check(const Tensor<Scalar>& a, const Matrix<Scalar>& b) {
  if (a.order() < 2) throw DimMismatch("A must have order at least 2");
  const std::size_t p = a.dim(0), n = a.dim(1);
  for (std::size_t m = 2; m < a.order(); ++m)
    if (a.dim(m) != p) throw DimMismatch("A must be p x n x p x ... x p");
  if (b.order() != 2 || b.dim(0) != n || b.dim(1) != p) throw DimMismatch("B must be n x p");

  const Scalar lhs = hyperdeterminant(mode_product(a, 1, b));

  std::vector<std::size_t> all(p);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> cols(p);
  std::iota(cols.begin(), cols.end(), 0);
  Scalar rhs(0);
  std::vector<std::size_t> subset;
  std::function<void(std::size_t)> choose = [&](std::size_t start) {
    if (subset.size() == p) {
      std::vector<std::vector<std::size_t>> a_sets(a.order(), all);
      a_sets[1] = subset;
      rhs += hyperdeterminant(subtensor(a, a_sets)) * determinant(subtensor(b, {subset, cols}));
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      subset.push_back(i);
      choose(i + 1);
      subset.pop_back();
    }
  };
  choose(0);
  return lhs == rhs;
}

template <class Scalar>
nlohmann::json tensor_to_json(const Tensor<Scalar>& t) {
  nlohmann::json j;
  j["order"] = t.order();
  j["dims"] = t.dims();
  j["scalar"] = ScalarTraits<Scalar>::name;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& v : t.data()) {
    if constexpr (std::is_same_v<Scalar, Rational>)
      entries.push_back(to_string(v));
    else
      entries.push_back(v);
  }
  j["entries"] = std::move(entries);
  return j;
}

template <class Scalar>
Tensor<Scalar> tensor_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "expected a tensor object");
  for (const char* key : {"order", "dims", "scalar", "entries"})
    if (!j.contains(key)) throw SchemaError(std::string("/") + key, "missing field");
  if (j["scalar"] != ScalarTraits<Scalar>::name)
    throw SchemaError("/scalar", std::string("expected scalar kind ") + ScalarTraits<Scalar>::name);
  auto dims = j["dims"].get<std::vector<std::size_t>>();
  if (j["order"].get<std::size_t>() != dims.size()) throw SchemaError("/order", "order does not match dims");
  std::vector<Scalar> data;
  const auto& e = j["entries"];
  if (!e.is_array()) throw SchemaError("/entries", "expected an array");
  for (std::size_t i = 0; i < e.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, Rational>) {
      if (!e[i].is_string()) throw SchemaError("/entries/" + std::to_string(i), "expected \"a/b\"");
      try {
        data.push_back(parse_rational(e[i].get<std::string>()));
      } catch (const InvalidArgument& err) {
        throw SchemaError("/entries/" + std::to_string(i), err.what());
      }
    } else {
      if (!e[i].is_number()) throw SchemaError("/entries/" + std::to_string(i), "expected a number");
      data.push_back(e[i].get<double>());
    }
  }
  try {
    return Tensor<Scalar>(std::move(dims), std::move(data));
  } catch (const DimMismatch&) {
    throw SchemaError("/entries", "entry count does not match dims");
  }
}

}  // namespace multitrek
