#pragma once

#include <cstddef>
#include <vector>

// Kronecker-product and multi-index utilities, plus the dense tensor
// objects used as brute-force oracles by the analysis modules and the
// test suite. Everything here is the slow, explicit path: vectors of
// length M^K with a hard element cap, not the O(KM) filter path.

namespace sml {

using Vec = std::vector<double>;
using MultiIndex = std::vector<int>;

// Dense objects here grow as M^K. Allocations above this element count
// are refused with std::length_error.
inline constexpr std::size_t kDenseCapElems = 1'000'000;

// Minimal row-major dense matrix, zero-initialized on construction.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// base^power, validated against the dense element cap.
std::size_t dense_length(std::size_t base, int power);

// Kronecker product: out[p*len(b)+q] = a[p]*b[q].
Vec kron(const Vec& a, const Vec& b);

// order-fold Kronecker power of u. The entry at multi-index (j_1..j_K),
// linearized row-major, is prod_s u[j_s]. order = 0 is rejected.
Vec kron_power(const Vec& u, int order);

// Row-major linearization of a multi-index with radix `length`; the first
// component is the most significant digit.
std::size_t flat_index(const MultiIndex& mi, int length);

// w_1 (x) w_2 (x) ... (x) w_K for equal-length factors. The result is a
// rank-one (simple) tensor: entry (i_1..i_K) equals prod_s w_s[i_s].
Vec simple_tensor(const std::vector<Vec>& factors);

// Kronecker product of the factors with the factor at `slot` (0-based)
// replaced by the M x M identity. Column c equals simple_tensor with that
// factor set to the unit vector e_c, so multiplying the result by the
// removed factor on the right reproduces simple_tensor(factors).
Matrix partial_simple_tensor(const std::vector<Vec>& factors, int slot);

// Dot product of equal-length vectors. Applied to kron_power(u, K) and
// simple_tensor(W) it reproduces the product-of-FIR filter output.
double contract(const Vec& a, const Vec& b);

}  // namespace sml
