#include "sml/tensor_kron.hpp"

#include <stdexcept>
#include <string>

namespace sml {

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (rows != 0 && cols > kDenseCapElems / rows) {
    throw std::length_error("Matrix: " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " exceeds dense element cap of " +
                            std::to_string(kDenseCapElems));
  }
  data_.assign(rows * cols, 0.0);
}

std::size_t dense_length(std::size_t base, int power) {
  if (power < 1) throw std::invalid_argument("dense_length: power must be >= 1");
  if (base == 0) throw std::invalid_argument("dense_length: base must be >= 1");
  std::size_t n = 1;
  for (int k = 0; k < power; ++k) {
    if (n > kDenseCapElems / base) {
      throw std::length_error("dense_length: " + std::to_string(base) + "^" +
                              std::to_string(power) + " exceeds dense element cap of " +
                              std::to_string(kDenseCapElems));
    }
    n *= base;
  }
  return n;
}

Vec kron(const Vec& a, const Vec& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("kron: empty operand");
  if (a.size() > kDenseCapElems / b.size())
    throw std::length_error("kron: result exceeds dense element cap");
  Vec out(a.size() * b.size());
  std::size_t p = 0;
  for (double av : a)
    for (double bv : b) out[p++] = av * bv;
  return out;
}

Vec kron_power(const Vec& u, int order) {
  if (order < 1) throw std::invalid_argument("kron_power: order must be >= 1");
  if (u.empty()) throw std::invalid_argument("kron_power: empty vector");
  dense_length(u.size(), order);
  Vec out = u;
  for (int k = 1; k < order; ++k) out = kron(out, u);
  return out;
}

std::size_t flat_index(const MultiIndex& mi, int length) {
  if (mi.empty()) throw std::invalid_argument("flat_index: empty multi-index");
  if (length < 1) throw std::invalid_argument("flat_index: length must be >= 1");
  std::size_t flat = 0;
  for (int component : mi) {
    if (component < 0 || component >= length)
      throw std::invalid_argument("flat_index: component " + std::to_string(component) +
                                  " out of range [0, " + std::to_string(length) + ")");
    flat = flat * static_cast<std::size_t>(length) + static_cast<std::size_t>(component);
  }
  return flat;
}

namespace {

void check_equal_lengths(const std::vector<Vec>& factors) {
  if (factors.empty()) throw std::invalid_argument("simple_tensor: no factors");
  const std::size_t m = factors.front().size();
  if (m == 0) throw std::invalid_argument("simple_tensor: empty factor");
  for (const Vec& f : factors) {
    if (f.size() != m)
      throw std::invalid_argument("simple_tensor: factors have mismatched lengths");
  }
}

}  // namespace

Vec simple_tensor(const std::vector<Vec>& factors) {
  check_equal_lengths(factors);
  dense_length(factors.front().size(), static_cast<int>(factors.size()));
  Vec out = factors.front();
  for (std::size_t s = 1; s < factors.size(); ++s) out = kron(out, factors[s]);
  return out;
}

Matrix partial_simple_tensor(const std::vector<Vec>& factors, int slot) {
  check_equal_lengths(factors);
  const int order = static_cast<int>(factors.size());
  if (slot < 0 || slot >= order)
    throw std::invalid_argument("partial_simple_tensor: slot " + std::to_string(slot) +
                                " out of range [0, " + std::to_string(order) + ")");
  const std::size_t m = factors.front().size();
  const std::size_t rows = dense_length(m, order);
  Matrix out(rows, m);
  for (std::size_t p = 0; p < rows; ++p) {
    double prod = 1.0;
    std::size_t open_digit = 0;  // value of the multi-index digit at `slot`
    std::size_t rem = p;
    for (int t = order - 1; t >= 0; --t) {
      const std::size_t digit = rem % m;
      rem /= m;
      if (t == slot)
        open_digit = digit;
      else
        prod *= factors[static_cast<std::size_t>(t)][digit];
    }
    out(p, open_digit) = prod;
  }
  return out;
}

double contract(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("contract: length mismatch");
  double acc = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) acc += a[p] * b[p];
  return acc;
}

}  // namespace sml
