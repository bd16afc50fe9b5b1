#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "matterhorn/errors.hpp"

namespace matterhorn {

enum class QuantMode { symmetric, asymmetric };

std::string_view to_string(QuantMode mode);
QuantMode parse_quant_mode(std::string_view text);

/// Inclusive integer code range of an n-bit quantizer.
struct CodeRange {
  int lo = 0;
  int hi = 0;

  [[nodiscard]] bool contains(long long q) const { return q >= lo && q <= hi; }
  [[nodiscard]] int clip(long long q) const {
    if (q < lo) return lo;
    if (q > hi) return hi;
    return static_cast<int>(q);
  }
  [[nodiscard]] int size() const { return hi - lo + 1; }
};

/// symmetric: [-2^(n-1), 2^(n-1)-1]; asymmetric: [0, 2^n-1].
CodeRange code_range(int bits, QuantMode mode);

/// Largest integer m with alpha * m <= a, evaluated with the same floating
/// point product the threshold schedule uses, so that a threshold walk and
/// the closed-form quantizer agree bit for bit. Saturates to +/-2^62.
long long floor_ratio(double a, double alpha);

[[nodiscard]] constexpr bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

/// Dense row-major matrix.
template <class T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

using IntMatrix = Matrix<long long>;

}  // namespace matterhorn
