#include "matterhorn/types.hpp"

#include <cmath>
#include <string>

namespace matterhorn {

std::string_view to_string(QuantMode mode) {
  return mode == QuantMode::symmetric ? "symmetric" : "asymmetric";
}

QuantMode parse_quant_mode(std::string_view text) {
  if (text == "symmetric" || text == "sym") return QuantMode::symmetric;
  if (text == "asymmetric" || text == "asym") return QuantMode::asymmetric;
  throw ParameterError("unknown quantization mode '" + std::string(text) + "'");
}

CodeRange code_range(int bits, QuantMode mode) {
  if (bits < 1 || bits > 30) throw ParameterError("bit width must be in [1, 30], got " + std::to_string(bits));
  const int span = 1 << bits;
  if (mode == QuantMode::symmetric) return {-(span / 2), span / 2 - 1};
  return {0, span - 1};
}

long long floor_ratio(double a, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("scale alpha must be positive and finite");
  if (std::isnan(a)) throw ValueError("pre-activation is NaN");

  constexpr long long kLimit = 1LL << 62;
  const double guess = std::floor(a / alpha);
  if (!(guess < static_cast<double>(kLimit))) return kLimit;
  if (!(guess > -static_cast<double>(kLimit))) return -kLimit;

  auto m = static_cast<long long>(guess);
  // Beyond 2^52 consecutive integers are no longer distinct doubles; the
  // quotient is already integral there and any consumer clips it anyway.
  if (m > (1LL << 52) || m < -(1LL << 52)) return m;
  while (alpha * static_cast<double>(m + 1) <= a) ++m;
  while (alpha * static_cast<double>(m) > a) --m;
  return m;
}

}  // namespace matterhorn
