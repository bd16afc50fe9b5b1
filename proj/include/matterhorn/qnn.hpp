#pragma once

#include <span>
#include <vector>

#include "matterhorn/types.hpp"

namespace matterhorn {

/// QNN-side activation quantizer: n bits, per-tensor scale alpha.
struct QuantParams {
  int bits = 4;
  double alpha = 1.0;
  QuantMode mode = QuantMode::symmetric;

  [[nodiscard]] CodeRange codes() const { return code_range(bits, mode); }
  void validate() const;
};

/// Collapse radius around the most frequent code.
struct DeadZone {
  int mu = 0;
  int k = 0;
};

/// One fully connected quantized layer. Weights are C_i x C_o, row-major
/// (weights[i * outputs + j] connects input i to output j). The bias stays
/// full precision.
struct QnnLayer {
  int inputs = 0;
  int outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  QuantParams in_params;
  QuantParams out_params;
  DeadZone dead_zone;

  [[nodiscard]] double weight(int i, int j) const { return weights[static_cast<std::size_t>(i) * outputs + j]; }
  /// True when every weight is exactly -1 or +1 (MSU-compatible).
  [[nodiscard]] bool binary_weights() const;
  void validate() const;
};

/// Clip(floor(a / alpha), lo, hi) with mathematical floor toward -inf.
int quantize(double a, const QuantParams& p);

/// q when |q - mu| > k, otherwise mu.
int dead_zone_filter(int q, int mu, int k);

/// a_j = sum_i w_ij * alpha_in * q_i + b_j.
std::vector<double> pre_activations(std::span<const int> x_codes, const QnnLayer& layer);

/// dead_zone_filter(quantize(a_j)) per output.
std::vector<int> layer_forward(std::span<const int> x_codes, const QnnLayer& layer);

/// Masked straight-through estimator, taken w.r.t. the pre-activation: the
/// upstream gradient passes where floor(a/alpha) is unclipped and the
/// quantized code lies outside the dead zone, and is zero elsewhere.
std::vector<double> ste_backward(std::span<const double> upstream, std::span<const double> a, const QuantParams& p,
                                 DeadZone dz);

}  // namespace matterhorn
