#include "matterhorn/qnn.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace matterhorn {

void QuantParams::validate() const {
  (void)code_range(bits, mode);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("quantizer alpha must be positive and finite");
}

bool QnnLayer::binary_weights() const {
  for (const double w : weights) {
    if (w != 1.0 && w != -1.0) return false;
  }
  return true;
}

void QnnLayer::validate() const {
  if (inputs <= 0 || outputs <= 0) throw ShapeError("layer needs positive input and output counts");
  if (weights.size() != static_cast<std::size_t>(inputs) * outputs) {
    throw ShapeError("weight matrix has " + std::to_string(weights.size()) + " entries, expected " +
                     std::to_string(static_cast<std::size_t>(inputs) * outputs));
  }
  if (bias.size() != static_cast<std::size_t>(outputs)) throw ShapeError("bias length must equal the output count");
  in_params.validate();
  out_params.validate();
  if (dead_zone.k < 0) throw ParameterError("dead-zone radius k must be nonnegative");
}

int quantize(double a, const QuantParams& p) {
  if (!(p.alpha > 0.0)) throw ParameterError("quantizer alpha must be positive");
  return p.codes().clip(floor_ratio(a, p.alpha));
}

int dead_zone_filter(int q, int mu, int k) {
  return std::abs(static_cast<long long>(q) - mu) > k ? q : mu;
}

std::vector<double> pre_activations(std::span<const int> x_codes, const QnnLayer& layer) {
  if (x_codes.size() != static_cast<std::size_t>(layer.inputs)) {
    throw ShapeError("layer expects " + std::to_string(layer.inputs) + " inputs, got " +
                     std::to_string(x_codes.size()));
  }
  std::vector<double> a(layer.outputs, 0.0);
  for (int j = 0; j < layer.outputs; ++j) {
    double acc = 0.0;
    for (int i = 0; i < layer.inputs; ++i) {
      acc += layer.weight(i, j) * (layer.in_params.alpha * static_cast<double>(x_codes[i]));
    }
    a[j] = acc + layer.bias[j];
  }
  return a;
}

std::vector<int> layer_forward(std::span<const int> x_codes, const QnnLayer& layer) {
  const std::vector<double> a = pre_activations(x_codes, layer);
  std::vector<int> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    out[j] = dead_zone_filter(quantize(a[j], layer.out_params), layer.dead_zone.mu, layer.dead_zone.k);
  }
  return out;
}

std::vector<double> ste_backward(std::span<const double> upstream, std::span<const double> a, const QuantParams& p,
                                 DeadZone dz) {
  if (upstream.size() != a.size()) throw ShapeError("upstream gradient and pre-activation lengths differ");
  const CodeRange range = p.codes();
  std::vector<double> grad(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long long raw = floor_ratio(a[i], p.alpha);
    if (!range.contains(raw)) continue;
    if (std::abs(raw - dz.mu) <= dz.k) continue;
    grad[i] = upstream[i];
  }
  return grad;
}

}  // namespace matterhorn
