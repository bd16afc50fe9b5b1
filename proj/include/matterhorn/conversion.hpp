#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "matterhorn/qnn.hpp"
#include "matterhorn/spike.hpp"

namespace matterhorn {

/// T = 2^n, mu = A - I_max, kernel and threshold schedule per the QNN
/// quantizer's mode. Throws ParameterError if i_max is outside the window.
SnnLayerConfig derive_snn_config(const QuantParams& p, int i_max, int k);

/// Every input code vector in the input quantizer's range.
struct ExhaustiveInputs {
  /// Refuse enumerations beyond this many vectors.
  std::uint64_t max_vectors = 1ULL << 26;
};

/// Real pre-activations drawn uniformly from [lo, hi] and pushed through the
/// firing phase only. lo == hi == 0 selects +/- 2 * alpha * 2^(n-1).
struct SampledPreActivations {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  double lo = 0.0;
  double hi = 0.0;
};

using EquivalenceDomain = std::variant<ExhaustiveInputs, SampledPreActivations>;

enum class MismatchKind { code, analytic, dead_zone };

struct Mismatch {
  MismatchKind kind = MismatchKind::code;
  std::vector<double> input;  // input codes, or the single sampled pre-activation
  int output_index = 0;
  int qnn_output = 0;
  int snn_decoded = 0;
};

struct EquivalenceReport {
  std::uint64_t cases_checked = 0;
  std::uint64_t mismatch_count = 0;
  /// First few mismatches, in enumeration order.
  std::vector<Mismatch> mismatches;
  int max_abs_deviation = 0;
  bool passed = true;
};

/// SNN path for one layer: encode inputs with cfg_in, integrate, fire with
/// cfg_out, decode. Returns the decoded output codes.
std::vector<int> snn_layer_forward(std::span<const int> x_codes, const QnnLayer& layer, const SnnLayerConfig& cfg_in,
                                   const SnnLayerConfig& cfg_out);

/// Input-side config matching the layer's input quantizer and cfg's dead zone.
SnnLayerConfig input_config_for(const QnnLayer& layer, const SnnLayerConfig& cfg);

/// Runs the QNN path and the SNN path side by side over the domain and
/// records every disagreement: decoded code vs QNN code, analytic vs
/// simulated firing time, and dead-zone membership in code vs time.
EquivalenceReport verify_equivalence(const QnnLayer& layer, const SnnLayerConfig& cfg,
                                     const EquivalenceDomain& domain, std::size_t max_recorded = 16);

std::string to_string(MismatchKind kind);

}  // namespace matterhorn
