#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matterhorn/types.hpp"

namespace matterhorn {

/// Binary spike train over a window of T = 2^n steps carrying at most one
/// spike. The representation stores the spike time directly, so the
/// at-most-one-spike invariant holds by construction.
class SpikeTrain {
 public:
  static SpikeTrain silent(int window);
  static SpikeTrain at(int window, int t);
  /// Builds from a 0/1 sequence; throws ValueError on more than one spike.
  static SpikeTrain from_bits(std::span<const std::uint8_t> bits);
  /// Little-endian bit packing, bit 0 of byte 0 is t = 0.
  static SpikeTrain unpack(std::span<const std::uint8_t> bytes, int window);

  [[nodiscard]] int window() const { return window_; }
  [[nodiscard]] std::optional<int> spike_time() const { return spike_; }
  [[nodiscard]] bool is_silent() const { return !spike_.has_value(); }
  [[nodiscard]] bool bit(int t) const { return spike_.has_value() && *spike_ == t; }
  [[nodiscard]] int popcount() const { return spike_.has_value() ? 1 : 0; }

  [[nodiscard]] std::vector<std::uint8_t> bits() const;
  [[nodiscard]] std::vector<std::uint8_t> pack() const;

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;

 private:
  SpikeTrain(int window, std::optional<int> spike) : window_(window), spike_(spike) {}

  int window_ = 2;
  std::optional<int> spike_;
};

/// SNN-side layer parameters: window, scale, masked firing time and dead zone.
///
/// Build through SnnLayerConfig::create (or derive_snn_config), which
/// enforces T = 2^n, I_max inside the window and the derived mu.
struct SnnLayerConfig {
  int bits = 4;
  int window = 16;
  double alpha = 1.0;
  int i_max = 7;
  int k = 0;
  QuantMode mode = QuantMode::symmetric;
  int mu = 0;
  /// Temporal mask on/off. Off gives plain TTFS with no dead zone.
  bool masked = true;
  /// Plain-TTFS convention where the minimum code (spike at T-1) is sent as
  /// silence. Only meaningful with masked == false.
  bool baseline_silent_min = false;
  /// Additive offset on theta(t). Zero in normal use; set for fault injection.
  double threshold_offset = 0.0;

  static SnnLayerConfig create(int bits, double alpha, int i_max, int k, QuantMode mode);

  /// A = T/2 - 1 (symmetric) or T - 1 (asymmetric).
  [[nodiscard]] int offset() const;
  [[nodiscard]] CodeRange codes() const { return code_range(bits, mode); }
  [[nodiscard]] bool in_dead_zone(int t) const;
  /// Kernel f(t); flattened to mu inside the dead zone.
  [[nodiscard]] int kernel(int t) const;
  /// theta(t) = alpha * (A - t) + threshold_offset.
  [[nodiscard]] double threshold(int t) const;
  /// Code a silent train stands for: mu, or the minimum code under
  /// baseline_silent_min.
  [[nodiscard]] int silent_value() const;
  /// Whether a spike at t is suppressed on output.
  [[nodiscard]] bool suppressed(int t) const;
  void validate() const;
};

/// Membrane potential V(t) for t = 0..T-1, excluding bias.
struct MembraneTrace {
  std::vector<double> v;

  [[nodiscard]] double final_value() const { return v.empty() ? 0.0 : v.back(); }
};

SpikeTrain encode_integer(int q, const SnnLayerConfig& cfg);
int decode_spike(const SpikeTrain& s, const SnnLayerConfig& cfg);

/// Membrane integration over the shared window of cfg_prev. Silent inputs rest
/// at cfg_prev.silent_value(): the trace starts from alpha * silent * sum(w)
/// and spikes add w * alpha * (f(t) - silent). With silent == 0 (the usual
/// mu = 0 setup) this is exactly V(t) = V(t-1) + sum_i w_i * s_i(t) * f(t).
MembraneTrace integrate(std::span<const SpikeTrain> inputs, std::span<const double> weights,
                        const SnnLayerConfig& cfg_prev);

/// Threshold walk with first-spike gating and the temporal mask, holding the
/// integrated potential (final trace value + bias) over the firing window.
/// The window end clips: a neuron that has not crossed by T-1 fires there.
SpikeTrain fire_simulated(const MembraneTrace& trace, double bias, const SnnLayerConfig& cfg);

/// Closed form: t = Clip(ceil(A - a/alpha), 0, T-1), then the mask.
SpikeTrain fire_analytic(double a, const SnnLayerConfig& cfg);

/// Fraction of all-zero trains. Throws UsageError on an empty collection.
double silence_rate(std::span<const SpikeTrain> trains);

}  // namespace matterhorn
