#include "matterhorn/spike.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace matterhorn {
namespace {

void check_window(int window) {
  if (window < 2 || !is_power_of_two(window)) {
    throw ParameterError("spike window must be a power of two >= 2, got " + std::to_string(window));
  }
}

}  // namespace

SpikeTrain SpikeTrain::silent(int window) {
  check_window(window);
  return SpikeTrain(window, std::nullopt);
}

SpikeTrain SpikeTrain::at(int window, int t) {
  check_window(window);
  if (t < 0 || t >= window) {
    throw RangeError("spike time " + std::to_string(t) + " outside window [0, " + std::to_string(window - 1) + "]");
  }
  return SpikeTrain(window, t);
}

SpikeTrain SpikeTrain::from_bits(std::span<const std::uint8_t> bits) {
  const int window = static_cast<int>(bits.size());
  check_window(window);
  std::optional<int> spike;
  for (int t = 0; t < window; ++t) {
    if (bits[t] > 1) throw ValueError("spike train entries must be 0 or 1");
    if (bits[t] == 0) continue;
    if (spike) throw ValueError("spike train carries more than one spike");
    spike = t;
  }
  return SpikeTrain(window, spike);
}

SpikeTrain SpikeTrain::unpack(std::span<const std::uint8_t> bytes, int window) {
  check_window(window);
  const std::size_t expected = (static_cast<std::size_t>(window) + 7) / 8;
  if (bytes.size() != expected) {
    throw ShapeError("packed train needs " + std::to_string(expected) + " bytes, got " + std::to_string(bytes.size()));
  }
  std::vector<std::uint8_t> bits(window);
  for (int t = 0; t < window; ++t) bits[t] = (bytes[t / 8] >> (t % 8)) & 1U;
  for (std::size_t b = 0; b < bytes.size(); ++b) {
    const int used = std::min(8, window - static_cast<int>(b * 8));
    if (used < 8 && (bytes[b] >> used) != 0) throw ValueError("padding bits of a packed train must be zero");
  }
  return from_bits(bits);
}

std::vector<std::uint8_t> SpikeTrain::bits() const {
  std::vector<std::uint8_t> out(window_, 0);
  if (spike_) out[*spike_] = 1;
  return out;
}

std::vector<std::uint8_t> SpikeTrain::pack() const {
  std::vector<std::uint8_t> out((static_cast<std::size_t>(window_) + 7) / 8, 0);
  if (spike_) out[*spike_ / 8] = static_cast<std::uint8_t>(1U << (*spike_ % 8));
  return out;
}

SnnLayerConfig SnnLayerConfig::create(int bits, double alpha, int i_max, int k, QuantMode mode) {
  SnnLayerConfig cfg;
  cfg.bits = bits;
  if (bits < 1 || bits > 20) throw ParameterError("bit width must be in [1, 20], got " + std::to_string(bits));
  cfg.window = 1 << bits;
  cfg.alpha = alpha;
  cfg.i_max = i_max;
  cfg.k = k;
  cfg.mode = mode;
  cfg.mu = cfg.offset() - i_max;
  cfg.validate();
  return cfg;
}

void SnnLayerConfig::validate() const {
  check_window(window);
  if (window != (1 << bits)) throw ParameterError("window must equal 2^bits");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive and finite");
  if (i_max < 0 || i_max >= window) {
    throw ParameterError("i_max " + std::to_string(i_max) + " outside window [0, " + std::to_string(window - 1) + "]");
  }
  if (k < 0) throw ParameterError("dead-zone radius k must be nonnegative");
  if (mu != offset() - i_max) throw ParameterError("mu inconsistent with i_max for this mode");
  if (!codes().contains(mu)) throw ParameterError("mu outside the code range");
}

int SnnLayerConfig::offset() const {
  return mode == QuantMode::symmetric ? window / 2 - 1 : window - 1;
}

bool SnnLayerConfig::in_dead_zone(int t) const {
  return masked && std::abs(t - i_max) <= k;
}

int SnnLayerConfig::kernel(int t) const {
  if (in_dead_zone(t)) return mu;
  return offset() - t;
}

double SnnLayerConfig::threshold(int t) const {
  return alpha * static_cast<double>(offset() - t) + threshold_offset;
}

int SnnLayerConfig::silent_value() const {
  if (!masked && baseline_silent_min) return offset() - (window - 1);
  return mu;
}

bool SnnLayerConfig::suppressed(int t) const {
  if (masked) return in_dead_zone(t);
  return baseline_silent_min && t == window - 1;
}

SpikeTrain encode_integer(int q, const SnnLayerConfig& cfg) {
  const CodeRange range = cfg.codes();
  if (!range.contains(q)) {
    throw RangeError("code " + std::to_string(q) + " outside [" + std::to_string(range.lo) + ", " +
                     std::to_string(range.hi) + "]");
  }
  const int t = cfg.offset() - q;
  if (cfg.suppressed(t)) return SpikeTrain::silent(cfg.window);
  return SpikeTrain::at(cfg.window, t);
}

int decode_spike(const SpikeTrain& s, const SnnLayerConfig& cfg) {
  if (s.window() != cfg.window) throw ShapeError("train window does not match the layer window");
  const auto t = s.spike_time();
  if (!t) return cfg.silent_value();
  return cfg.kernel(*t);
}

MembraneTrace integrate(std::span<const SpikeTrain> inputs, std::span<const double> weights,
                        const SnnLayerConfig& cfg_prev) {
  if (inputs.size() != weights.size()) {
    throw ShapeError("got " + std::to_string(inputs.size()) + " trains but " + std::to_string(weights.size()) +
                     " weights");
  }
  const int window = cfg_prev.window;
  // Spiking inputs grouped by arrival time.
  std::vector<std::vector<std::size_t>> arrivals(window);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].window() != window) throw ShapeError("input train window does not match the layer window");
    weight_sum += weights[i];
    if (const auto t = inputs[i].spike_time()) arrivals[*t].push_back(i);
  }

  const int rest = cfg_prev.silent_value();
  MembraneTrace trace;
  trace.v.resize(window);
  double v = rest == 0 ? 0.0 : cfg_prev.alpha * static_cast<double>(rest) * weight_sum;
  for (int t = 0; t < window; ++t) {
    const double amplitude = static_cast<double>(cfg_prev.kernel(t) - rest);
    for (const std::size_t i : arrivals[t]) v += weights[i] * cfg_prev.alpha * amplitude;
    trace.v[t] = v;
  }
  return trace;
}

SpikeTrain fire_simulated(const MembraneTrace& trace, double bias, const SnnLayerConfig& cfg) {
  const double potential = trace.final_value() + bias;
  for (int t = 0; t < cfg.window; ++t) {
    // Candidate spike: first crossing, or the window-end clip at T-1.
    const bool candidate = potential >= cfg.threshold(t) || t == cfg.window - 1;
    if (!candidate) continue;
    if (cfg.suppressed(t)) return SpikeTrain::silent(cfg.window);
    return SpikeTrain::at(cfg.window, t);
  }
  return SpikeTrain::silent(cfg.window);
}

SpikeTrain fire_analytic(double a, const SnnLayerConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw ParameterError("alpha must be positive");
  const long long r = floor_ratio(a, cfg.alpha);
  const long long raw = static_cast<long long>(cfg.offset()) - r;  // ceil(A - a/alpha)
  const int t = static_cast<int>(std::clamp<long long>(raw, 0, cfg.window - 1));
  if (cfg.suppressed(t)) return SpikeTrain::silent(cfg.window);
  return SpikeTrain::at(cfg.window, t);
}

double silence_rate(std::span<const SpikeTrain> trains) {
  if (trains.empty()) throw UsageError("silence_rate needs at least one train");
  const auto silent = std::count_if(trains.begin(), trains.end(), [](const SpikeTrain& s) { return s.is_silent(); });
  return static_cast<double>(silent) / static_cast<double>(trains.size());
}

}  // namespace matterhorn
