#include "matterhorn/conversion.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>

namespace matterhorn {
namespace {

class ReportBuilder {
 public:
  explicit ReportBuilder(std::size_t max_recorded) : max_recorded_(max_recorded) {}

  void record(Mismatch m) {
    ++report_.mismatch_count;
    if (m.kind == MismatchKind::code) {
      report_.max_abs_deviation = std::max(report_.max_abs_deviation, std::abs(m.qnn_output - m.snn_decoded));
    }
    if (report_.mismatches.size() < max_recorded_) report_.mismatches.push_back(std::move(m));
  }
  void count_case() { ++report_.cases_checked; }

  EquivalenceReport finish() {
    report_.passed = report_.mismatch_count == 0;
    return std::move(report_);
  }

 private:
  std::size_t max_recorded_;
  EquivalenceReport report_;
};

void check_pairing(const QnnLayer& layer, const SnnLayerConfig& cfg) {
  cfg.validate();
  if (!cfg.masked) throw ParameterError("equivalence is checked for masked (M-TTFS) configurations only");
  if (cfg.window != (1 << layer.out_params.bits)) throw ParameterError("SNN window must equal 2^n of the QNN output");
  if (cfg.mode != layer.out_params.mode) throw ParameterError("SNN mode differs from the QNN output mode");
  if (cfg.alpha != layer.out_params.alpha) throw ParameterError("SNN alpha differs from the QNN output scale");
  if (cfg.mu != layer.dead_zone.mu || cfg.k != layer.dead_zone.k) {
    throw ParameterError("SNN dead zone (mu, k) differs from the QNN dead-zone filter");
  }
}

std::vector<std::vector<double>> weight_columns(const QnnLayer& layer) {
  std::vector<std::vector<double>> cols(layer.outputs, std::vector<double>(layer.inputs));
  for (int i = 0; i < layer.inputs; ++i) {
    for (int j = 0; j < layer.outputs; ++j) cols[j][i] = layer.weight(i, j);
  }
  return cols;
}

// Per-neuron firing-phase check shared by both domains.
struct FiringCheck {
  const SnnLayerConfig& cfg;
  SnnLayerConfig unmasked;

  explicit FiringCheck(const SnnLayerConfig& c) : cfg(c), unmasked(c) {
    unmasked.masked = false;
    unmasked.baseline_silent_min = false;
  }

  void run(const MembraneTrace& trace, double bias, int qnn_code, const std::vector<double>& input, int j,
           ReportBuilder& out) const {
    const SpikeTrain fired = fire_simulated(trace, bias, cfg);
    const int decoded = decode_spike(fired, cfg);
    if (decoded != qnn_code) out.record({MismatchKind::code, input, j, qnn_code, decoded});

    const double potential = trace.final_value() + bias;
    if (fire_analytic(potential, cfg) != fired) out.record({MismatchKind::analytic, input, j, qnn_code, decoded});

    // |q_hat - mu| <= k  <=>  |t - I_max| <= k, using the unmasked firing time.
    const QuantParams out_q{cfg.bits, cfg.alpha, cfg.mode};
    const int q_hat = quantize(potential, out_q);
    const int t = *fire_simulated(trace, bias, unmasked).spike_time();
    const bool code_zone = std::abs(q_hat - cfg.mu) <= cfg.k;
    const bool time_zone = std::abs(t - cfg.i_max) <= cfg.k;
    if (code_zone != time_zone) out.record({MismatchKind::dead_zone, input, j, q_hat, t});
  }
};

}  // namespace

SnnLayerConfig derive_snn_config(const QuantParams& p, int i_max, int k) {
  p.validate();
  if (k < 0) throw ParameterError("dead-zone radius k must be nonnegative");
  return SnnLayerConfig::create(p.bits, p.alpha, i_max, k, p.mode);
}

SnnLayerConfig input_config_for(const QnnLayer& layer, const SnnLayerConfig& cfg) {
  const int a_in = layer.in_params.mode == QuantMode::symmetric ? (1 << layer.in_params.bits) / 2 - 1
                                                                 : (1 << layer.in_params.bits) - 1;
  SnnLayerConfig in = derive_snn_config(layer.in_params, a_in - cfg.mu, cfg.k);
  in.masked = cfg.masked;
  in.baseline_silent_min = cfg.baseline_silent_min;
  return in;
}

std::vector<int> snn_layer_forward(std::span<const int> x_codes, const QnnLayer& layer, const SnnLayerConfig& cfg_in,
                                   const SnnLayerConfig& cfg_out) {
  if (x_codes.size() != static_cast<std::size_t>(layer.inputs)) throw ShapeError("input length differs from layer");
  std::vector<SpikeTrain> trains;
  trains.reserve(x_codes.size());
  for (const int q : x_codes) trains.push_back(encode_integer(q, cfg_in));
  const auto cols = weight_columns(layer);
  std::vector<int> out(layer.outputs);
  for (int j = 0; j < layer.outputs; ++j) {
    const MembraneTrace trace = integrate(trains, cols[j], cfg_in);
    out[j] = decode_spike(fire_simulated(trace, layer.bias[j], cfg_out), cfg_out);
  }
  return out;
}

EquivalenceReport verify_equivalence(const QnnLayer& layer, const SnnLayerConfig& cfg,
                                     const EquivalenceDomain& domain, std::size_t max_recorded) {
  layer.validate();
  check_pairing(layer, cfg);
  ReportBuilder report(max_recorded);
  const FiringCheck firing(cfg);

  if (const auto* sampled = std::get_if<SampledPreActivations>(&domain)) {
    double lo = sampled->lo;
    double hi = sampled->hi;
    if (lo == 0.0 && hi == 0.0) {
      hi = 2.0 * cfg.alpha * static_cast<double>(1 << (cfg.bits - 1));
      lo = -hi;
    }
    if (!(lo <= hi)) throw ParameterError("sample range must satisfy lo <= hi");
    std::mt19937_64 rng(sampled->seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    const QuantParams out_q = layer.out_params;
    for (std::uint64_t s = 0; s < sampled->samples; ++s) {
      const double a = dist(rng);
      const int qnn = dead_zone_filter(quantize(a, out_q), layer.dead_zone.mu, layer.dead_zone.k);
      firing.run(MembraneTrace{{a}}, 0.0, qnn, {a}, 0, report);
      report.count_case();
    }
    return report.finish();
  }

  const auto& exhaustive = std::get<ExhaustiveInputs>(domain);
  const SnnLayerConfig cfg_in = input_config_for(layer, cfg);
  const CodeRange in_range = cfg_in.codes();
  const auto radix = static_cast<std::uint64_t>(in_range.size());
  std::uint64_t total = 1;
  for (int i = 0; i < layer.inputs; ++i) {
    total *= radix;
    if (total > exhaustive.max_vectors) throw UsageError("exhaustive domain too large; use sampling instead");
  }

  const auto cols = weight_columns(layer);
  std::vector<int> raw(layer.inputs, in_range.lo);
  std::vector<int> filtered(layer.inputs);
  std::vector<SpikeTrain> trains(layer.inputs, SpikeTrain::silent(cfg_in.window));
  for (std::uint64_t n = 0; n < total; ++n) {
    // Inputs arrive as outputs of an upstream dead-zone-filtered layer.
    for (int i = 0; i < layer.inputs; ++i) {
      filtered[i] = cfg_in.masked ? dead_zone_filter(raw[i], cfg_in.mu, cfg_in.k) : raw[i];
      trains[i] = encode_integer(raw[i], cfg_in);
    }
    const std::vector<int> qnn = layer_forward(filtered, layer);
    const std::vector<double> input_desc(raw.begin(), raw.end());
    for (int j = 0; j < layer.outputs; ++j) {
      const MembraneTrace trace = integrate(trains, cols[j], cfg_in);
      firing.run(trace, layer.bias[j], qnn[j], input_desc, j, report);
      report.count_case();
    }
    // Odometer step over the input code vector.
    for (int i = 0; i < layer.inputs; ++i) {
      if (++raw[i] <= in_range.hi) break;
      raw[i] = in_range.lo;
    }
  }
  return report.finish();
}

std::string to_string(MismatchKind kind) {
  switch (kind) {
    case MismatchKind::code: return "code";
    case MismatchKind::analytic: return "analytic";
    case MismatchKind::dead_zone: return "dead_zone";
  }
  return "unknown";
}

}  // namespace matterhorn
