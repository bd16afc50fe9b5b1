#include "matterhorn/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace matterhorn {
namespace {

long long exact_integer(double v) {
  const double r = std::nearbyint(v);
  if (r != v) throw ValueError("accumulated value is not integral; weights must be integer codes");
  return static_cast<long long>(r);
}

int filter_code(int q, const SnnLayerConfig& cfg) {
  return cfg.masked ? dead_zone_filter(q, cfg.mu, cfg.k) : q;
}

}  // namespace

TimeAccResult time_based_accumulate(std::span<const SpikeTrain> trains, std::span<const double> weights,
                                    const SnnLayerConfig& cfg) {
  if (trains.size() != weights.size()) throw ShapeError("train and weight counts differ");
  const int window = cfg.window;
  std::vector<double> column_sum(window, 0.0);
  std::vector<std::uint8_t> busy(window, 0);
  double weight_total = 0.0;
  for (std::size_t i = 0; i < trains.size(); ++i) {
    if (trains[i].window() != window) throw ShapeError("train window does not match the configuration");
    weight_total += weights[i];
    if (const auto t = trains[i].spike_time()) {
      column_sum[*t] += weights[i];
      busy[*t] = 1;
    }
  }

  const int rest = cfg.silent_value();
  TimeAccResult out;
  out.value = rest == 0 ? 0.0 : static_cast<double>(rest) * weight_total;
  for (int t = 0; t < window; ++t) {
    if (!busy[t]) continue;
    out.value += static_cast<double>(cfg.kernel(t) - rest) * column_sum[t];
    ++out.weight_sum_events;
  }
  return out;
}

TimeAccResult time_based_accumulate_blocked(std::span<const SpikeTrain> trains, std::span<const double> weights,
                                            const SnnLayerConfig& cfg, std::size_t block_size) {
  if (block_size == 0) throw ParameterError("block size must be positive");
  if (trains.size() != weights.size()) throw ShapeError("train and weight counts differ");
  TimeAccResult total;
  for (std::size_t begin = 0; begin < trains.size(); begin += block_size) {
    const std::size_t n = std::min(block_size, trains.size() - begin);
    const TimeAccResult part = time_based_accumulate(trains.subspan(begin, n), weights.subspan(begin, n), cfg);
    total.value += part.value;
    total.weight_sum_events += part.weight_sum_events;
  }
  return total;
}

ScoreNormalizer quantized_softmax(const QuantParams& p) {
  p.validate();
  if (p.mode != QuantMode::asymmetric) throw ParameterError("score normalization quantizes asymmetrically");
  return [p](std::span<const double> scores) {
    std::vector<int> codes(scores.size(), 0);
    if (scores.empty()) return codes;
    const double peak = *std::max_element(scores.begin(), scores.end());
    std::vector<double> e(scores.size());
    double total = 0.0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      e[j] = std::exp(scores[j] - peak);
      total += e[j];
    }
    for (std::size_t j = 0; j < scores.size(); ++j) codes[j] = quantize(e[j] / total, p);
    return codes;
  };
}

AttentionConfig default_attention_config(int bits, double alpha_q, double alpha_s, int k, int k_score) {
  AttentionConfig cfg;
  cfg.query = SnnLayerConfig::create(bits, alpha_q, (1 << bits) / 2 - 1, k, QuantMode::symmetric);
  cfg.score = SnnLayerConfig::create(bits, alpha_s, (1 << bits) - 1, k_score, QuantMode::asymmetric);
  cfg.normalizer = quantized_softmax({bits, alpha_s, QuantMode::asymmetric});
  return cfg;
}

AttentionResult attention_pipeline(const TrainRows& q_trains, const IntMatrix& k_codes, const IntMatrix& v_codes,
                                   const AttentionConfig& cfg) {
  const std::size_t s_q = q_trains.size();
  const std::size_t s_k = k_codes.rows;
  const std::size_t d_k = k_codes.cols;
  const std::size_t d_v = v_codes.cols;
  if (v_codes.rows != s_k) throw ShapeError("K and V must have the same number of rows");
  if (cfg.score.mode != QuantMode::asymmetric) throw ParameterError("score encoding must be asymmetric");

  AttentionResult out;
  out.output = IntMatrix(s_q, d_v);
  out.score_codes = IntMatrix(s_q, s_k);

  std::vector<double> key(d_k);
  std::vector<double> value_col(s_k);
  std::vector<double> scores(s_k);
  for (std::size_t i = 0; i < s_q; ++i) {
    const auto& row = q_trains[i];
    if (row.size() != d_k) throw ShapeError("Q row width differs from d_k");
    for (std::size_t j = 0; j < s_k; ++j) {
      for (std::size_t d = 0; d < d_k; ++d) key[d] = static_cast<double>(k_codes(j, d));
      const TimeAccResult acc = time_based_accumulate(row, key, cfg.query);
      out.weight_sum_events += acc.weight_sum_events;
      scores[j] = cfg.query.alpha * static_cast<double>(exact_integer(acc.value));
    }

    const std::vector<int> codes = cfg.normalizer(scores);
    if (codes.size() != s_k) throw ShapeError("normalizer returned the wrong number of codes");
    std::vector<SpikeTrain> score_trains;
    score_trains.reserve(s_k);
    for (std::size_t j = 0; j < s_k; ++j) {
      out.score_codes(i, j) = codes[j];
      score_trains.push_back(encode_integer(codes[j], cfg.score));
    }

    for (std::size_t d = 0; d < d_v; ++d) {
      for (std::size_t j = 0; j < s_k; ++j) value_col[j] = static_cast<double>(v_codes(j, d));
      const TimeAccResult acc = time_based_accumulate(score_trains, value_col, cfg.score);
      out.weight_sum_events += acc.weight_sum_events;
      out.output(i, d) = exact_integer(acc.value);
    }
  }
  return out;
}

AttentionResult attention_reference(const IntMatrix& q_codes, const IntMatrix& k_codes, const IntMatrix& v_codes,
                                    const AttentionConfig& cfg) {
  const std::size_t s_q = q_codes.rows;
  const std::size_t s_k = k_codes.rows;
  if (q_codes.cols != k_codes.cols) throw ShapeError("Q and K widths differ");
  if (v_codes.rows != s_k) throw ShapeError("K and V must have the same number of rows");

  AttentionResult out;
  out.output = IntMatrix(s_q, v_codes.cols);
  out.score_codes = IntMatrix(s_q, s_k);
  std::vector<double> scores(s_k);
  for (std::size_t i = 0; i < s_q; ++i) {
    for (std::size_t j = 0; j < s_k; ++j) {
      long long dot = 0;
      for (std::size_t d = 0; d < q_codes.cols; ++d) {
        dot += static_cast<long long>(filter_code(static_cast<int>(q_codes(i, d)), cfg.query)) * k_codes(j, d);
      }
      scores[j] = cfg.query.alpha * static_cast<double>(dot);
    }
    const std::vector<int> codes = cfg.normalizer(scores);
    for (std::size_t j = 0; j < s_k; ++j) out.score_codes(i, j) = codes[j];
    for (std::size_t d = 0; d < v_codes.cols; ++d) {
      long long acc = 0;
      for (std::size_t j = 0; j < s_k; ++j) acc += static_cast<long long>(filter_code(codes[j], cfg.score)) * v_codes(j, d);
      out.output(i, d) = acc;
    }
  }
  return out;
}

}  // namespace matterhorn
