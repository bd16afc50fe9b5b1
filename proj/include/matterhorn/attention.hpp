#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "matterhorn/qnn.hpp"
#include "matterhorn/spike.hpp"
#include "matterhorn/types.hpp"

namespace matterhorn {

struct TimeAccResult {
  /// Accumulated potential in code units (no alpha scale).
  double value = 0.0;
  /// Weight-sum events: time steps in which at least one input spiked.
  std::size_t weight_sum_events = 0;
};

/// V_t = f(t) * sum_{i: s_i(t) = 1} w_i + V_{t-1}. The weights are summed
/// once per busy time step and scaled once, instead of one MAC per spike.
/// Silent inputs rest at cfg.silent_value(), as in integrate().
TimeAccResult time_based_accumulate(std::span<const SpikeTrain> trains, std::span<const double> weights,
                                    const SnnLayerConfig& cfg);

/// Same result computed by independent accumulation blocks of block_size
/// inputs whose partial values are summed at the end.
TimeAccResult time_based_accumulate_blocked(std::span<const SpikeTrain> trains, std::span<const double> weights,
                                            const SnnLayerConfig& cfg, std::size_t block_size);

/// Maps one row of real scores to nonnegative integer codes.
using ScoreNormalizer = std::function<std::vector<int>(std::span<const double>)>;

/// Stand-in for the spiking softmax: exp(s - rowmax), normalized, then
/// quantized asymmetrically with p.
ScoreNormalizer quantized_softmax(const QuantParams& p);

struct AttentionConfig {
  SnnLayerConfig query;  // encoding of the Q spike trains
  SnnLayerConfig score;  // asymmetric encoding of the normalized scores
  ScoreNormalizer normalizer;
};

/// Q encoded symmetrically with (bits, alpha_q, I_max = T/2 - 1, k); scores
/// encoded asymmetrically with (bits, alpha_s, I_max = T - 1, k_score) and
/// normalized by quantized_softmax.
AttentionConfig default_attention_config(int bits, double alpha_q, double alpha_s, int k = 0, int k_score = 0);

using TrainRows = std::vector<std::vector<SpikeTrain>>;

struct AttentionResult {
  IntMatrix output;       // S_q x d_v, units alpha_s * (V code units)
  IntMatrix score_codes;  // S_q x S_k, after the normalizer
  std::size_t weight_sum_events = 0;
};

/// Q x K^T by time-based accumulation, normalization, re-encoding of the
/// scores as trains, then score x V by time-based accumulation.
/// q_trains: S_q rows of d_k trains; k_codes: S_k x d_k; v_codes: S_k x d_v.
AttentionResult attention_pipeline(const TrainRows& q_trains, const IntMatrix& k_codes, const IntMatrix& v_codes,
                                   const AttentionConfig& cfg);

/// Integer reference of the same pipeline: dead-zone-filtered Q codes,
/// integer matmuls, the same normalizer and score filtering.
AttentionResult attention_reference(const IntMatrix& q_codes, const IntMatrix& k_codes, const IntMatrix& v_codes,
                                    const AttentionConfig& cfg);

}  // namespace matterhorn
