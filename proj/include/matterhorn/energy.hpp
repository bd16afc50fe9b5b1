#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace matterhorn {

/// Unit energies in pJ (e_cim_fJ in fJ per bit). The first block is the
/// published 45 nm set; the second block has no published value and is
/// derived from the first unless overridden.
struct EnergyParams {
  double e_mac_int4 = 0.0848;
  double e_mac_mixed = 0.0663;  // 1-bit x 4-bit
  double e_acc_4b = 0.0502;
  double e_acc_1b = 0.0429;
  double e_cmp = 0.0502;
  double e_leak = 0.002;             // per cycle
  double e_weight_read_bit = 0.0985;  // SRAM, per bit
  double e_sparse_move_bit = 0.18;    // NoC, per bit
  double e_cim_fJ = 2.164;            // crossbar, per 1-bit MAC

  int read_bits = 4;    // threshold and K/V word width
  int weight_bits = 1;  // binary weights

  // Derived defaults. A negative value means "derive", see resolved().
  double e_read_th = -1;    // read_bits * e_weight_read_bit
  double e_read_kv = -1;    // read_bits * e_weight_read_bit
  double e_write_kv = -1;   // read_bits * e_weight_read_bit
  double e_read_w = -1;     // weight_bits * e_weight_read_bit
  double e_sum = -1;        // e_acc_1b
  double e_map = -1;        // e_mac_int4 + e_acc_4b
  double e_encoding = -1;   // e_acc_4b
  double e_decay = -1;      // 0: folded into the mixed-precision spike MAC
  double e_spike_mac = -1;  // e_mac_mixed, per-spike MAC of the baseline
  double e_scale_mac = -1;  // e_mac_int4, per-step scaling MAC of time-based accumulation
  double e_shift_add = -1;  // e_acc_4b

  /// Copy with every derived field filled in.
  [[nodiscard]] EnergyParams resolved() const;
  /// Throws ParameterError on a negative published value or bad widths.
  void validate() const;
  /// Every resolved unit energy by name (pJ, e_cim in fJ), for report headers.
  [[nodiscard]] std::map<std::string, double> assumptions() const;
  /// Sets one field by its assumptions() name. Throws ConfigError on an unknown name.
  void set(std::string_view name, double value);
};

struct WorkloadShape {
  long long batch = 1;
  long long seq = 1;
  long long c_in = 1;
  long long c_out = 1;
  long long d_k = 1;
  long long heads = 1;
  int window = 1;  // T
  double spike_ratio = 0.0;
  bool writes_kv = false;

  void validate() const;
  [[nodiscard]] double fc_outputs() const { return double(batch) * double(seq) * double(c_out); }
  [[nodiscard]] double qkv_outputs() const { return double(batch) * double(heads) * double(seq) * double(seq); }
};

inline constexpr std::size_t kCategoryCount = 7;
inline constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "spike_movement", "weight_access", "leakage", "digital_compute", "analog_compute", "kv_traffic", "thresholding"};

/// Energy in joules per category plus the individual terms behind them.
struct EnergyReport {
  double spike_movement = 0;
  double weight_access = 0;
  double leakage = 0;
  double digital_compute = 0;
  double analog_compute = 0;
  double kv_traffic = 0;
  double thresholding = 0;
  /// Part of thresholding spent reading thresholds from SRAM.
  double threshold_read = 0;

  std::map<std::string, double> terms;    // J, each term lands in exactly one category
  std::map<std::string, double> derived;  // J, informative aggregates, not summed
  std::map<std::string, double> assumptions;

  [[nodiscard]] double total() const;
  [[nodiscard]] std::array<double, kCategoryCount> categories() const;
  /// Category shares in percent, same order as kCategoryNames.
  [[nodiscard]] std::array<double, kCategoryCount> percentages() const;
  EnergyReport& operator+=(const EnergyReport& other);
  /// Copy with every term key prefixed by "<prefix>.".
  [[nodiscard]] EnergyReport prefixed(const std::string& prefix) const;
};

/// Digital SNN fully connected layer, one term per bracket of the model.
EnergyReport e_fc_baseline(const WorkloadShape& shape, const EnergyParams& p);

/// Digital SNN attention matmul with per-spike decay and MAC over
/// N = B*h*S^2 outputs of inner dimension d_k.
EnergyReport e_qkv_baseline(const WorkloadShape& shape, const EnergyParams& p);

/// Same as e_qkv_baseline for an arbitrary output count and inner dimension.
EnergyReport e_attention_baseline(double outputs, double inner, int window, double spike_ratio, const EnergyParams& p);

/// Fully connected layer on the mixed-signal unit: digital movement and
/// thresholding plus crossbar compute. Weight access is zero.
/// Throws ParameterError unless T is a power of two.
EnergyReport e_fc_msu(const WorkloadShape& shape, const EnergyParams& p);

/// Attention matmul with time-based accumulation and per-step scaling.
EnergyReport e_qkv_timeacc(const WorkloadShape& shape, const EnergyParams& p);
EnergyReport e_attention_timeacc(double outputs, double inner, int window, double spike_ratio, const EnergyParams& p);

enum class EnergyMode { baseline, mttfs, deadzone, msu };
std::string to_string(EnergyMode m);
EnergyMode parse_energy_mode(std::string_view s);

struct FcLayerDesc {
  std::string name;
  long long c_in = 0;
  long long c_out = 0;
  bool writes_kv = false;
};

/// One transformer encoder block and the workload it runs.
struct BlockDescriptor {
  long long batch = 64;
  long long seq = 128;
  long long hidden = 768;
  long long ffn = 3072;
  long long heads = 12;
  long long d_k = 64;
  int window = 16;
  int layers = 12;
  std::vector<FcLayerDesc> fc;  // binary-weight projections

  static BlockDescriptor bert_base(int window = 16);
  /// fc layer names followed by attn_scores and attn_context.
  [[nodiscard]] std::vector<std::string> components() const;
  void validate() const;
};

using RateMap = std::map<std::string, double>;

/// Uniform per-component spike ratio for the mode.
double default_rate(EnergyMode mode);
RateMap uniform_rates(const BlockDescriptor& desc, double spike_ratio);

/// Sum over the block's components. baseline, mttfs and deadzone share the
/// digital model and differ only in their rates; msu maps the projections
/// to the crossbar and the attention matmuls to time-based accumulation.
/// Throws ConfigError when a component has no rate.
EnergyReport block_energy(const BlockDescriptor& desc, const RateMap& rates, EnergyMode mode, const EnergyParams& p = {});

/// Columns of the per-block comparison table, in mJ.
struct BlockTableRow {
  double spike_movement = 0;
  double weight_access = 0;  // weights, thresholds and K/V traffic
  double leakage = 0;
  double digital = 0;        // digital compute and comparisons
  double analog = 0;
  [[nodiscard]] double total() const { return spike_movement + weight_access + leakage + digital + analog; }
};
BlockTableRow block_table_row(const EnergyReport& r);

struct Scenario {
  std::string name;
  int window = 16;
  double spike_ratio = 0;
  EnergyMode mode = EnergyMode::baseline;
};

struct ScenarioShares {
  Scenario scenario;
  EnergyReport report;
  double compute_pct = 0;
  double movement_pct = 0;
  double weight_pct = 0;
  double other_pct = 0;
};

/// The four published literature operating points.
std::vector<Scenario> literature_scenarios();

/// BERT-base block per scenario with uniform rates. Throws UsageError on an
/// empty list.
std::vector<ScenarioShares> scenario_compare(const std::vector<Scenario>& scenarios, const EnergyParams& p = {});

inline constexpr double kJoulesToMilliJoules = 1e3;

}  // namespace matterhorn
