#include "matterhorn/energy.hpp"

#include <cmath>

#include "matterhorn/errors.hpp"
#include "matterhorn/types.hpp"

namespace matterhorn {
namespace {

constexpr double kPico = 1e-12;

using DoubleField = double EnergyParams::*;

struct NamedField {
  std::string_view name;
  DoubleField field;
};

constexpr std::array<NamedField, 20> kFields = {{
    {"e_mac_int4", &EnergyParams::e_mac_int4},
    {"e_mac_mixed", &EnergyParams::e_mac_mixed},
    {"e_acc_4b", &EnergyParams::e_acc_4b},
    {"e_acc_1b", &EnergyParams::e_acc_1b},
    {"e_cmp", &EnergyParams::e_cmp},
    {"e_leak", &EnergyParams::e_leak},
    {"e_weight_read_bit", &EnergyParams::e_weight_read_bit},
    {"e_sparse_move_bit", &EnergyParams::e_sparse_move_bit},
    {"e_cim_fJ", &EnergyParams::e_cim_fJ},
    {"e_read_th", &EnergyParams::e_read_th},
    {"e_read_kv", &EnergyParams::e_read_kv},
    {"e_write_kv", &EnergyParams::e_write_kv},
    {"e_read_w", &EnergyParams::e_read_w},
    {"e_sum", &EnergyParams::e_sum},
    {"e_map", &EnergyParams::e_map},
    {"e_encoding", &EnergyParams::e_encoding},
    {"e_decay", &EnergyParams::e_decay},
    {"e_spike_mac", &EnergyParams::e_spike_mac},
    {"e_scale_mac", &EnergyParams::e_scale_mac},
    {"e_shift_add", &EnergyParams::e_shift_add},
}};

constexpr std::size_t kPublishedCount = 9;

class Builder {
 public:
  explicit Builder(const EnergyParams& p) { report_.assumptions = p.assumptions(); }

  void add(double EnergyReport::*category, const std::string& term, double picojoules) {
    const double joules = picojoules * kPico;
    report_.*category += joules;
    report_.terms[term] += joules;
  }
  void add_threshold_read(const std::string& term, double picojoules) {
    add(&EnergyReport::thresholding, term, picojoules);
    report_.threshold_read += picojoules * kPico;
  }
  void derive(const std::string& name, double picojoules) { report_.derived[name] += picojoules * kPico; }

  EnergyReport finish() { return std::move(report_); }

 private:
  EnergyReport report_;
};

void check_ratio(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("spike ratio must lie in [0, 1]");
}

void add_thresholding(Builder& b, double outputs, int window, const EnergyParams& q) {
  b.add(&EnergyReport::thresholding, "threshold.cmp", outputs * window * q.e_cmp);
  b.add_threshold_read("threshold.read", outputs * window * q.e_read_th);
}

}  // namespace

EnergyParams EnergyParams::resolved() const {
  EnergyParams r = *this;
  const double word = static_cast<double>(read_bits) * e_weight_read_bit;
  auto fill = [](double& field, double value) {
    if (field < 0.0) field = value;
  };
  fill(r.e_read_th, word);
  fill(r.e_read_kv, word);
  fill(r.e_write_kv, word);
  fill(r.e_read_w, static_cast<double>(weight_bits) * e_weight_read_bit);
  fill(r.e_sum, e_acc_1b);
  fill(r.e_map, e_mac_int4 + e_acc_4b);
  fill(r.e_encoding, e_acc_4b);
  fill(r.e_decay, 0.0);
  fill(r.e_spike_mac, e_mac_mixed);
  fill(r.e_scale_mac, e_mac_int4);
  fill(r.e_shift_add, e_acc_4b);
  return r;
}

void EnergyParams::validate() const {
  for (std::size_t i = 0; i < kPublishedCount; ++i) {
    const double v = this->*kFields[i].field;
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ParameterError("unit energy " + std::string(kFields[i].name) + " must be finite and nonnegative");
    }
  }
  for (std::size_t i = kPublishedCount; i < kFields.size(); ++i) {
    const double v = this->*kFields[i].field;
    if (!std::isfinite(v)) throw ParameterError("unit energy " + std::string(kFields[i].name) + " must be finite");
  }
  if (read_bits < 1 || weight_bits < 1) throw ParameterError("bit widths must be positive");
}

std::map<std::string, double> EnergyParams::assumptions() const {
  const EnergyParams r = resolved();
  std::map<std::string, double> out;
  for (const auto& f : kFields) out.emplace(std::string(f.name), r.*f.field);
  out.emplace("read_bits", r.read_bits);
  out.emplace("weight_bits", r.weight_bits);
  return out;
}

void EnergyParams::set(std::string_view name, double value) {
  if (name == "read_bits" || name == "weight_bits") {
    if (value != std::floor(value) || value < 1 || value > 64) throw ConfigError(std::string(name) + " must be an integer in [1, 64]");
    (name == "read_bits" ? read_bits : weight_bits) = static_cast<int>(value);
    return;
  }
  for (const auto& f : kFields) {
    if (f.name == name) {
      if (!(value >= 0.0) || !std::isfinite(value)) throw ConfigError(std::string(name) + " must be finite and nonnegative");
      this->*f.field = value;
      return;
    }
  }
  throw ConfigError("unknown energy parameter '" + std::string(name) + "'");
}

void WorkloadShape::validate() const {
  if (batch < 1 || seq < 1 || c_in < 1 || c_out < 1 || d_k < 1 || heads < 1 || window < 1) {
    throw ParameterError("workload dimensions must be positive");
  }
  check_ratio(spike_ratio);
}

double EnergyReport::total() const {
  double t = 0.0;
  for (const double c : categories()) t += c;
  return t;
}

std::array<double, kCategoryCount> EnergyReport::categories() const {
  return {spike_movement, weight_access, leakage, digital_compute, analog_compute, kv_traffic, thresholding};
}

std::array<double, kCategoryCount> EnergyReport::percentages() const {
  std::array<double, kCategoryCount> pct{};
  const double t = total();
  if (t <= 0.0) return pct;
  const auto c = categories();
  for (std::size_t i = 0; i < kCategoryCount; ++i) pct[i] = 100.0 * c[i] / t;
  return pct;
}

EnergyReport& EnergyReport::operator+=(const EnergyReport& o) {
  spike_movement += o.spike_movement;
  weight_access += o.weight_access;
  leakage += o.leakage;
  digital_compute += o.digital_compute;
  analog_compute += o.analog_compute;
  kv_traffic += o.kv_traffic;
  thresholding += o.thresholding;
  threshold_read += o.threshold_read;
  for (const auto& [k, v] : o.terms) terms[k] += v;
  for (const auto& [k, v] : o.derived) derived[k] += v;
  if (assumptions.empty()) assumptions = o.assumptions;
  return *this;
}

EnergyReport EnergyReport::prefixed(const std::string& prefix) const {
  EnergyReport r = *this;
  r.terms.clear();
  r.derived.clear();
  for (const auto& [k, v] : terms) r.terms[prefix + "." + k] = v;
  for (const auto& [k, v] : derived) r.derived[prefix + "." + k] = v;
  return r;
}

EnergyReport e_fc_baseline(const WorkloadShape& shape, const EnergyParams& params) {
  shape.validate();
  params.validate();
  const EnergyParams q = params.resolved();
  Builder b(params);
  const double n = shape.fc_outputs();
  const double slots = n * double(shape.c_in) * shape.window;
  const double s = shape.spike_ratio;
  b.add(&EnergyReport::digital_compute, "spike.decay", slots * s * q.e_decay);
  b.add(&EnergyReport::digital_compute, "spike.mac", slots * s * q.e_spike_mac);
  b.add(&EnergyReport::weight_access, "spike.weight_read", slots * s * q.e_read_w);
  b.add(&EnergyReport::spike_movement, "spike.move", slots * s * q.e_sparse_move_bit);
  b.add(&EnergyReport::leakage, "leak", slots * q.e_leak);
  add_thresholding(b, n, shape.window, q);
  if (shape.writes_kv) b.add(&EnergyReport::kv_traffic, "kv_write", n * q.e_write_kv);
  return b.finish();
}

EnergyReport e_attention_baseline(double outputs, double inner, int window, double s, const EnergyParams& params) {
  check_ratio(s);
  if (!(outputs > 0) || !(inner > 0) || window < 1) throw ParameterError("attention dimensions must be positive");
  params.validate();
  const EnergyParams q = params.resolved();
  Builder b(params);
  const double slots = outputs * inner * window;
  b.add(&EnergyReport::digital_compute, "spike.encoding", slots * s * q.e_encoding);
  b.add(&EnergyReport::digital_compute, "spike.mac", slots * s * q.e_spike_mac);
  b.add(&EnergyReport::spike_movement, "spike.move", slots * s * q.e_sparse_move_bit);
  b.add(&EnergyReport::kv_traffic, "spike.kv_read", slots * s * q.e_read_kv);
  b.add(&EnergyReport::leakage, "leak", slots * q.e_leak);
  add_thresholding(b, outputs, window, q);
  return b.finish();
}

EnergyReport e_qkv_baseline(const WorkloadShape& shape, const EnergyParams& p) {
  shape.validate();
  return e_attention_baseline(shape.qkv_outputs(), double(shape.d_k), shape.window, shape.spike_ratio, p);
}

EnergyReport e_fc_msu(const WorkloadShape& shape, const EnergyParams& params) {
  shape.validate();
  params.validate();
  if (!is_power_of_two(shape.window)) {
    throw ParameterError("the crossbar path needs T to be a power of two, got " + std::to_string(shape.window));
  }
  const EnergyParams q = params.resolved();
  Builder b(params);
  const double bs = double(shape.batch) * double(shape.seq);
  const double n = shape.fc_outputs();
  const double ci = double(shape.c_in);
  const double co = double(shape.c_out);
  const double bits = std::log2(double(shape.window));
  const double s = shape.spike_ratio;

  b.add(&EnergyReport::spike_movement, "spike.move", n * ci * shape.window * s * q.e_sparse_move_bit);
  b.add(&EnergyReport::leakage, "leak", n * ci * shape.window * q.e_leak);
  add_thresholding(b, n, shape.window, q);

  const double input_sum = bs * shape.window * ci * q.e_sum;
  const double cim = bs * co * bits * ci * q.e_cim_fJ * 1e-3;
  const double shift_add = bs * co * bits * q.e_shift_add;
  const double map = bs * co * q.e_map;
  b.add(&EnergyReport::digital_compute, "msu.input_sum", input_sum);
  b.add(&EnergyReport::analog_compute, "msu.cim", cim);
  b.add(&EnergyReport::digital_compute, "msu.shift_add", shift_add);
  b.add(&EnergyReport::digital_compute, "msu.map", map);
  b.derive("msu.analog_equation", input_sum + cim + shift_add + map);
  return b.finish();
}

EnergyReport e_attention_timeacc(double outputs, double inner, int window, double s, const EnergyParams& params) {
  check_ratio(s);
  if (!(outputs > 0) || !(inner > 0) || window < 1) throw ParameterError("attention dimensions must be positive");
  params.validate();
  const EnergyParams q = params.resolved();
  Builder b(params);
  const double slots = outputs * inner * window;
  b.add(&EnergyReport::digital_compute, "spike.acc", slots * s * q.e_acc_4b);
  b.add(&EnergyReport::spike_movement, "spike.move", slots * s * q.e_sparse_move_bit);
  b.add(&EnergyReport::kv_traffic, "spike.kv_read", slots * s * q.e_read_kv);
  b.add(&EnergyReport::leakage, "leak", slots * q.e_leak);
  b.add(&EnergyReport::digital_compute, "scale.encoding", outputs * window * q.e_encoding);
  b.add(&EnergyReport::digital_compute, "scale.mac", outputs * window * q.e_scale_mac);
  add_thresholding(b, outputs, window, q);
  return b.finish();
}

EnergyReport e_qkv_timeacc(const WorkloadShape& shape, const EnergyParams& p) {
  shape.validate();
  return e_attention_timeacc(shape.qkv_outputs(), double(shape.d_k), shape.window, shape.spike_ratio, p);
}

std::string to_string(EnergyMode m) {
  switch (m) {
    case EnergyMode::baseline: return "baseline";
    case EnergyMode::mttfs: return "mttfs";
    case EnergyMode::deadzone: return "deadzone";
    case EnergyMode::msu: return "msu";
  }
  return "unknown";
}

EnergyMode parse_energy_mode(std::string_view s) {
  if (s == "baseline") return EnergyMode::baseline;
  if (s == "mttfs") return EnergyMode::mttfs;
  if (s == "deadzone") return EnergyMode::deadzone;
  if (s == "msu") return EnergyMode::msu;
  throw ConfigError("unknown energy mode '" + std::string(s) + "' (baseline, mttfs, deadzone, msu)");
}

BlockDescriptor BlockDescriptor::bert_base(int window) {
  BlockDescriptor d;
  d.window = window;
  d.fc = {
      {"q_proj", d.hidden, d.hidden, false}, {"k_proj", d.hidden, d.hidden, true},
      {"v_proj", d.hidden, d.hidden, true},  {"o_proj", d.hidden, d.hidden, false},
      {"ffn_in", d.hidden, d.ffn, false},    {"ffn_out", d.ffn, d.hidden, false},
  };
  return d;
}

std::vector<std::string> BlockDescriptor::components() const {
  std::vector<std::string> names;
  for (const auto& l : fc) names.push_back(l.name);
  names.emplace_back("attn_scores");
  names.emplace_back("attn_context");
  return names;
}

void BlockDescriptor::validate() const {
  if (batch < 1 || seq < 1 || heads < 1 || d_k < 1 || window < 1 || layers < 1) {
    throw ParameterError("block dimensions must be positive");
  }
  for (const auto& l : fc) {
    if (l.c_in < 1 || l.c_out < 1) throw ParameterError("layer " + l.name + " has a nonpositive dimension");
  }
}

double default_rate(EnergyMode mode) {
  switch (mode) {
    case EnergyMode::baseline: return 0.0407;
    case EnergyMode::mttfs: return 0.0277;
    case EnergyMode::deadzone:
    case EnergyMode::msu: return 0.0165;
  }
  return 0.0;
}

RateMap uniform_rates(const BlockDescriptor& desc, double spike_ratio) {
  RateMap r;
  for (const auto& name : desc.components()) r[name] = spike_ratio;
  return r;
}

EnergyReport block_energy(const BlockDescriptor& desc, const RateMap& rates, EnergyMode mode, const EnergyParams& p) {
  desc.validate();
  auto rate = [&](const std::string& name) {
    const auto it = rates.find(name);
    if (it == rates.end()) throw ConfigError("no spike rate given for component '" + name + "'");
    return it->second;
  };

  EnergyReport total;
  total.assumptions = p.assumptions();
  for (const auto& layer : desc.fc) {
    WorkloadShape shape;
    shape.batch = desc.batch;
    shape.seq = desc.seq;
    shape.c_in = layer.c_in;
    shape.c_out = layer.c_out;
    shape.d_k = desc.d_k;
    shape.heads = desc.heads;
    shape.window = desc.window;
    shape.spike_ratio = rate(layer.name);
    shape.writes_kv = layer.writes_kv;
    const EnergyReport r = mode == EnergyMode::msu ? e_fc_msu(shape, p) : e_fc_baseline(shape, p);
    total += r.prefixed(layer.name);
  }

  const double b = double(desc.batch);
  const double h = double(desc.heads);
  const double s = double(desc.seq);
  const double dk = double(desc.d_k);
  const auto attention = mode == EnergyMode::msu ? e_attention_timeacc : e_attention_baseline;
  total += attention(b * h * s * s, dk, desc.window, rate("attn_scores"), p).prefixed("attn_scores");
  total += attention(b * h * s * dk, s, desc.window, rate("attn_context"), p).prefixed("attn_context");
  return total;
}

BlockTableRow block_table_row(const EnergyReport& r) {
  constexpr double k = kJoulesToMilliJoules;
  BlockTableRow row;
  row.spike_movement = r.spike_movement * k;
  row.weight_access = (r.weight_access + r.kv_traffic + r.threshold_read) * k;
  row.leakage = r.leakage * k;
  row.digital = (r.digital_compute + r.thresholding - r.threshold_read) * k;
  row.analog = r.analog_compute * k;
  return row;
}

std::vector<Scenario> literature_scenarios() {
  return {
      {"Otters", 15, 0.0514, EnergyMode::baseline},
      {"Sorbet", 16, 0.13, EnergyMode::baseline},
      {"SpikingBERT", 16, 0.25, EnergyMode::baseline},
      {"SpikingLM", 4, 0.33, EnergyMode::baseline},
  };
}

std::vector<ScenarioShares> scenario_compare(const std::vector<Scenario>& scenarios, const EnergyParams& p) {
  if (scenarios.empty()) throw UsageError("scenario list is empty");
  std::vector<ScenarioShares> out;
  out.reserve(scenarios.size());
  for (const auto& sc : scenarios) {
    const BlockDescriptor desc = BlockDescriptor::bert_base(sc.window);
    ScenarioShares row;
    row.scenario = sc;
    row.report = block_energy(desc, uniform_rates(desc, sc.spike_ratio), sc.mode, p);
    const BlockTableRow t = block_table_row(row.report);
    const double total = t.total();
    if (total > 0.0) {
      row.compute_pct = 100.0 * (t.digital + t.analog) / total;
      row.movement_pct = 100.0 * t.spike_movement / total;
      row.weight_pct = 100.0 * t.weight_access / total;
      row.other_pct = 100.0 * t.leakage / total;
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace matterhorn
