#include "matterhorn/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "matterhorn/errors.hpp"

namespace matterhorn {
namespace {

std::string at_key(const std::string& where, const std::string& key) { return where + ": '" + key + "'"; }

void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
}

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

long long integer(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ConfigError(where + " must be an integer");
}

double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, at_key(where, key));
}

long long integer_or(const Json& j, const char* key, long long fallback, const std::string& where) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : integer(*it, at_key(where, key));
}

int small_int(long long v, const std::string& where) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(where + " is out of range");
  }
  return static_cast<int>(v);
}

const Json& required(const Json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing key '" + key + "'");
  return *it;
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON (" + e.what() + ")");
  }
}

Json to_json(const SpikeTrain& s) {
  Json a = Json::array();
  for (const auto b : s.bits()) a.push_back(static_cast<int>(b));
  return a;
}

SpikeTrain spike_train_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": spike train must be an array of 0/1");
  std::vector<std::uint8_t> bits;
  bits.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const long long v = integer(j[i], where + "[" + std::to_string(i) + "]");
    if (v != 0 && v != 1) throw ValueError(where + "[" + std::to_string(i) + "] must be 0 or 1");
    bits.push_back(static_cast<std::uint8_t>(v));
  }
  return SpikeTrain::from_bits(bits);
}

QnnLayer qnn_layer_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, {"n", "alpha_in", "alpha_out", "mode", "mu", "k", "weights", "bias"}, where);
  QnnLayer layer;
  const int bits = small_int(integer(required(j, "n", where), at_key(where, "n")), at_key(where, "n"));
  QuantMode mode = QuantMode::symmetric;
  if (const auto it = j.find("mode"); it != j.end()) {
    if (!it->is_string()) throw ConfigError(at_key(where, "mode") + " must be a string");
    try {
      mode = parse_quant_mode(it->get<std::string>());
    } catch (const Error& e) {
      throw ConfigError(at_key(where, "mode") + ": " + e.what());
    }
  }
  layer.in_params = {bits, number_or(j, "alpha_in", 1.0, where), mode};
  layer.out_params = {bits, number_or(j, "alpha_out", 1.0, where), mode};
  layer.dead_zone.mu = small_int(integer_or(j, "mu", 0, where), at_key(where, "mu"));
  layer.dead_zone.k = small_int(integer_or(j, "k", 0, where), at_key(where, "k"));

  const Json& bias = required(j, "bias", where);
  if (!bias.is_array() || bias.empty()) throw ConfigError(at_key(where, "bias") + " must be a nonempty array");
  for (std::size_t c = 0; c < bias.size(); ++c) {
    layer.bias.push_back(number(bias[c], at_key(where, "bias") + "[" + std::to_string(c) + "]"));
  }
  layer.outputs = static_cast<int>(layer.bias.size());

  const Json& w = required(j, "weights", where);
  if (!w.is_array() || w.empty()) throw ConfigError(at_key(where, "weights") + " must be a nonempty array of rows");
  layer.inputs = static_cast<int>(w.size());
  for (std::size_t r = 0; r < w.size(); ++r) {
    const std::string row_where = at_key(where, "weights") + "[" + std::to_string(r) + "]";
    if (!w[r].is_array() || w[r].size() != layer.bias.size()) {
      throw ConfigError(row_where + " must hold " + std::to_string(layer.outputs) + " values (one per bias entry)");
    }
    for (std::size_t c = 0; c < w[r].size(); ++c) {
      layer.weights.push_back(number(w[r][c], row_where + "[" + std::to_string(c) + "]"));
    }
  }
  try {
    layer.validate();
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return layer;
}

Json to_json(const QnnLayer& layer) {
  Json w = Json::array();
  for (int i = 0; i < layer.inputs; ++i) {
    Json row = Json::array();
    for (int o = 0; o < layer.outputs; ++o) row.push_back(layer.weight(i, o));
    w.push_back(std::move(row));
  }
  return Json{{"n", layer.out_params.bits},
              {"alpha_in", layer.in_params.alpha},
              {"alpha_out", layer.out_params.alpha},
              {"mode", to_string(layer.out_params.mode)},
              {"mu", layer.dead_zone.mu},
              {"k", layer.dead_zone.k},
              {"weights", std::move(w)},
              {"bias", layer.bias}};
}

MsuConfig msu_config_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, {"rows", "cols", "g_on_uS", "g_off_uS", "v_read_V", "adc_lsb_A", "rows_per_read", "gamma", "input_bits"},
                 where);
  MsuConfig cfg;
  MacroParams& m = cfg.macro;
  m.rows = small_int(integer_or(j, "rows", m.rows, where), at_key(where, "rows"));
  m.cols = small_int(integer_or(j, "cols", m.cols, where), at_key(where, "cols"));
  m.g_on = number_or(j, "g_on_uS", m.g_on * 1e6, where) * 1e-6;
  m.g_off = number_or(j, "g_off_uS", m.g_off * 1e6, where) * 1e-6;
  m.v_read = number_or(j, "v_read_V", m.v_read, where);
  m.adc_lsb = number_or(j, "adc_lsb_A", m.adc_lsb, where);
  m.rows_per_read = small_int(integer_or(j, "rows_per_read", m.rows_per_read, where), at_key(where, "rows_per_read"));
  cfg.gamma = number_or(j, "gamma", cfg.gamma, where);
  cfg.input_bits = small_int(integer_or(j, "input_bits", cfg.input_bits, where), at_key(where, "input_bits"));
  try {
    m.validate();
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return cfg;
}

Json to_json(const MsuConfig& cfg) {
  const MacroParams& m = cfg.macro;
  return Json{{"rows", m.rows},
              {"cols", m.cols},
              {"g_on_uS", m.g_on * 1e6},
              {"g_off_uS", m.g_off * 1e6},
              {"v_read_V", m.v_read},
              {"adc_lsb_A", m.lsb()},
              {"rows_per_read", m.read_group()},
              {"gamma", cfg.gamma},
              {"input_bits", cfg.input_bits}};
}

BlockDescriptor block_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, {"batch", "seq", "hidden", "ffn", "heads", "d_k", "window", "layers"}, where);
  const int window = small_int(integer_or(j, "window", 16, where), at_key(where, "window"));
  BlockDescriptor base = BlockDescriptor::bert_base(window);
  const long long hidden = integer_or(j, "hidden", base.hidden, where);
  const long long ffn = integer_or(j, "ffn", base.ffn, where);
  BlockDescriptor d = base;
  d.batch = integer_or(j, "batch", base.batch, where);
  d.seq = integer_or(j, "seq", base.seq, where);
  d.heads = integer_or(j, "heads", base.heads, where);
  d.d_k = integer_or(j, "d_k", base.d_k, where);
  d.layers = small_int(integer_or(j, "layers", base.layers, where), at_key(where, "layers"));
  d.hidden = hidden;
  d.ffn = ffn;
  d.fc = {{"q_proj", hidden, hidden, false}, {"k_proj", hidden, hidden, true}, {"v_proj", hidden, hidden, true},
          {"o_proj", hidden, hidden, false}, {"ffn_in", hidden, ffn, false},   {"ffn_out", ffn, hidden, false}};
  try {
    d.validate();
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return d;
}

Json to_json(const BlockDescriptor& d) {
  return Json{{"batch", d.batch}, {"seq", d.seq},     {"hidden", d.hidden}, {"ffn", d.ffn},
              {"heads", d.heads}, {"d_k", d.d_k},     {"window", d.window}, {"layers", d.layers}};
}

EnergyParams energy_params_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  EnergyParams p;
  for (const auto& item : j.items()) {
    const double v = number(item.value(), at_key(where, item.key()));
    try {
      p.set(item.key(), v);
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return p;
}

RateMap rates_from_json(const Json& j, const BlockDescriptor& desc, const std::string& where) {
  require_object(j, where);
  RateMap rates;
  const auto known = desc.components();
  if (const auto it = j.find("all"); it != j.end()) rates = uniform_rates(desc, number(*it, at_key(where, "all")));
  for (const auto& item : j.items()) {
    if (item.key() == "all") continue;
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw ConfigError(where + ": unknown component '" + item.key() + "'");
    }
    const double r = number(item.value(), at_key(where, item.key()));
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError(at_key(where, item.key()) + " must lie in [0, 1]");
    rates[item.key()] = r;
  }
  return rates;
}

Json to_json(const EnergyReport& r) {
  constexpr double mj = kJoulesToMilliJoules;
  Json cats = Json::object();
  const auto c = r.categories();
  const auto pct = r.percentages();
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    cats[std::string(kCategoryNames[i])] = Json{{"mJ", c[i] * mj}, {"percent", pct[i]}};
  }
  Json terms = Json::object();
  for (const auto& [k, v] : r.terms) terms[k] = v * mj;
  Json derived = Json::object();
  for (const auto& [k, v] : r.derived) derived[k] = v * mj;
  const BlockTableRow row = block_table_row(r);
  return Json{{"total_mJ", r.total() * mj},
              {"categories", std::move(cats)},
              {"table_row_mJ",
               {{"spike_movement", row.spike_movement},
                {"weight_access", row.weight_access},
                {"leakage", row.leakage},
                {"digital", row.digital},
                {"analog", row.analog},
                {"total", row.total()}}},
              {"terms_mJ", std::move(terms)},
              {"derived_mJ", std::move(derived)}};
}

Json to_json(const EquivalenceReport& r) {
  Json mism = Json::array();
  for (const auto& m : r.mismatches) {
    mism.push_back(Json{{"kind", to_string(m.kind)},
                        {"input", m.input},
                        {"output_index", m.output_index},
                        {"qnn_output", m.qnn_output},
                        {"snn_decoded", m.snn_decoded}});
  }
  return Json{{"passed", r.passed},
              {"cases_checked", r.cases_checked},
              {"mismatch_count", r.mismatch_count},
              {"max_abs_deviation", r.max_abs_deviation},
              {"mismatches", std::move(mism)}};
}

Json to_json(const SnnLayerConfig& cfg) {
  return Json{{"bits", cfg.bits},     {"window", cfg.window}, {"alpha", cfg.alpha},
              {"i_max", cfg.i_max},   {"k", cfg.k},           {"mode", to_string(cfg.mode)},
              {"mu", cfg.mu},         {"masked", cfg.masked}, {"baseline_silent_min", cfg.baseline_silent_min},
              {"threshold_offset", cfg.threshold_offset}};
}

}  // namespace matterhorn
