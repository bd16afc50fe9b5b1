#include "matterhorn/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "matterhorn/area.hpp"
#include "matterhorn/attention.hpp"
#include "matterhorn/conversion.hpp"
#include "matterhorn/crossbar.hpp"
#include "matterhorn/energy.hpp"
#include "matterhorn/errors.hpp"
#include "matterhorn/json_io.hpp"
#include "matterhorn/stats.hpp"

namespace matterhorn {
namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::uint64_t seed = 1;
  std::string output_path;

  void emit(const std::string& text) const {
    if (output_path.empty()) {
      out << text;
      return;
    }
    std::ofstream f(output_path, std::ios::binary);
    if (!f) throw ConfigError(output_path + ": cannot open for writing");
    f << text;
  }
  void emit(const Json& j) const { emit(j.dump(2) + "\n"); }
};

struct VerificationFailed {
  std::string text;
};

int max_code(int bits, QuantMode mode) { return code_range(bits, mode).hi; }

std::string csv_header(const Json& config) {
  std::string out;
  for (const auto& item : config.items()) {
    if (item.value().is_object()) {
      for (const auto& sub : item.value().items()) out += "# " + item.key() + "." + sub.key() + "=" + sub.value().dump() + "\n";
    } else {
      out += "# " + item.key() + "=" + item.value().dump() + "\n";
    }
  }
  return out;
}

Json assumptions_json(const EnergyParams& p) {
  Json j = Json::object();
  for (const auto& [k, v] : p.assumptions()) {
    if (k.ends_with("_bits")) {
      j[k] = static_cast<int>(v);
    } else {
      j[k] = v;
    }
  }
  return j;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  int bits = 3;
  int k = 0;
  std::string mode = "sym";
  std::optional<int> imax;
  std::string weights = "random";
  bool exhaustive = false;
  std::uint64_t samples = 0;
  int inputs = 4;
  int outputs = 4;
  double fault_offset = 0.0;
};

QnnLayer random_layer(const VerifyOptions& o, QuantMode mode, int mu, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> sign(0, 1);
  std::uniform_int_distribution<int> bias(-2, 2);
  QnnLayer layer;
  layer.inputs = o.inputs;
  layer.outputs = o.outputs;
  layer.in_params = {o.bits, 1.0, mode};
  layer.out_params = {o.bits, 1.0, mode};
  layer.dead_zone = {mu, o.k};
  for (int i = 0; i < o.inputs * o.outputs; ++i) layer.weights.push_back(sign(rng) ? 1.0 : -1.0);
  for (int j = 0; j < o.outputs; ++j) layer.bias.push_back(bias(rng));
  return layer;
}

void cmd_verify(const VerifyOptions& o, const Context& ctx) {
  QnnLayer layer;
  std::uint64_t weight_seed = ctx.seed;
  const QuantMode mode = parse_quant_mode(o.mode);
  if (o.weights.rfind("random", 0) == 0) {
    const std::string rest = o.weights.substr(6);
    if (!rest.empty()) {
      if (rest[0] != ':') throw UsageError("--weights expects a file path or random[:SEED]");
      try {
        weight_seed = std::stoull(rest.substr(1));
      } catch (const std::exception&) {
        throw UsageError("--weights random:SEED needs an unsigned integer seed");
      }
    }
    const int a = max_code(o.bits, mode);
    const int i_max = o.imax.value_or(a);
    layer = random_layer(o, mode, a - i_max, weight_seed);
  } else {
    layer = qnn_layer_from_json(load_json_file(o.weights), o.weights);
  }

  const int a = max_code(layer.out_params.bits, layer.out_params.mode);
  SnnLayerConfig cfg = derive_snn_config(layer.out_params, a - layer.dead_zone.mu, layer.dead_zone.k);
  cfg.threshold_offset = o.fault_offset;

  EquivalenceDomain domain = ExhaustiveInputs{};
  Json domain_json = {{"kind", "exhaustive"}};
  if (o.samples > 0) {
    domain = SampledPreActivations{o.samples, ctx.seed, 0.0, 0.0};
    domain_json = {{"kind", "sampled"}, {"samples", o.samples}, {"seed", ctx.seed}};
  }
  const EquivalenceReport report = verify_equivalence(layer, cfg, domain);

  Json config = {{"seed", ctx.seed},
                 {"weights", o.weights.rfind("random", 0) == 0 ? Json(fmt::format("random:{}", weight_seed)) : Json(o.weights)},
                 {"domain", domain_json},
                 {"snn", to_json(cfg)},
                 {"layer", to_json(layer)}};
  Json doc = {{"command", "verify"}, {"config", std::move(config)}, {"report", to_json(report)}};
  if (!report.passed) throw VerificationFailed{doc.dump(2) + "\n"};
  ctx.emit(doc);
}

// ---------------------------------------------------------------- encode

struct EncodeOptions {
  int bits = 4;
  int k = 0;
  std::string mode = "sym";
  std::optional<int> imax;
  double alpha = 1.0;
  std::optional<double> value;
  std::optional<int> code;
};

SnnLayerConfig layer_config(int bits, double alpha, std::optional<int> imax, int k, const std::string& mode_name) {
  const QuantMode mode = parse_quant_mode(mode_name);
  return SnnLayerConfig::create(bits, alpha, imax.value_or(max_code(bits, mode)), k, mode);
}

void cmd_encode(const EncodeOptions& o, const Context& ctx) {
  const SnnLayerConfig cfg = layer_config(o.bits, o.alpha, o.imax, o.k, o.mode);
  Json doc = {{"command", "encode"}, {"config", {{"snn", to_json(cfg)}}}};
  SpikeTrain train = SpikeTrain::silent(cfg.window);
  if (o.code) {
    doc["input"] = {{"code", *o.code}};
    train = encode_integer(*o.code, cfg);
  } else {
    const QuantParams q{cfg.bits, cfg.alpha, cfg.mode};
    doc["input"] = {{"value", *o.value}, {"quantized", quantize(*o.value, q)}};
    train = fire_analytic(*o.value, cfg);
  }
  doc["spike_time"] = train.spike_time() ? Json(*train.spike_time()) : Json(nullptr);
  doc["bits"] = to_json(train);
  doc["decoded"] = decode_spike(train, cfg);
  ctx.emit(doc);
}

// ------------------------------------------------------------------ xbar

struct XbarOptions {
  std::string replay;
  std::string config;
  std::uint64_t fuzz = 0;
  int rows = 300;
  int cols = 300;
};

double micro(double amps) { return std::round(amps * 1e12) / 1e6; }

void cmd_xbar(const XbarOptions& o, const Context& ctx) {
  MsuConfig cfg;
  if (!o.config.empty()) cfg = msu_config_from_json(load_json_file(o.config), o.config);

  if (!o.replay.empty()) {
    // "appendix-a" is an accepted alias of the stored example.
    if (o.replay != "appendix-a" && o.replay != "example") {
      throw UsageError("unknown replay '" + o.replay + "' (available: example)");
    }
    const ReadoutExample ex = small_readout_example();
    const CrossbarMacro macro(ex.params, map_signed_weights(ex.weights, ex.params));
    const ColumnReadout r = macro.read(ex.active);
    Json currents = Json::array();
    for (const double c : r.currents) currents.push_back(micro(c));
    Json weights = Json::array();
    for (int row = 0; row < ex.weights.rows; ++row) {
      Json line = Json::array();
      for (int c = 0; c < ex.weights.cols; ++c) line.push_back(ex.weights(row, c));
      weights.push_back(std::move(line));
    }
    MsuConfig echo;
    echo.macro = ex.params;
    ctx.emit(Json{{"command", "xbar"},
                  {"config", {{"replay", o.replay}, {"macro", to_json(echo)}, {"weights", weights}}},
                  {"active_rows", ex.active},
                  {"currents_uA", currents},
                  {"codes", r.codes}});
    return;
  }

  if (o.fuzz == 0) throw UsageError("xbar needs --replay NAME or --fuzz N");
  if (o.rows < 1 || o.cols < 1) throw UsageError("--rows and --cols must be positive");
  std::mt19937_64 rng(ctx.seed);
  std::uniform_int_distribution<int> sign(0, 1);
  std::uniform_int_distribution<int> input(0, (1 << cfg.input_bits) - 1);
  std::uint64_t mismatches = 0;
  int tiles = 0;
  for (std::uint64_t n = 0; n < o.fuzz; ++n) {
    SignMatrix w(o.rows, o.cols);
    for (auto& v : w.v) v = sign(rng) ? 1 : -1;
    std::vector<int> a(o.rows);
    for (auto& v : a) v = input(rng);
    const TiledVmmResult got = tiled_vmm(a, w, cfg);
    tiles = got.tiles;
    if (got.integer != signed_vmm_reference(a, w)) ++mismatches;
  }
  Json doc = {{"command", "xbar"},
              {"config", {{"seed", ctx.seed}, {"rows", o.rows}, {"cols", o.cols}, {"msu", to_json(cfg)}}},
              {"instances", o.fuzz},
              {"tiles_per_instance", tiles},
              {"mismatches", mismatches},
              {"passed", mismatches == 0}};
  if (mismatches != 0) throw VerificationFailed{doc.dump(2) + "\n"};
  ctx.emit(doc);
}

// ------------------------------------------------------------------ attn

struct AttnOptions {
  std::uint64_t instances = 10000;
  int bits = 4;
  int tokens = 4;
  int dk = 4;
};

void cmd_attn(const AttnOptions& o, const Context& ctx) {
  if (o.bits < 2 || o.bits > 8) throw UsageError("--bits must be in [2, 8]");
  if (o.tokens < 1 || o.dk < 1) throw UsageError("--tokens and --dk must be positive");
  std::mt19937_64 rng(ctx.seed);

  // Kernel against MAC integration.
  std::uint64_t kernel_mismatch = 0;
  for (std::uint64_t n = 0; n < o.instances; ++n) {
    const QuantMode mode = rng() & 1 ? QuantMode::symmetric : QuantMode::asymmetric;
    const int window = 1 << o.bits;
    const int i_max = static_cast<int>(rng() % window);
    const int k = static_cast<int>(rng() % 3);
    const SnnLayerConfig cfg = SnnLayerConfig::create(o.bits, 1.0, i_max, k, mode);
    const std::size_t count = 1 + rng() % 64;
    const double density = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    std::vector<SpikeTrain> trains;
    std::vector<double> weights;
    for (std::size_t i = 0; i < count; ++i) {
      const bool fires = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < density;
      trains.push_back(fires ? SpikeTrain::at(window, static_cast<int>(rng() % window)) : SpikeTrain::silent(window));
      weights.push_back(static_cast<double>(static_cast<int>(rng() % 17) - 8));
    }
    const double mac = integrate(trains, weights, cfg).final_value();
    if (time_based_accumulate(trains, weights, cfg).value != mac) ++kernel_mismatch;
  }

  // Full pipeline against the integer reference.
  const AttentionConfig acfg = default_attention_config(o.bits, 1.0, 1.0 / ((1 << o.bits) - 1));
  const CodeRange qr = acfg.query.codes();
  const std::uint64_t pipelines = std::max<std::uint64_t>(1, o.instances / 100);
  std::uint64_t pipeline_mismatch = 0;
  std::uniform_int_distribution<int> qd(qr.lo, qr.hi);
  std::uniform_int_distribution<int> kv(-3, 3);
  for (std::uint64_t n = 0; n < pipelines; ++n) {
    IntMatrix q(o.tokens, o.dk), kk(o.tokens, o.dk), v(o.tokens, o.dk);
    TrainRows trains(o.tokens);
    for (int i = 0; i < o.tokens; ++i) {
      for (int d = 0; d < o.dk; ++d) {
        q(i, d) = qd(rng);
        kk(i, d) = kv(rng);
        v(i, d) = kv(rng);
        trains[i].push_back(encode_integer(static_cast<int>(q(i, d)), acfg.query));
      }
    }
    const AttentionResult got = attention_pipeline(trains, kk, v, acfg);
    const AttentionResult ref = attention_reference(q, kk, v, acfg);
    if (!(got.output == ref.output) || !(got.score_codes == ref.score_codes)) ++pipeline_mismatch;
  }

  Json doc = {{"command", "attn"},
              {"config",
               {{"seed", ctx.seed}, {"bits", o.bits}, {"tokens", o.tokens}, {"d_k", o.dk}, {"query", to_json(acfg.query)},
                {"score", to_json(acfg.score)}}},
              {"kernel", {{"instances", o.instances}, {"mismatches", kernel_mismatch}}},
              {"pipeline", {{"instances", pipelines}, {"mismatches", pipeline_mismatch}}},
              {"passed", kernel_mismatch == 0 && pipeline_mismatch == 0}};
  if (kernel_mismatch != 0 || pipeline_mismatch != 0) throw VerificationFailed{doc.dump(2) + "\n"};
  ctx.emit(doc);
}

// ---------------------------------------------------------------- energy

struct EnergyOptions {
  std::string mode = "all";
  std::string shape;
  std::string params;
  std::string rates;
  std::string out = "json";
};

EnergyParams load_params(const std::string& path) {
  return path.empty() ? EnergyParams{} : energy_params_from_json(load_json_file(path), path);
}

void cmd_energy(const EnergyOptions& o, const Context& ctx) {
  const BlockDescriptor desc = o.shape.empty() ? BlockDescriptor::bert_base() : block_from_json(load_json_file(o.shape), o.shape);
  const EnergyParams params = load_params(o.params);
  std::optional<RateMap> rates;
  if (!o.rates.empty()) rates = rates_from_json(load_json_file(o.rates), desc, o.rates);

  std::vector<EnergyMode> modes;
  if (o.mode == "all") {
    modes = {EnergyMode::baseline, EnergyMode::mttfs, EnergyMode::deadzone, EnergyMode::msu};
  } else {
    modes = {parse_energy_mode(o.mode)};
  }

  Json results = Json::array();
  std::string rows;
  for (const EnergyMode m : modes) {
    const RateMap r = rates ? *rates : uniform_rates(desc, default_rate(m));
    const EnergyReport rep = block_energy(desc, r, m, params);
    Json rate_json = Json::object();
    for (const auto& [name, v] : r) rate_json[name] = v;
    Json entry = {{"mode", to_string(m)}, {"rates", rate_json}, {"report", to_json(rep)}};
    results.push_back(std::move(entry));
    const BlockTableRow t = block_table_row(rep);
    rows += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", to_string(m), t.spike_movement, t.weight_access,
                        t.leakage, t.digital, t.analog, t.total());
  }

  const AreaEstimate area = area_estimate(desc);
  Json config = {{"shape", to_json(desc)}, {"assumptions", assumptions_json(params)}};
  if (rates) {
    Json rj = Json::object();
    for (const auto& [name, v] : *rates) rj[name] = v;
    config["rates"] = rj;
  } else {
    config["rates"] = "uniform per mode default";
  }

  if (o.out == "csv") {
    ctx.emit(csv_header(config) + "mode,spike_movement_mJ,weight_access_mJ,leakage_mJ,digital_mJ,analog_mJ,total_mJ\n" + rows);
    return;
  }
  ctx.emit(Json{{"command", "energy"},
                {"config", config},
                {"results", results},
                {"area",
                 {{"macros_per_block", area.macros_per_block},
                  {"block_mm2", area.block_mm2},
                  {"model_mm2", area.model_mm2},
                  {"array_mm2", area.array_mm2}}}});
}

// ------------------------------------------------------------ stats/sweep

struct SamplerOptions {
  std::string dist = "gaussian";
  std::optional<double> mean;
  double sigma = 1.0;
  double loc = 0.0;
  double scale = 1.0;
  std::string file;
  std::size_t n = 10000;
  int bits = 4;
  int k = 0;
  std::string mode = "sym";
  std::optional<int> imax;
  double alpha = 1.0;
};

Distribution make_distribution(const SamplerOptions& o, const SnnLayerConfig& cfg, Json& echo) {
  if (o.dist == "gaussian") {
    const Gaussian g{o.mean.value_or(dead_zone_centre(cfg)), o.sigma};
    echo = {{"kind", "gaussian"}, {"mean", g.mean}, {"sigma", g.sigma}};
    return g;
  }
  if (o.dist == "laplace") {
    echo = {{"kind", "laplace"}, {"loc", o.loc}, {"scale", o.scale}};
    return Laplace{o.loc, o.scale};
  }
  if (o.dist == "file") {
    if (o.file.empty()) throw UsageError("--dist file needs --samples-file PATH");
    echo = {{"kind", "file"}, {"path", o.file}};
    return load_samples(o.file);
  }
  throw UsageError("unknown distribution '" + o.dist + "' (gaussian, laplace, file)");
}

struct StatsOptions : SamplerOptions {
  std::string svg;
};

void cmd_stats(const StatsOptions& o, const Context& ctx) {
  const SnnLayerConfig cfg = layer_config(o.bits, o.alpha, o.imax, o.k, o.mode);
  Json dist_echo;
  const ActivationSampler sampler(make_distribution(o, cfg, dist_echo), ctx.seed);
  const std::vector<double> samples = sampler.sample(o.n);
  std::vector<SpikeTrain> trains;
  trains.reserve(samples.size());
  for (const double a : samples) trains.push_back(fire_analytic(a, cfg));
  const SpikeHistogram h = spike_time_histogram(trains, cfg.window);
  if (!o.svg.empty()) {
    std::ofstream f(o.svg, std::ios::binary);
    if (!f) throw ConfigError(o.svg + ": cannot open for writing");
    f << h.svg();
  }
  const Json config = {{"seed", ctx.seed}, {"n", o.n}, {"distribution", dist_echo}, {"snn", to_json(cfg)}};
  ctx.emit(csv_header(config) + fmt::format("# silence={:.6f}\n", h.silence_fraction()) + h.csv());
}

struct SweepOptions : SamplerOptions {
  int kmax = 3;
  std::optional<double> calibrate;
};

void cmd_sweep(const SweepOptions& o, const Context& ctx) {
  if (o.kmax < 0) throw UsageError("--kmax must be nonnegative");
  SnnLayerConfig cfg = layer_config(o.bits, o.alpha, o.imax, 0, o.mode);
  SamplerOptions so = o;
  if (o.calibrate) {
    if (o.dist != "gaussian") throw UsageError("--calibrate applies to the gaussian sampler only");
    so.sigma = calibrate_gaussian_sigma(*o.calibrate, cfg);
    so.mean = dead_zone_centre(cfg);
  }
  Json dist_echo;
  const ActivationSampler sampler(make_distribution(so, cfg, dist_echo), ctx.seed);
  const std::vector<double> samples = sampler.sample(o.n);
  std::vector<int> ks(o.kmax + 1);
  for (int k = 0; k <= o.kmax; ++k) ks[k] = k;
  const auto rows = sparsity_sweep(samples, cfg, ks);
  Json config = {{"seed", ctx.seed}, {"n", o.n}, {"distribution", dist_echo}, {"snn", to_json(cfg)}};
  if (o.calibrate) config["calibration_target"] = *o.calibrate;
  ctx.emit(csv_header(config) + fmt::format("# baseline_silence={:.6f}\n", baseline_silence(samples, cfg)) +
           sparsity_csv(rows));
}

// -------------------------------------------------------------- scenario

struct ScenarioOptions {
  std::string params;
  std::string out = "csv";
};

void cmd_scenario(const ScenarioOptions& o, const Context& ctx) {
  const EnergyParams params = load_params(o.params);
  const auto rows = scenario_compare(literature_scenarios(), params);
  const Json config = {{"shape", to_json(BlockDescriptor::bert_base())}, {"assumptions", assumptions_json(params)}};
  if (o.out == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back(Json{{"name", r.scenario.name},
                         {"T", r.scenario.window},
                         {"spike_ratio", r.scenario.spike_ratio},
                         {"compute_pct", r.compute_pct},
                         {"movement_pct", r.movement_pct},
                         {"weight_pct", r.weight_pct},
                         {"other_pct", r.other_pct},
                         {"total_mJ", r.report.total() * kJoulesToMilliJoules}});
    }
    ctx.emit(Json{{"command", "scenario"}, {"config", config}, {"scenarios", arr}});
    return;
  }
  std::string text = csv_header(config) + "name,T,spike_ratio,compute_pct,movement_pct,weight_pct,other_pct,total_mJ\n";
  for (const auto& r : rows) {
    text += fmt::format("{},{},{:.4f},{:.3f},{:.3f},{:.3f},{:.3f},{:.6f}\n", r.scenario.name, r.scenario.window,
                        r.scenario.spike_ratio, r.compute_pct, r.movement_pct, r.weight_pct, r.other_pct,
                        r.report.total() * kJoulesToMilliJoules);
  }
  ctx.emit(text);
}

void add_sampler_options(CLI::App* sub, SamplerOptions& o) {
  sub->add_option("--dist", o.dist, "gaussian, laplace or file")->capture_default_str();
  sub->add_option("--mean", o.mean, "gaussian mean (default: centre of the dead zone)");
  sub->add_option("--sigma", o.sigma, "gaussian sigma")->capture_default_str();
  sub->add_option("--loc", o.loc, "laplace location")->capture_default_str();
  sub->add_option("--scale", o.scale, "laplace scale")->capture_default_str();
  sub->add_option("--samples-file", o.file, "one value per line");
  sub->add_option("--n", o.n, "number of samples")->capture_default_str();
  sub->add_option("--bits", o.bits, "code width n")->capture_default_str();
  sub->add_option("--k", o.k, "dead-zone radius")->capture_default_str();
  sub->add_option("--mode", o.mode, "sym or asym")->capture_default_str();
  sub->add_option("--imax", o.imax, "dead-zone centre time (default: time of code 0)");
  sub->add_option("--alpha", o.alpha, "quantizer scale")->capture_default_str();
}

void print_error(std::ostream& err, const char* kind, const std::string& message) {
  err << Json{{"error", {{"type", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spiking transformer conversion, crossbar and energy toolkit", "matterhorn"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::uint64_t seed = 1;
  std::string output;
  app.add_option("--seed", seed, "64-bit seed (MATTERHORN_SEED overrides)")->capture_default_str();
  app.add_option("--output,-o", output, "write the result to a file instead of stdout");

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "check SNN/QNN layer equivalence");
  verify->add_option("--bits", vo.bits, "code width n")->capture_default_str();
  verify->add_option("--k", vo.k, "dead-zone radius")->capture_default_str();
  verify->add_option("--mode", vo.mode, "sym or asym")->capture_default_str();
  verify->add_option("--imax", vo.imax, "dead-zone centre time (default: time of code 0)");
  verify->add_option("--weights", vo.weights, "layer JSON file or random[:SEED]")->capture_default_str();
  verify->add_option("--inputs", vo.inputs, "inputs of a random layer")->capture_default_str();
  verify->add_option("--outputs", vo.outputs, "outputs of a random layer")->capture_default_str();
  verify->add_option("--fault-threshold-offset", vo.fault_offset, "add this offset to every threshold (fault injection)");
  auto* ex = verify->add_flag("--exhaustive", vo.exhaustive, "enumerate every input code vector (default)");
  verify->add_option("--samples", vo.samples, "sample N real pre-activations instead")->excludes(ex);

  EncodeOptions eo;
  auto* encode = app.add_subcommand("encode", "encode one value or code as a spike train");
  encode->add_option("--bits", eo.bits, "code width n")->capture_default_str();
  encode->add_option("--k", eo.k, "dead-zone radius")->capture_default_str();
  encode->add_option("--mode", eo.mode, "sym or asym")->capture_default_str();
  encode->add_option("--imax", eo.imax, "dead-zone centre time");
  encode->add_option("--alpha", eo.alpha, "quantizer scale")->capture_default_str();
  auto* value_opt = encode->add_option("--value", eo.value, "real pre-activation");
  auto* code_opt = encode->add_option("--code", eo.code, "integer code");
  value_opt->excludes(code_opt);
  encode->require_option(1, 0);

  XbarOptions xo;
  auto* xbar = app.add_subcommand("xbar", "crossbar readout replay and bit-serial fuzzing");
  xbar->add_option("--replay", xo.replay, "replay the stored readout example (example)");
  xbar->add_option("--config", xo.config, "macro JSON");
  xbar->add_option("--fuzz", xo.fuzz, "random tiled VMM instances");
  xbar->add_option("--rows", xo.rows, "weight rows for fuzzing")->capture_default_str();
  xbar->add_option("--cols", xo.cols, "weight columns for fuzzing")->capture_default_str();

  AttnOptions ao;
  auto* attn = app.add_subcommand("attn", "time-based accumulation fuzz suite");
  attn->add_option("--instances", ao.instances, "kernel instances")->capture_default_str();
  attn->add_option("--bits", ao.bits, "code width n")->capture_default_str();
  attn->add_option("--tokens", ao.tokens, "tokens per pipeline instance")->capture_default_str();
  attn->add_option("--dk", ao.dk, "head dimension")->capture_default_str();

  EnergyOptions no;
  auto* energy = app.add_subcommand("energy", "per-block energy breakdown");
  energy->add_option("--mode", no.mode, "baseline, mttfs, deadzone, msu or all")->capture_default_str();
  energy->add_option("--shape", no.shape, "block shape JSON");
  energy->add_option("--params", no.params, "unit energy overrides JSON");
  energy->add_option("--rates", no.rates, "per-component spike ratio JSON");
  energy->add_option("--out", no.out, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  StatsOptions so;
  auto* stats = app.add_subcommand("stats", "spike-time histogram of sampled activations");
  add_sampler_options(stats, so);
  stats->add_option("--svg", so.svg, "also write an SVG bar chart");

  SweepOptions wo;
  auto* sweep = app.add_subcommand("sweep", "silence versus dead-zone radius");
  add_sampler_options(sweep, wo);
  sweep->add_option("--kmax", wo.kmax, "largest radius")->capture_default_str();
  sweep->add_option("--calibrate", wo.calibrate, "fit the gaussian sigma to this k=0 silence");

  ScenarioOptions co;
  auto* scenario = app.add_subcommand("scenario", "energy shares of literature operating points");
  scenario->add_option("--params", co.params, "unit energy overrides JSON");
  scenario->add_option("--out", co.out, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  if (args.empty()) {
    err << app.help();
    return kExitUsage;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    err << app.help();
    return kExitUsage;
  }

  if (const char* env = std::getenv("MATTERHORN_SEED")) {
    try {
      std::size_t used = 0;
      seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      print_error(err, "config", std::string("MATTERHORN_SEED is not an unsigned integer: ") + env);
      return kExitConfig;
    }
  }
  const Context ctx{out, err, seed, output};

  try {
    if (verify->parsed()) cmd_verify(vo, ctx);
    if (encode->parsed()) cmd_encode(eo, ctx);
    if (xbar->parsed()) cmd_xbar(xo, ctx);
    if (attn->parsed()) cmd_attn(ao, ctx);
    if (energy->parsed()) cmd_energy(no, ctx);
    if (stats->parsed()) cmd_stats(so, ctx);
    if (sweep->parsed()) cmd_sweep(wo, ctx);
    if (scenario->parsed()) cmd_scenario(co, ctx);
  } catch (const VerificationFailed& v) {
    ctx.emit(v.text);
    print_error(err, "verification_failed", "mismatches found");
    return kExitVerifyFailed;
  } catch (const UsageError& e) {
    print_error(err, "usage", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    print_error(err, "config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    print_error(err, "config", e.what());
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace matterhorn
