#include "matterhorn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "matterhorn/errors.hpp"

namespace matterhorn {
namespace {

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double normal_cdf(double x, double mean, double sigma) {
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  return 0.5 * (1.0 + std::erf((x - mean) / (sigma * std::sqrt(2.0))));
}

}  // namespace

double SpikeHistogram::silence_fraction() const {
  return total == 0 ? 0.0 : static_cast<double>(silent) / static_cast<double>(total);
}

bool SpikeHistogram::conserved() const {
  std::uint64_t sum = silent;
  for (const auto c : counts) sum += c;
  return sum == total;
}

void SpikeHistogram::merge(const SpikeHistogram& other) {
  if (other.window != window) throw ShapeError("cannot merge histograms with different windows");
  for (std::size_t t = 0; t < counts.size(); ++t) counts[t] += other.counts[t];
  silent += other.silent;
  total += other.total;
}

std::string SpikeHistogram::csv() const {
  std::string out = "t,count\n";
  for (std::size_t t = 0; t < counts.size(); ++t) out += fmt::format("{},{}\n", t, counts[t]);
  out += fmt::format("silent,{}\n", silent);
  return out;
}

std::string SpikeHistogram::svg() const {
  constexpr int bar = 24;
  constexpr int gap = 4;
  constexpr int height = 200;
  constexpr int label = 20;
  const std::size_t bars = counts.size() + 1;
  const int width = static_cast<int>(bars) * (bar + gap) + gap;
  std::uint64_t peak = silent;
  for (const auto c : counts) peak = std::max(peak, c);

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", width,
      height + label, width, height + label);
  auto emit = [&](std::size_t i, std::uint64_t value, const std::string& name, const char* colour) {
    const int h = peak == 0 ? 0 : static_cast<int>(std::lround(static_cast<double>(value) * height / peak));
    const int x = gap + static_cast<int>(i) * (bar + gap);
    out += fmt::format("  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"><title>{}: {}</title></rect>\n",
                       x, height - h, bar, h, colour, name, value);
    out += fmt::format("  <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n", x + bar / 2,
                       height + 14, name);
  };
  for (std::size_t t = 0; t < counts.size(); ++t) emit(t, counts[t], std::to_string(t), "#4878a8");
  emit(counts.size(), silent, "S", "#a0a0a0");
  out += "</svg>\n";
  return out;
}

SpikeHistogram spike_time_histogram(std::span<const SpikeTrain> trains, int window) {
  if (window < 1) throw ParameterError("window must be positive");
  SpikeHistogram h;
  h.window = window;
  h.counts.assign(window, 0);
  for (const auto& s : trains) {
    if (s.window() != window) throw ShapeError("train window differs from the histogram window");
    if (const auto t = s.spike_time()) {
      ++h.counts[*t];
    } else {
      ++h.silent;
    }
    ++h.total;
  }
  return h;
}

ActivationSampler::ActivationSampler(Distribution dist, std::uint64_t seed) : dist_(std::move(dist)), seed_(seed) {
  if (const auto* g = std::get_if<Gaussian>(&dist_)) {
    if (!(g->sigma >= 0.0) || !std::isfinite(g->mean)) throw ParameterError("gaussian needs finite mean and sigma >= 0");
  } else if (const auto* l = std::get_if<Laplace>(&dist_)) {
    if (!(l->scale > 0.0) || !std::isfinite(l->loc)) throw ParameterError("laplace needs finite loc and scale > 0");
  } else if (std::get<FileSamples>(dist_).values.empty()) {
    throw ParameterError("sample file holds no values");
  }
}

std::vector<double> ActivationSampler::sample(std::size_t n, std::uint64_t stream) const {
  std::mt19937_64 rng = stream_engine(seed_, stream);
  std::vector<double> out(n);
  if (const auto* g = std::get_if<Gaussian>(&dist_)) {
    if (g->sigma == 0.0) {
      std::fill(out.begin(), out.end(), g->mean);
      return out;
    }
    std::normal_distribution<double> d(g->mean, g->sigma);
    for (auto& v : out) v = d(rng);
  } else if (const auto* l = std::get_if<Laplace>(&dist_)) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& v : out) {
      const double x = u(rng);
      v = l->loc - l->scale * std::copysign(1.0, x) * std::log1p(-2.0 * std::abs(x));
    }
  } else {
    const auto& values = std::get<FileSamples>(dist_).values;
    std::size_t pos = static_cast<std::size_t>(rng() % values.size());
    for (auto& v : out) {
      v = values[pos];
      pos = (pos + 1) % values.size();
    }
  }
  return out;
}

FileSamples load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sample file " + path);
  FileSamples fs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double v = 0.0;
    if (!(ss >> v)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ConfigError(fmt::format("{}:{}: not a number", path, lineno));
    }
    if (!std::isfinite(v)) throw ConfigError(fmt::format("{}:{}: value is not finite", path, lineno));
    fs.values.push_back(v);
  }
  if (fs.values.empty()) throw ConfigError("sample file " + path + " holds no values");
  return fs;
}

std::vector<SparsityRow> sparsity_sweep(std::span<const double> samples, const SnnLayerConfig& cfg,
                                        std::span<const int> k_range) {
  if (k_range.empty()) throw UsageError("k range is empty");
  std::vector<SparsityRow> rows;
  rows.reserve(k_range.size());
  for (const int k : k_range) {
    SnnLayerConfig c = cfg;
    c.k = k;
    c.validate();
    std::size_t silent = 0;
    for (const double a : samples) silent += fire_analytic(a, c).is_silent() ? 1 : 0;
    SparsityRow row;
    row.k = k;
    row.silence = samples.empty() ? 0.0 : static_cast<double>(silent) / static_cast<double>(samples.size());
    row.mean_spike_rate = (1.0 - row.silence) / static_cast<double>(c.window);
    rows.push_back(row);
  }
  return rows;
}

double baseline_silence(std::span<const double> samples, const SnnLayerConfig& cfg) {
  if (samples.empty()) return 0.0;
  SnnLayerConfig c = cfg;
  c.masked = false;
  c.baseline_silent_min = true;
  std::size_t silent = 0;
  for (const double a : samples) silent += fire_analytic(a, c).is_silent() ? 1 : 0;
  return static_cast<double>(silent) / static_cast<double>(samples.size());
}

double gaussian_silence(double mean, double sigma, const SnnLayerConfig& cfg) {
  const CodeRange r = cfg.codes();
  const int c1 = std::max(r.lo, cfg.mu - cfg.k);
  const int c2 = std::min(r.hi, cfg.mu + cfg.k);
  if (c1 > c2) return 0.0;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Code c collects [c * alpha, (c + 1) * alpha); the end codes also collect the clipped tails.
  const double lo = c1 == r.lo ? -inf : c1 * cfg.alpha;
  const double hi = c2 == r.hi ? inf : (c2 + 1) * cfg.alpha;
  if (sigma == 0.0) return (mean >= lo && mean < hi) ? 1.0 : 0.0;
  return normal_cdf(hi, mean, sigma) - normal_cdf(lo, mean, sigma);
}

double dead_zone_centre(const SnnLayerConfig& cfg) { return (cfg.mu + 0.5) * cfg.alpha; }

double calibrate_gaussian_sigma(double target, const SnnLayerConfig& cfg) {
  if (!(target > 0.0 && target < 1.0)) throw ParameterError("target silence must lie in (0, 1)");
  const double mean = dead_zone_centre(cfg);
  // Silence falls monotonically as sigma grows.
  double lo = 1e-9 * cfg.alpha;
  double hi = cfg.alpha;
  while (gaussian_silence(mean, hi, cfg) > target) {
    hi *= 2.0;
    if (hi > 1e12 * cfg.alpha) throw ParameterError("target silence is unreachable for this configuration");
  }
  if (gaussian_silence(mean, lo, cfg) < target) throw ParameterError("target silence is unreachable for this configuration");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gaussian_silence(mean, mid, cfg) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string sparsity_csv(std::span<const SparsityRow> rows) {
  std::string out = "k,silence,mean_spike_rate\n";
  for (const auto& r : rows) out += fmt::format("{},{:.6f},{:.6f}\n", r.k, r.silence, r.mean_spike_rate);
  return out;
}

}  // namespace matterhorn
