#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "matterhorn/spike.hpp"

namespace matterhorn {

struct SpikeHistogram {
  int window = 0;
  std::vector<std::uint64_t> counts;  // one bucket per time step
  std::uint64_t silent = 0;
  std::uint64_t total = 0;

  [[nodiscard]] double silence_fraction() const;
  /// Sum of the time buckets and the silent bucket equals total.
  [[nodiscard]] bool conserved() const;
  /// Commutative; throws ShapeError on a window mismatch.
  void merge(const SpikeHistogram& other);
  /// "t,count" rows followed by a "silent,<n>" row.
  [[nodiscard]] std::string csv() const;
  /// Bar chart with one bar per time step and a separate silent bar.
  [[nodiscard]] std::string svg() const;

  friend bool operator==(const SpikeHistogram&, const SpikeHistogram&) = default;
};

/// Throws ShapeError when a train's window differs from window.
SpikeHistogram spike_time_histogram(std::span<const SpikeTrain> trains, int window);

struct Gaussian {
  double mean = 0.0;
  double sigma = 1.0;  // 0 gives a point mass
};
struct Laplace {
  double loc = 0.0;
  double scale = 1.0;
};
/// Replays the stored values cyclically from an offset chosen by the seed.
struct FileSamples {
  std::vector<double> values;
};
using Distribution = std::variant<Gaussian, Laplace, FileSamples>;

class ActivationSampler {
 public:
  ActivationSampler(Distribution dist, std::uint64_t seed);

  /// n draws of shard `stream`. Same (dist, seed, stream, n) gives the same values.
  [[nodiscard]] std::vector<double> sample(std::size_t n, std::uint64_t stream = 0) const;
  [[nodiscard]] const Distribution& distribution() const { return dist_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }

 private:
  Distribution dist_;
  std::uint64_t seed_;
};

/// Reads one finite value per line (blank lines and '#' comments skipped).
FileSamples load_samples(const std::string& path);

struct SparsityRow {
  int k = 0;
  double silence = 0.0;
  double mean_spike_rate = 0.0;  // spikes per (neuron, time step)
};

/// Fires every sample analytically under cfg with the dead-zone radius
/// replaced by each k in k_range. Throws UsageError if k_range is empty.
std::vector<SparsityRow> sparsity_sweep(std::span<const double> samples, const SnnLayerConfig& cfg,
                                        std::span<const int> k_range);

/// Silence of the same samples under the unmasked encoding whose silent
/// state carries the minimum code.
double baseline_silence(std::span<const double> samples, const SnnLayerConfig& cfg);

/// Probability that a N(mean, sigma) pre-activation lands in the dead zone of cfg.
double gaussian_silence(double mean, double sigma, const SnnLayerConfig& cfg);

/// Sigma of a Gaussian centred on the mu bucket whose silence under cfg
/// equals target. Throws ParameterError unless 0 < target < 1.
double calibrate_gaussian_sigma(double target, const SnnLayerConfig& cfg);

/// Centre of the mu bucket, (mu + 1/2) * alpha.
double dead_zone_centre(const SnnLayerConfig& cfg);

std::string sparsity_csv(std::span<const SparsityRow> rows);

}  // namespace matterhorn
