#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "matterhorn/errors.hpp"
#include "matterhorn/qnn.hpp"
#include "oracles.hpp"

using namespace matterhorn;

TEST(Quantize, Examples) {
  EXPECT_EQ(quantize(3.7, {4, 1.0, QuantMode::symmetric}), 3);
  EXPECT_EQ(quantize(100.0, {4, 1.0, QuantMode::symmetric}), 7);
  EXPECT_EQ(quantize(-0.5, {4, 1.0, QuantMode::asymmetric}), 0);
  EXPECT_EQ(quantize(-0.5, {4, 1.0, QuantMode::symmetric}), -1);  // floor toward -inf
  EXPECT_EQ(quantize(-100.0, {4, 1.0, QuantMode::symmetric}), -8);
  EXPECT_THROW(quantize(1.0, {4, 0.0, QuantMode::symmetric}), ParameterError);
  EXPECT_THROW(quantize(1.0, {4, -1.0, QuantMode::symmetric}), ParameterError);
}

TEST(Quantize, MatchesScanOracle) {
  std::mt19937_64 rng(1);
  for (const double alpha : {1.0, 0.1, 0.3, 0.7, 2.5}) {
    for (int bits = 1; bits <= 6; ++bits) {
      for (const auto mode : {QuantMode::symmetric, QuantMode::asymmetric}) {
        const QuantParams p{bits, alpha, mode};
        std::uniform_real_distribution<double> d(-alpha * (2 << bits), alpha * (2 << bits));
        for (int s = 0; s < 2000; ++s) {
          const double a = (s % 3 == 0) ? alpha * static_cast<double>(static_cast<int>(rng() % 64) - 32) : d(rng);
          ASSERT_EQ(quantize(a, p), oracle::quantize(a, alpha, bits, mode)) << a << " " << alpha;
        }
      }
    }
  }
}

TEST(Quantize, RangeSafetyFuzz) {
  std::mt19937_64 rng(2);
  for (const auto mode : {QuantMode::symmetric, QuantMode::asymmetric}) {
    for (const double alpha : {1e-3, 0.5, 3.0}) {
      const QuantParams p{4, alpha, mode};
      const CodeRange r = p.codes();
      std::uniform_real_distribution<double> d(-1e6 * alpha, 1e6 * alpha);
      for (int s = 0; s < 20000; ++s) {
        const int q = quantize(d(rng), p);
        ASSERT_GE(q, r.lo);
        ASSERT_LE(q, r.hi);
      }
    }
  }
}

TEST(DeadZoneFilter, ExamplesAndIdempotence) {
  EXPECT_EQ(dead_zone_filter(1, 0, 1), 0);
  EXPECT_EQ(dead_zone_filter(5, 0, 1), 5);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(dead_zone_filter(3, 3, k), 3);
  for (int mu = -4; mu <= 4; ++mu) {
    for (int k = 0; k <= 3; ++k) {
      for (int q = -10; q <= 10; ++q) {
        const int once = dead_zone_filter(q, mu, k);
        EXPECT_EQ(dead_zone_filter(once, mu, k), once);
        EXPECT_EQ(once, oracle::filter(q, mu, k));
      }
    }
  }
}

TEST(LayerForward, Examples) {
  QnnLayer id;
  id.inputs = id.outputs = 3;
  id.weights = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  id.bias = {0, 0, 0};
  const std::vector<int> x = {-3, 2, 7};
  EXPECT_EQ(layer_forward(x, id), x);

  QnnLayer one;
  one.inputs = one.outputs = 1;
  one.weights = {2.0};
  one.bias = {0.5};
  one.dead_zone = {0, 1};
  const std::vector<int> x1 = {3};
  EXPECT_EQ(layer_forward(x1, one), std::vector<int>{6});

  const std::vector<int> wrong = {1, 2};
  EXPECT_THROW(layer_forward(wrong, one), ShapeError);
}

TEST(LayerForward, MatchesDirectFormula) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    QnnLayer l;
    l.inputs = 1 + static_cast<int>(rng() % 6);
    l.outputs = 1 + static_cast<int>(rng() % 6);
    l.in_params = {3, 0.5, QuantMode::symmetric};
    l.out_params = {3, 0.5, QuantMode::symmetric};
    l.dead_zone = {static_cast<int>(rng() % 3) - 1, static_cast<int>(rng() % 3)};
    l.weights = oracle::random_signs(static_cast<std::size_t>(l.inputs) * l.outputs, rng);
    for (int j = 0; j < l.outputs; ++j) l.bias.push_back(0.25 * (static_cast<int>(rng() % 9) - 4));
    std::vector<int> x(l.inputs);
    for (auto& v : x) v = static_cast<int>(rng() % 8) - 4;
    const auto got = layer_forward(x, l);
    for (int j = 0; j < l.outputs; ++j) {
      double a = l.bias[j];
      for (int i = 0; i < l.inputs; ++i) a += l.weight(i, j) * 0.5 * x[i];
      EXPECT_EQ(got[j], oracle::filter(oracle::quantize(a, 0.5, 3, QuantMode::symmetric), l.dead_zone.mu, l.dead_zone.k));
    }
  }
}

TEST(Ste, Examples) {
  const QuantParams p{4, 1.0, QuantMode::symmetric};
  const std::vector<double> up = {2.0, 2.0, 2.0, 2.0};
  const std::vector<double> a = {3.5, 0.5, 20.0, -9.5};
  const auto g = ste_backward(up, a, p, {0, 0});
  EXPECT_EQ(g[0], 2.0);  // interior, outside zone
  EXPECT_EQ(g[1], 0.0);  // quantizes to mu
  EXPECT_EQ(g[2], 0.0);  // saturated high
  EXPECT_EQ(g[3], 0.0);  // saturated low
  EXPECT_THROW(ste_backward(up, std::vector<double>{1.0}, p, {0, 0}), ShapeError);
}

TEST(Ste, SupportSetEqualsUnsaturatedCodesOutsideZone) {
  for (const auto mode : {QuantMode::symmetric, QuantMode::asymmetric}) {
    for (int k = 0; k <= 2; ++k) {
      const double alpha = 0.5;
      const QuantParams p{3, alpha, mode};
      const int lo = oracle::lo_code(3, mode);
      const int hi = oracle::hi_code(3, mode);
      const int mu = mode == QuantMode::symmetric ? 0 : 2;
      std::vector<double> grid;
      for (double a = -8.0; a <= 8.0; a += 1.0 / 64) grid.push_back(a);
      const std::vector<double> ones(grid.size(), 1.0);
      const auto g = ste_backward(ones, grid, p, {mu, k});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid[i];
        // Identity region of the quantizer: lo * alpha <= a < (hi + 1) * alpha.
        const bool unsaturated = a >= lo * alpha && a < (hi + 1) * alpha;
        const int q = oracle::quantize(a, alpha, 3, mode);
        const bool outside = std::abs(q - mu) > k;
        ASSERT_EQ(g[i] != 0.0, unsaturated && outside) << a;
      }
    }
  }
}

// Two-layer regression: quantized hidden layer with dead zone, real output.
TEST(Ste, ToyTrainingReducesLoss) {
  constexpr int kIn = 4, kHidden = 8, kSamples = 64, kSteps = 100;
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n01(0.0, 1.0);
  const QuantParams hq{4, 0.25, QuantMode::symmetric};
  const DeadZone dz{0, 1};

  std::vector<std::vector<double>> x(kSamples, std::vector<double>(kIn));
  std::vector<double> y(kSamples);
  for (int s = 0; s < kSamples; ++s) {
    for (auto& v : x[s]) v = n01(rng);
    y[s] = std::sin(x[s][0]) + 0.5 * x[s][1] * x[s][2] - 0.3 * x[s][3];
  }
  std::vector<double> w1(kIn * kHidden), b1(kHidden, 0.1), w2(kHidden);
  for (auto& v : w1) v = 0.5 * n01(rng);
  for (auto& v : w2) v = 0.5 * n01(rng);
  double b2 = 0.0;

  std::vector<double> losses;
  const double lr = 0.05;
  for (int step = 0; step < kSteps; ++step) {
    std::vector<double> gw1(w1.size(), 0.0), gb1(kHidden, 0.0), gw2(kHidden, 0.0);
    double gb2 = 0.0, loss = 0.0;
    for (int s = 0; s < kSamples; ++s) {
      std::vector<double> a(kHidden);
      std::vector<double> h(kHidden);
      for (int j = 0; j < kHidden; ++j) {
        a[j] = b1[j];
        for (int i = 0; i < kIn; ++i) a[j] += w1[i * kHidden + j] * x[s][i];
        h[j] = hq.alpha * dead_zone_filter(quantize(a[j], hq), dz.mu, dz.k);
      }
      double out = b2;
      for (int j = 0; j < kHidden; ++j) out += w2[j] * h[j];
      const double err = out - y[s];
      loss += err * err / kSamples;
      const double dout = 2.0 * err / kSamples;
      gb2 += dout;
      std::vector<double> up(kHidden);
      for (int j = 0; j < kHidden; ++j) {
        gw2[j] += dout * h[j];
        up[j] = dout * w2[j];
      }
      const auto da = ste_backward(up, a, hq, dz);
      for (int j = 0; j < kHidden; ++j) {
        gb1[j] += da[j];
        for (int i = 0; i < kIn; ++i) gw1[i * kHidden + j] += da[j] * x[s][i];
      }
    }
    losses.push_back(loss);
    for (std::size_t i = 0; i < w1.size(); ++i) w1[i] -= lr * gw1[i];
    for (int j = 0; j < kHidden; ++j) {
      b1[j] -= lr * gb1[j];
      w2[j] -= lr * gw2[j];
    }
    b2 -= lr * gb2;
  }
  EXPECT_LT(losses.back(), losses.front());
  // Averages over the first and last ten steps.
  double head = 0, tail = 0;
  for (int i = 0; i < 10; ++i) {
    head += losses[i];
    tail += losses[kSteps - 1 - i];
  }
  EXPECT_LT(tail, 0.9 * head);
}
