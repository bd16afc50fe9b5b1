#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "matterhorn/crossbar.hpp"
#include "matterhorn/errors.hpp"

using namespace matterhorn;

namespace {

SignMatrix random_signs(int rows, int cols, std::mt19937_64& rng) {
  SignMatrix w(rows, cols);
  for (auto& v : w.v) v = (rng() & 1) ? 1 : -1;
  return w;
}

// Direct product with a hand loop over the unsigned cell matrix.
std::vector<long long> unsigned_product(const std::vector<int>& a, const SignMatrix& w) {
  std::vector<long long> out(w.cols, 0);
  for (int r = 0; r < w.rows; ++r) {
    for (int c = 0; c < w.cols; ++c) out[c] += w(r, c) == 1 ? a[r] : 0;
  }
  return out;
}

}  // namespace

TEST(Macro, DefaultsAndReadGroup) {
  const MacroParams p;
  EXPECT_DOUBLE_EQ(p.lsb(), 10e-6);
  EXPECT_EQ(p.read_group(), 49);
  EXPECT_TRUE(adc_linear_margin(p, 49));
  EXPECT_FALSE(adc_linear_margin(p, 50));
  EXPECT_FALSE(adc_linear_margin(p, 256));  // a full-height read leaks 2.56 LSB
  MacroParams fixed;
  fixed.rows_per_read = 8;
  EXPECT_EQ(fixed.read_group(), 8);
  MacroParams bad;
  bad.g_off = bad.g_on;
  EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(Mapping, RoundTripAndRejection) {
  std::mt19937_64 rng(1);
  const MacroParams p;
  const SignMatrix w = random_signs(17, 9, rng);
  const ConductanceGrid g = map_signed_weights(w, p);
  for (int r = 0; r < w.rows; ++r) {
    for (int c = 0; c < w.cols; ++c) EXPECT_EQ(g(r, c), w(r, c) == 1 ? p.g_on : p.g_off);
  }
  EXPECT_EQ(recover_signed_weights(g, p), w);
  const std::vector<double> bad = {1.0, 0.0};
  EXPECT_THROW(SignMatrix::from_values(1, 2, bad), ValueError);
  ConductanceGrid odd = g;
  odd.g[0] = 50e-6;
  EXPECT_THROW(recover_signed_weights(odd, p), ValueError);
  EXPECT_THROW(CrossbarMacro(p, odd), ValueError);
}

TEST(Readout, SmallExampleCurrentsAndCodes) {
  const ReadoutExample ex = small_readout_example();
  const CrossbarMacro m(ex.params, map_signed_weights(ex.weights, ex.params));
  const ColumnReadout r = analog_column_readout(ex.active, m);
  const double want_uA[] = {10.1, 0.2, 10.1, 20.0};
  const int want_code[] = {1, 0, 1, 2};
  ASSERT_EQ(r.currents.size(), 4U);
  for (int c = 0; c < 4; ++c) {
    EXPECT_NEAR(r.currents[c] * 1e6, want_uA[c], 1e-9);
    EXPECT_EQ(r.codes[c], want_code[c]);
  }
}

TEST(Readout, CodeCountsActiveOnCellsWithinGroup) {
  std::mt19937_64 rng(2);
  const MacroParams p;
  const SignMatrix w = random_signs(49, 40, rng);
  MacroParams sized = p;
  const CrossbarMacro m(sized, map_signed_weights(w, p));
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> active(49);
    for (auto& a : active) a = rng() & 1;
    const auto r = m.read(active);
    for (int c = 0; c < w.cols; ++c) {
      int on = 0;
      for (int row = 0; row < 49; ++row) on += active[row] && w(row, c) == 1;
      ASSERT_EQ(r.codes[c], on);
    }
  }
  EXPECT_THROW(m.read(std::vector<std::uint8_t>(48, 0)), ShapeError);
}

TEST(Readout, FullHeightReadLosesLinearity) {
  // All 256 rows active over off cells drifts past half an LSB.
  const MacroParams p;
  const SignMatrix w(256, 1, -1);
  const CrossbarMacro m(p, map_signed_weights(w, p));
  const auto r = m.read(std::vector<std::uint8_t>(256, 1));
  EXPECT_NE(r.codes[0], 0);
}

TEST(Readout, CodesSaturateAtRowCount) {
  MacroParams p;
  p.rows = 4;
  p.cols = 1;
  p.adc_lsb = 1e-6;  // tiny LSB forces saturation
  const SignMatrix w(4, 1, 1);
  const CrossbarMacro m(p, map_signed_weights(w, p));
  EXPECT_EQ(m.read(std::vector<std::uint8_t>(4, 1)).codes[0], 4);
}

TEST(BitSerial, MatchesUnsignedProduct) {
  std::mt19937_64 rng(3);
  const MacroParams p;
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 256);
    const int cols = 1 + static_cast<int>(rng() % 64);
    const int bits = 1 + static_cast<int>(rng() % 6);
    const SignMatrix w = random_signs(rows, cols, rng);
    std::vector<int> a(rows);
    for (auto& v : a) v = static_cast<int>(rng() % (1U << bits));
    const CrossbarMacro m(p, map_signed_weights(w, p));
    ASSERT_EQ(bit_serial_vmm(a, m, bits), unsigned_product(a, w));
  }
}

TEST(BitSerial, RejectsOutOfRangeInputs) {
  const MacroParams p;
  const SignMatrix w(2, 2, 1);
  const CrossbarMacro m(p, map_signed_weights(w, p));
  EXPECT_THROW(bit_serial_vmm(std::vector<int>{16, 0}, m, 4), RangeError);
  EXPECT_THROW(bit_serial_vmm(std::vector<int>{-1, 0}, m, 4), RangeError);
  EXPECT_THROW(bit_serial_vmm(std::vector<int>{1}, m, 4), ShapeError);
}

TEST(SignedCorrection, Identity) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 30);
    const SignMatrix w = random_signs(rows, 5, rng);
    std::vector<int> a(rows);
    for (auto& v : a) v = static_cast<int>(rng() % 16);
    const long long sum = std::accumulate(a.begin(), a.end(), 0LL);
    EXPECT_EQ(signed_correct_integer(unsigned_product(a, w), sum), signed_vmm_reference(a, w));
  }
  MsuConfig cfg;
  cfg.gamma = 0.5;
  const std::vector<long long> r = {3, 0};
  const auto v = signed_correct(r, 4, cfg);
  EXPECT_DOUBLE_EQ(v[0], 1.0);
  EXPECT_DOUBLE_EQ(v[1], -2.0);
}

TEST(Tiled, CountsAndFuzz) {
  const MacroParams p;
  EXPECT_EQ(tile_count(768, 768, p), 9);
  EXPECT_EQ(tile_count(768, 3072, p), 36);
  EXPECT_EQ(tile_count(3072, 768, p), 36);
  EXPECT_EQ(tile_count(1, 1, p), 1);
  EXPECT_EQ(tile_count(257, 256, p), 2);

  std::mt19937_64 rng(5);
  MsuConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 600);
    const int cols = 1 + static_cast<int>(rng() % 300);
    const SignMatrix w = random_signs(rows, cols, rng);
    std::vector<int> a(rows);
    for (auto& v : a) v = static_cast<int>(rng() % 16);
    const auto got = tiled_vmm(a, w, cfg);
    ASSERT_EQ(got.integer, signed_vmm_reference(a, w));
    ASSERT_EQ(got.tiles, tile_count(rows, cols, p));
  }
}

TEST(Tiled, OrderIndependenceAndGamma) {
  std::mt19937_64 rng(6);
  MsuConfig cfg;
  cfg.gamma = 0.125;
  const SignMatrix w = random_signs(600, 520, rng);
  std::vector<int> a(600);
  for (auto& v : a) v = static_cast<int>(rng() % 16);
  const auto forward = tiled_vmm(a, w, cfg);
  ASSERT_EQ(forward.tiles, 9);
  const std::vector<int> reversed = {8, 7, 6, 5, 4, 3, 2, 1, 0};
  const auto backward = tiled_vmm(a, w, cfg, reversed);
  EXPECT_EQ(forward.integer, backward.integer);
  for (std::size_t c = 0; c < forward.values.size(); ++c) {
    EXPECT_DOUBLE_EQ(forward.values[c], 0.125 * static_cast<double>(forward.integer[c]));
  }
  const std::vector<int> not_perm = {0, 0, 1, 2, 3, 4, 5, 6, 7};
  EXPECT_THROW(tiled_vmm(a, w, cfg, not_perm), UsageError);
}
