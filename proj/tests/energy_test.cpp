#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "matterhorn/area.hpp"
#include "matterhorn/energy.hpp"
#include "matterhorn/errors.hpp"

using namespace matterhorn;

namespace {

constexpr double kPj = 1e-12;

WorkloadShape small_fc(double s) {
  WorkloadShape w;
  w.batch = 1;
  w.seq = 2;
  w.c_in = 3;
  w.c_out = 4;
  w.window = 4;
  w.spike_ratio = s;
  return w;
}

double sum_terms(const EnergyReport& r) {
  double t = 0;
  for (const auto& [k, v] : r.terms) t += v;
  return t;
}

}  // namespace

TEST(Params, DerivedDefaultsAndOverrides) {
  const EnergyParams q = EnergyParams{}.resolved();
  EXPECT_DOUBLE_EQ(q.e_read_th, 4 * 0.0985);
  EXPECT_DOUBLE_EQ(q.e_read_w, 0.0985);
  EXPECT_DOUBLE_EQ(q.e_map, 0.0848 + 0.0502);
  EXPECT_DOUBLE_EQ(q.e_decay, 0.0);
  EnergyParams p;
  p.set("e_decay", 0.01);
  p.set("read_bits", 8);
  EXPECT_DOUBLE_EQ(p.resolved().e_decay, 0.01);
  EXPECT_DOUBLE_EQ(p.resolved().e_read_kv, 8 * 0.0985);
  EXPECT_THROW(p.set("e_bogus", 1.0), ConfigError);
  EXPECT_THROW(p.set("read_bits", 2.5), ConfigError);
  EXPECT_THROW(p.set("e_cmp", -1.0), ConfigError);
  EnergyParams bad;
  bad.e_leak = -0.1;
  EXPECT_THROW(bad.validate(), ParameterError);
  EXPECT_EQ(p.assumptions().size(), 22U);
}

TEST(FcBaseline, HandComputedTerms) {
  const auto r = e_fc_baseline(small_fc(0.5), EnergyParams{});
  // Outputs 8, slots 8 * 3 * 4 = 96, active 48.
  EXPECT_NEAR(r.terms.at("spike.mac"), 48 * 0.0663 * kPj, 1e-24);
  EXPECT_NEAR(r.terms.at("spike.weight_read"), 48 * 0.0985 * kPj, 1e-24);
  EXPECT_NEAR(r.terms.at("spike.move"), 48 * 0.18 * kPj, 1e-24);
  EXPECT_NEAR(r.terms.at("leak"), 96 * 0.002 * kPj, 1e-24);
  EXPECT_NEAR(r.terms.at("threshold.cmp"), 32 * 0.0502 * kPj, 1e-24);
  EXPECT_NEAR(r.terms.at("threshold.read"), 32 * 4 * 0.0985 * kPj, 1e-24);
  EXPECT_EQ(r.terms.count("kv_write"), 0U);
  EXPECT_NEAR(r.total(), sum_terms(r), 1e-24);
  EXPECT_DOUBLE_EQ(r.threshold_read, r.terms.at("threshold.read"));

  WorkloadShape kv = small_fc(0.5);
  kv.writes_kv = true;
  EXPECT_NEAR(e_fc_baseline(kv, {}).kv_traffic, 8 * 4 * 0.0985 * kPj, 1e-24);
}

TEST(FcBaseline, ZeroRateLeavesOnlyStaticTerms) {
  const auto r = e_fc_baseline(small_fc(0.0), {});
  EXPECT_EQ(r.spike_movement, 0.0);
  EXPECT_EQ(r.weight_access, 0.0);
  EXPECT_EQ(r.digital_compute, 0.0);
  EXPECT_GT(r.leakage, 0.0);
  EXPECT_GT(r.thresholding, 0.0);
}

TEST(FcBaseline, AffineInSpikeRate) {
  const EnergyParams p;
  const double e0 = e_fc_baseline(small_fc(0.0), p).total();
  const double e1 = e_fc_baseline(small_fc(1.0), p).total();
  for (const double s : {0.1, 0.25, 0.6, 0.9}) {
    EXPECT_NEAR(e_fc_baseline(small_fc(s), p).total(), e0 + s * (e1 - e0), 1e-20);
  }
  EXPECT_THROW(e_fc_baseline(small_fc(1.5), p), ParameterError);
  EXPECT_THROW(e_fc_baseline(small_fc(-0.1), p), ParameterError);
}

TEST(FcBaseline, MonotoneInDimensions) {
  const EnergyParams p;
  const double base = e_fc_baseline(small_fc(0.2), p).total();
  for (int dim = 0; dim < 4; ++dim) {
    WorkloadShape w = small_fc(0.2);
    long long* fields[] = {&w.batch, &w.seq, &w.c_in, &w.c_out};
    *fields[dim] *= 2;
    EXPECT_GT(e_fc_baseline(w, p).total(), base);
  }
  WorkloadShape longer = small_fc(0.2);
  longer.window = 8;
  EXPECT_GT(e_fc_baseline(longer, p).total(), base);
}

TEST(Attention, BaselineAndTimeAccHandTerms) {
  WorkloadShape w;
  w.batch = 1;
  w.heads = 2;
  w.seq = 3;
  w.d_k = 4;
  w.window = 4;
  w.spike_ratio = 0.25;
  // Outputs 1 * 2 * 3 * 3 = 18, slots 18 * 4 * 4 = 288, active 72.
  const auto b = e_qkv_baseline(w, {});
  EXPECT_NEAR(b.terms.at("spike.encoding"), 72 * 0.0502 * kPj, 1e-24);
  EXPECT_NEAR(b.terms.at("spike.mac"), 72 * 0.0663 * kPj, 1e-24);
  EXPECT_NEAR(b.terms.at("spike.kv_read"), 72 * 4 * 0.0985 * kPj, 1e-24);
  EXPECT_NEAR(b.total(), sum_terms(b), 1e-24);
  const auto t = e_qkv_timeacc(w, {});
  EXPECT_NEAR(t.terms.at("spike.acc"), 72 * 0.0502 * kPj, 1e-24);
  EXPECT_NEAR(t.terms.at("scale.encoding"), 18 * 4 * 0.0502 * kPj, 1e-24);
  EXPECT_NEAR(t.terms.at("scale.mac"), 18 * 4 * 0.0848 * kPj, 1e-24);
  EXPECT_NEAR(t.total(), sum_terms(t), 1e-24);
}

TEST(Msu, HandTermsAndNoWeightAccess) {
  WorkloadShape w = small_fc(0.5);
  const auto r = e_fc_msu(w, {});
  EXPECT_EQ(r.weight_access, 0.0);
  // B*S = 2, bits = 2.
  EXPECT_NEAR(r.terms.at("msu.input_sum"), 2 * 4 * 3 * 0.0429 * kPj, 1e-24);
  EXPECT_NEAR(r.terms.at("msu.cim"), 2 * 4 * 2 * 3 * 2.164e-3 * kPj, 1e-24);
  EXPECT_NEAR(r.terms.at("msu.shift_add"), 2 * 4 * 2 * 0.0502 * kPj, 1e-24);
  EXPECT_NEAR(r.terms.at("msu.map"), 2 * 4 * (0.0848 + 0.0502) * kPj, 1e-24);
  const double eq = r.terms.at("msu.input_sum") + r.terms.at("msu.cim") + r.terms.at("msu.shift_add") +
                    r.terms.at("msu.map");
  EXPECT_NEAR(r.derived.at("msu.analog_equation"), eq, 1e-24);
  EXPECT_DOUBLE_EQ(r.analog_compute, r.terms.at("msu.cim"));
  EXPECT_LT(r.total(), e_fc_baseline(w, {}).total());
  w.window = 6;
  EXPECT_THROW(e_fc_msu(w, {}), ParameterError);
}

TEST(Report, ClosureAndPercentages) {
  const auto r = block_energy(BlockDescriptor::bert_base(), uniform_rates(BlockDescriptor::bert_base(), 0.03),
                              EnergyMode::baseline, {});
  EXPECT_NEAR(r.total(), sum_terms(r), 1e-12 * r.total());
  const auto pct = r.percentages();
  EXPECT_NEAR(std::accumulate(pct.begin(), pct.end(), 0.0), 100.0, 1e-9);
  for (const auto& [k, v] : r.terms) EXPECT_GE(v, 0.0) << k;
  EXPECT_EQ(r.terms.count("q_proj.spike.mac"), 1U);
  EXPECT_EQ(r.terms.count("attn_context.spike.kv_read"), 1U);
  EXPECT_EQ(EnergyReport{}.percentages()[0], 0.0);
}

TEST(Block, OrderingAndMissingRate) {
  const auto d = BlockDescriptor::bert_base();
  double prev = 1e300;
  for (const auto m : {EnergyMode::baseline, EnergyMode::mttfs, EnergyMode::deadzone, EnergyMode::msu}) {
    const double t = block_energy(d, uniform_rates(d, default_rate(m)), m).total();
    EXPECT_LT(t, prev) << to_string(m);
    prev = t;
  }
  RateMap partial = uniform_rates(d, 0.02);
  partial.erase("ffn_out");
  EXPECT_THROW(block_energy(d, partial, EnergyMode::baseline), ConfigError);
  EXPECT_THROW(parse_energy_mode("turbo"), ConfigError);
  EXPECT_EQ(parse_energy_mode("msu"), EnergyMode::msu);
}

TEST(Block, BlockTableRowRegroupsCategories) {
  const auto d = BlockDescriptor::bert_base();
  const auto r = block_energy(d, uniform_rates(d, 0.04), EnergyMode::baseline);
  const auto row = block_table_row(r);
  EXPECT_NEAR(row.total(), r.total() * kJoulesToMilliJoules, 1e-9);
  EXPECT_NEAR(row.weight_access, (r.weight_access + r.kv_traffic + r.threshold_read) * 1e3, 1e-12);
  EXPECT_NEAR(row.digital, (r.digital_compute + r.thresholding - r.threshold_read) * 1e3, 1e-12);
}

TEST(Scenarios, SharesSumAndErrors) {
  const auto rows = scenario_compare(literature_scenarios());
  ASSERT_EQ(rows.size(), 4U);
  for (const auto& s : rows) {
    EXPECT_NEAR(s.compute_pct + s.movement_pct + s.weight_pct + s.other_pct, 100.0, 1e-9);
  }
  EXPECT_THROW(scenario_compare({}), UsageError);
}

// Regression pin against the committed table produced by the energy and
// scenario commands.
TEST(Golden, BlockTableAndShares) {
  std::ifstream in(std::string(MATTERHORN_FIXTURES) + "/energy_golden.csv");
  ASSERT_TRUE(in) << "missing golden fixture";
  std::string line;
  int checked = 0;
  const auto d = BlockDescriptor::bert_base();
  const auto shares = scenario_compare(literature_scenarios());
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string kind, name;
    std::getline(ss, kind, ',');
    std::getline(ss, name, ',');
    std::vector<double> v;
    for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
    if (kind == "block") {
      const auto m = parse_energy_mode(name);
      const auto row = block_table_row(block_energy(d, uniform_rates(d, default_rate(m)), m));
      const double got[] = {row.spike_movement, row.weight_access, row.leakage, row.digital, row.analog, row.total()};
      ASSERT_EQ(v.size(), 6U);
      for (int i = 0; i < 6; ++i) EXPECT_NEAR(got[i], v[i], 1e-6 * std::max(1.0, v[i])) << name << " " << i;
      ++checked;
    } else if (kind == "share") {
      const auto it = std::find_if(shares.begin(), shares.end(), [&](const auto& s) { return s.scenario.name == name; });
      ASSERT_NE(it, shares.end()) << name;
      ASSERT_EQ(v.size(), 4U);
      const double got[] = {it->compute_pct, it->movement_pct, it->weight_pct, it->other_pct};
      for (int i = 0; i < 4; ++i) EXPECT_NEAR(got[i], v[i], 1e-3) << name << " " << i;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 8);
}

TEST(Area, MacroCountsAndTotals) {
  const auto d = BlockDescriptor::bert_base();
  const auto a = area_estimate(d);
  // Four 768x768 projections at 9 tiles, two FFN matrices at 36.
  EXPECT_EQ(a.macros_per_block, 4 * 9 + 2 * 36);
  EXPECT_NEAR(a.block_mm2, 108 * 0.072 * 1.2, 1e-12);
  EXPECT_NEAR(a.model_mm2, 12 * a.block_mm2, 1e-9);
  EXPECT_NEAR(a.array_mm2, 108 * 256.0 * 256.0 * 0.59e-6, 1e-9);
  EXPECT_LT(a.block_mm2, 10.0);
  EXPECT_LE(a.model_mm2, 120.0);
  AreaParams derived;
  derived.macro_mm2 = 0;
  EXPECT_NEAR(derived.macro_area_mm2(), 256.0 * 256.0 * 0.59e-6, 1e-12);
  AreaParams bad;
  bad.routing_factor = 0.5;
  EXPECT_THROW(bad.validate(), ParameterError);
}
