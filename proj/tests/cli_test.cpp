#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "matterhorn/cli.hpp"
#include "matterhorn/json_io.hpp"

using namespace matterhorn;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  const std::string path = ::testing::TempDir() + "/" + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST(Cli, VerifyExhaustivePasses) {
  const CliRun r = run({"verify", "--bits", "3", "--k", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_TRUE(doc["report"]["passed"].get<bool>());
  EXPECT_EQ(doc["report"]["cases_checked"].get<long long>(), 4096 * 4);
  EXPECT_EQ(doc["config"]["weights"], "random:1");
}

TEST(Cli, VerifyFaultExitsWithFailureCode) {
  const CliRun r = run({"verify", "--bits", "3", "--fault-threshold-offset", "1.0"});
  EXPECT_EQ(r.code, kExitVerifyFailed);
  const Json doc = Json::parse(r.out);
  EXPECT_FALSE(doc["report"]["passed"].get<bool>());
  EXPECT_GT(doc["report"]["mismatch_count"].get<long long>(), 0);
}

TEST(Cli, VerifyLayerFileRoundTrip) {
  const CliRun first = run({"verify", "--bits", "2", "--k", "1", "--weights", "random:7"});
  ASSERT_EQ(first.code, kExitOk) << first.err;
  const Json layer = Json::parse(first.out)["config"]["layer"];
  const std::string path = temp_file("layer.json", layer.dump());
  const CliRun second = run({"verify", "--weights", path});
  ASSERT_EQ(second.code, kExitOk) << second.err;
  const Json doc = Json::parse(second.out);
  EXPECT_EQ(doc["config"]["layer"], layer);
  EXPECT_EQ(doc["report"], Json::parse(first.out)["report"]);
}

TEST(Cli, XbarReplay) {
  const CliRun r = run({"xbar", "--replay", "example"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc["currents_uA"], Json::parse("[10.1, 0.2, 10.1, 20.0]"));
  EXPECT_EQ(doc["codes"], Json::parse("[1, 0, 1, 2]"));
  const Json alias = Json::parse(run({"xbar", "--replay", "appendix-a"}).out);
  EXPECT_EQ(alias["currents_uA"], doc["currents_uA"]);
  EXPECT_EQ(alias["codes"], doc["codes"]);
  EXPECT_EQ(run({"xbar", "--replay", "nope"}).code, kExitUsage);
}

TEST(Cli, EncodeCode) {
  const CliRun r = run({"encode", "--bits", "4", "--code", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc["spike_time"], 4);
  EXPECT_EQ(doc["decoded"], 3);
}

TEST(Cli, UsageErrors) {
  const CliRun none = run({});
  EXPECT_EQ(none.code, kExitUsage);
  EXPECT_NE(none.err.find("Usage"), std::string::npos) << none.err;
  const CliRun unknown = run({"verify", "--frobnicate"});
  EXPECT_EQ(unknown.code, kExitUsage);
  EXPECT_NE(unknown.err.find("\"usage\""), std::string::npos) << unknown.err;
  EXPECT_EQ(run({"energy", "--out", "xml"}).code, kExitUsage);
}

TEST(Cli, MalformedJsonNamesThePath) {
  const std::string path = temp_file("broken.json", "{\"batch\": 64,");
  const CliRun r = run({"energy", "--shape", path});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find(path), std::string::npos) << r.err;
  const std::string unknown = temp_file("unknown.json", "{\"bach\": 64}");
  const CliRun u = run({"energy", "--shape", unknown});
  EXPECT_EQ(u.code, kExitConfig);
  EXPECT_NE(u.err.find("bach"), std::string::npos) << u.err;
}

TEST(Cli, EnergyCsvAndJson) {
  const CliRun csv = run({"energy", "--mode", "all", "--out", "csv"});
  ASSERT_EQ(csv.code, kExitOk) << csv.err;
  EXPECT_NE(csv.out.find("# assumptions.read_bits=4\n"), std::string::npos) << csv.out;
  EXPECT_NE(csv.out.find("mode,spike_movement_mJ,weight_access_mJ,leakage_mJ,digital_mJ,analog_mJ,total_mJ"),
            std::string::npos);
  EXPECT_NE(csv.out.find("\nmsu,"), std::string::npos);
  const CliRun json = run({"energy", "--mode", "msu", "--out", "json"});
  ASSERT_EQ(json.code, kExitOk) << json.err;
  const Json doc = Json::parse(json.out);
  EXPECT_TRUE(doc.contains("area"));
}

TEST(Cli, SeedIsReproducibleAndEnvOverrides) {
  const auto a = run({"--seed", "5", "stats", "--n", "2000"});
  const auto b = run({"--seed", "5", "stats", "--n", "2000"});
  const auto c = run({"--seed", "6", "stats", "--n", "2000"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  ::setenv("MATTERHORN_SEED", "5", 1);
  const auto d = run({"--seed", "6", "stats", "--n", "2000"});
  ::setenv("MATTERHORN_SEED", "not-a-number", 1);
  const auto bad = run({"stats", "--n", "10"});
  ::unsetenv("MATTERHORN_SEED");
  EXPECT_EQ(d.out, a.out);
  EXPECT_EQ(bad.code, kExitConfig);
}

TEST(Cli, SweepAndScenario) {
  const CliRun s = run({"sweep", "--calibrate", "0.34", "--kmax", "2"});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_NE(s.out.find("# baseline_silence="), std::string::npos);
  const CliRun sc = run({"scenario", "--out", "json"});
  ASSERT_EQ(sc.code, kExitOk) << sc.err;
  EXPECT_NE(sc.out.find("SpikingBERT"), std::string::npos);
}

TEST(Cli, OutputFile) {
  const std::string path = ::testing::TempDir() + "/scenario.csv";
  const CliRun r = run({"-o", path, "scenario"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream body;
  body << in.rdbuf();
  EXPECT_NE(body.str().find("Otters"), std::string::npos);
}
