#include "cmplab/report_io.hpp"
#include "cmplab/errors.hpp"

#include <gtest/gtest.h>

namespace cmplab {
namespace {

constexpr const char* kConfig = R"({
  "n": 3, "m": 2,
  "regime": {"type": "discounted", "gamma": 0.9},
  "reward": [0.1, 0.5, 0.9],
  "samples": 500,
  "master_seed": 7,
  "tie_thresholds": [1e-3, 1e-9],
  "transport_samples": 100,
  "acceptance": {"volume_alpha": null, "max_ties": 2}
})";

TEST(ConfigIoTest, ParsesAndRoundTrips) {
  const auto config = config_from_json(kConfig);
  EXPECT_EQ(config.states, 3u);
  EXPECT_EQ(config.actions, 2u);
  ASSERT_TRUE(std::holds_alternative<Discounted>(config.spec.regime()));
  EXPECT_EQ(std::get<Discounted>(config.spec.regime()).gamma, 0.9);
  EXPECT_EQ(config.reward, (std::vector<double>{0.1, 0.5, 0.9}));
  EXPECT_EQ(config.samples, 500u);
  EXPECT_FALSE(config.acceptance.volume_alpha.has_value());
  EXPECT_EQ(config.acceptance.max_ties, 2u);
  EXPECT_EQ(config.acceptance.frequency_sigmas, 3.0);

  const auto again = config_from_json(config_to_json(config));
  EXPECT_EQ(config_to_json(again), config_to_json(config));
  EXPECT_EQ(config_hash(again), config_hash(config));
  EXPECT_EQ(config_hash(config).size(), 16u);
}

TEST(ConfigIoTest, WorkersDoNotChangeTheHash) {
  auto config = config_from_json(kConfig);
  const auto hash = config_hash(config);
  config.workers = 8;
  EXPECT_EQ(config_hash(config), hash);
  config.master_seed = 8;
  EXPECT_NE(config_hash(config), hash);
}

TEST(ConfigIoTest, FiniteHorizonAndRandomReward) {
  const auto config = config_from_json(R"({"n": 2, "m": 3,
    "regime": {"type": "finite", "horizon": 5}, "v0": [0.25, 0.75],
    "reward": "random-per-run", "samples": 10, "master_seed": 1})");
  ASSERT_TRUE(std::holds_alternative<FiniteHorizon>(config.spec.regime()));
  EXPECT_EQ(std::get<FiniteHorizon>(config.spec.regime()).horizon, 5u);
  EXPECT_EQ(std::get<FiniteHorizon>(config.spec.regime()).gamma, 1.0);
  EXPECT_FALSE(config.reward.has_value());
  ASSERT_TRUE(config.spec.v0().has_value());
  EXPECT_EQ((*config.spec.v0())[1], 0.75);
}

TEST(ConfigIoTest, RejectsBadDocuments) {
  EXPECT_THROW(config_from_json("{"), FormatError);
  EXPECT_THROW(config_from_json(R"({"n": 2})"), FormatError);
  EXPECT_THROW(config_from_json(R"({"n": 2, "m": 2, "regime": {"type": "weird"},
    "samples": 1, "master_seed": 0})"), FormatError);
  EXPECT_THROW(config_from_json(R"({"n": 2, "m": 2, "regime": {"type": "averaged"},
    "samples": 0, "master_seed": 0})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"n": 2, "m": 2, "regime": {"type": "discounted", "gamma": 1.5},
    "samples": 5, "master_seed": 0})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"n": 2, "m": 2, "regime": {"type": "finite", "horizon": 1},
    "v0": [1.0, 0.0], "samples": 5, "master_seed": 0})"), DegenerateHorizonError);
}

class ReportIoTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    auto config = config_from_json(kConfig);
    report_ = new ExperimentReport(run_full_report(config));
  }
  static void TearDownTestSuite() {
    delete report_;
    report_ = nullptr;
  }
  static ExperimentReport* report_;
};

ExperimentReport* ReportIoTest::report_ = nullptr;

TEST_F(ReportIoTest, FullReportJsonRoundTripIsByteIdentical) {
  const auto text = report_to_json(*report_);
  EXPECT_EQ(report_to_json(report_from_json(text)), text);
  EXPECT_EQ(text.find("wall_clock"), std::string::npos);
}

TEST_F(ReportIoTest, SectionJsonRoundTrips) {
  const auto& r = *report_;
  EXPECT_EQ(frequency_to_json(frequency_from_json(frequency_to_json(r.frequency))),
            frequency_to_json(r.frequency));
  EXPECT_EQ(entropy_to_json(entropy_from_json(entropy_to_json(r.entropy))), entropy_to_json(r.entropy));
  EXPECT_EQ(ties_to_json(ties_from_json(ties_to_json(r.ties))), ties_to_json(r.ties));
  EXPECT_EQ(transport_to_json(transport_from_json(transport_to_json(r.transport))),
            transport_to_json(r.transport));
}

TEST_F(ReportIoTest, CsvRoundTrips) {
  const auto& r = *report_;
  const auto freq_csv = frequency_to_csv(r.frequency, "manifest=test");
  EXPECT_EQ(freq_csv.rfind("# manifest=test\n", 0), 0u);
  const auto freq = frequency_from_csv(freq_csv, 3, 2);
  EXPECT_EQ(freq.counts, r.frequency.counts);
  EXPECT_EQ(freq.frequencies, r.frequency.frequencies);
  EXPECT_EQ(freq.chi_square, r.frequency.chi_square);

  const auto ties = ties_from_csv(ties_to_csv(r.ties, "x"));
  EXPECT_EQ(ties.thresholds, r.ties.thresholds);
  EXPECT_EQ(ties.tie_counts, r.ties.tie_counts);

  const auto transport = transport_from_csv(transport_to_csv(r.transport, "x"));
  EXPECT_EQ(transport_to_csv(transport, "x"), transport_to_csv(r.transport, "x"));
  ASSERT_EQ(transport.pairs.size(), 28u);
  EXPECT_EQ(transport.pairs[3].volume_z, r.transport.pairs[3].volume_z);
}

TEST(CsvIoTest, RejectsMalformedRows) {
  EXPECT_THROW(ties_from_csv("threshold,tie_count\n0.1\n"), FormatError);
  EXPECT_THROW(ties_from_csv("threshold,tie_count\nabc,3\n"), FormatError);
}

}  // namespace
}  // namespace cmplab
