#include <gtest/gtest.h>

#include <algorithm>

#include "ftdso/campaign.hpp"

using namespace ftdso;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.graph.generator = "er:50:0.1";
  c.graph.seed = 4;
  c.dso.seed = 9;
  c.workload.queries = 30;
  c.workload.seed = 2;
  c.space_samples = 3;
  return c;
}

}  // namespace

TEST(Campaign, ConfigRoundTrip) {
  ExperimentConfig c = small_config();
  c.dso.L_override = 3;
  c.dso.lambda_override = 2;
  c.workload.max_failures = 1;
  const json j = c;
  const auto back = j.get<ExperimentConfig>();
  EXPECT_EQ(json(back).dump(), j.dump());
  EXPECT_EQ(back.dso.lambda_override, std::optional<int>(2));
}

TEST(Campaign, ConfigRejectsBadInput) {
  json j = small_config();
  j["extra"] = 1;
  EXPECT_THROW(j.get<ExperimentConfig>(), std::invalid_argument);
  j = small_config();
  j["params"]["k"] = 3;
  EXPECT_THROW(j.get<ExperimentConfig>(), std::invalid_argument);
  j = small_config();
  j["params"]["alpha"] = 0.7;
  EXPECT_THROW(j.get<ExperimentConfig>(), std::invalid_argument);
  j = small_config();
  j["workload"]["max_failures"] = 5;
  EXPECT_THROW(j.get<ExperimentConfig>(), std::invalid_argument);
  j = small_config();
  j["params"]["f"] = "two";
  EXPECT_THROW(j.get<ExperimentConfig>(), std::invalid_argument);
}

TEST(Campaign, ZeroQueriesGivesBuildMetricsOnly) {
  ExperimentConfig c = small_config();
  c.workload.queries = 0;
  auto R = run_campaign(c);
  EXPECT_TRUE(R.records.empty());
  EXPECT_EQ(R.summary.queries, 0);
  EXPECT_TRUE(R.summary.passed);
  ASSERT_TRUE(R.space.has_value());
  EXPECT_GT(R.space->total(), 0);
  EXPECT_TRUE(report_json(R)["queries"].empty());
}

TEST(Campaign, NoFailuresStayWithinStretch) {
  ExperimentConfig c = small_config();
  c.workload.max_failures = 0;
  auto R = run_campaign(c);
  ASSERT_EQ(R.summary.queries, 30);
  for (const auto& r : R.records) {
    EXPECT_TRUE(r.F.empty());
    ASSERT_TRUE(r.stretch.has_value());
    EXPECT_LE(*r.stretch, 3 + c.dso.eps);
  }
}

TEST(Campaign, RepeatIsByteIdentical) {
  ExperimentConfig c = small_config();
  c.dso.L_override = 3;
  c.dso.lambda_override = 2;
  const auto a = run_campaign(c, 1);
  const auto b = run_campaign(c, 3);
  EXPECT_EQ(report_json(a).dump(), report_json(b).dump());
  EXPECT_EQ(report_csv(a), report_csv(b));
  EXPECT_EQ(a.summary.soundness_violations, 0);
}

TEST(Campaign, WorkloadRespectsFailureCounts) {
  ExperimentConfig c = small_config();
  c.workload.min_failures = 1;
  c.workload.queries = 100;
  const Graph g = load_graph(c.graph);
  auto recs = sample_workload(g, c.workload, 2);
  ASSERT_EQ(recs.size(), 100u);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].index, static_cast<int>(i));
    EXPECT_GE(recs[i].F.size(), 1u);  // a repeated draw can collapse two failures into one
    EXPECT_LE(recs[i].F.size(), 2u);
  }
}

TEST(Campaign, CsvShape) {
  ExperimentConfig c = small_config();
  c.workload.queries = 5;
  c.space_samples = 0;
  auto R = run_campaign(c);
  const auto csv = report_csv(R);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_EQ(csv.rfind("index,s,t,F,answer,exact,stretch,case,sampling_failure\n", 0), 0u);
}
