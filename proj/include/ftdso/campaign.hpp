#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftdso/dso.hpp"
#include "ftdso/graph.hpp"

namespace ftdso {

struct GraphSource {
  std::string file;       // DIMACS file; takes precedence over the generator
  std::string generator;  // "er:N:P", "grid:W:H" or "rgg:N:R"
  std::uint64_t seed = 1;
  bool largest_component = true;
};

struct Workload {
  int queries = 100;
  std::uint64_t seed = 1;
  int min_failures = 0;
  int max_failures = -1;   // -1: f
  double path_bias = 0.7;  // chance that a failure is drawn from the canonical s-t path of G
};

struct Thresholds {
  double max_stretch_violation_rate = 0.01;
};

struct ExperimentConfig {
  GraphSource graph;
  DsoConfig dso;  // dso.threads is a run option and never serialized
  Workload workload;
  Thresholds thresholds;
  int space_samples = 20;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Throws std::invalid_argument on unknown keys or values the modules reject.
void from_json(const nlohmann::json& j, ExperimentConfig& c);
void validate(const ExperimentConfig& c);

Graph load_graph(const GraphSource& src);

struct QueryRecord {
  int index = 0;
  Vertex s = 0, t = 0;
  std::vector<EdgeId> F;
  Dist answer = kInf;
  Dist exact = kInf;
  std::optional<double> stretch;  // answer / exact when both are finite and exact > 0
  std::string case_label;
  bool sampling_failure = false;
  double seconds = 0;
};

struct WorkloadSummary {
  int queries = 0;
  int finite = 0;
  int soundness_violations = 0;
  int stretch_violations = 0;
  int sampling_failures = 0;
  double max_stretch = 0;
  double violation_rate = 0;  // stretch violations over finite queries
  std::map<std::string, int> cases;
  bool passed = true;
};

struct Report {
  ExperimentConfig config;
  int n = 0, m = 0;
  DsoParams params;
  std::optional<SpaceReport> space;
  double build_seconds = 0;
  std::vector<QueryRecord> records;
  WorkloadSummary summary;
};

std::vector<QueryRecord> sample_workload(const Graph& g, const Workload& w, int f);
// Answers and checks every query; parallel over queries, results in index order.
WorkloadSummary run_workload(const Dso& dso, std::vector<QueryRecord>& records, const Thresholds& th,
                             unsigned threads);
Report run_campaign(const ExperimentConfig& config, unsigned threads = 1);

nlohmann::json record_json(const QueryRecord& r);
// Deterministic content only; wall-clock figures go to timings_json.
nlohmann::json report_json(const Report& r);
nlohmann::json timings_json(const Report& r);
std::string report_csv(const Report& r);

}  // namespace ftdso
