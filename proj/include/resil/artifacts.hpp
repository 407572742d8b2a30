// Output artifact pipeline: requests.csv, summary.csv, zscores.csv,
// events.log, manifest.json, read-back for re-analysis, and report.md.
#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "resil/config.hpp"
#include "resil/metrics.hpp"
#include "resil/orchestrator.hpp"

namespace resil::artifacts {

inline constexpr const char* kRequestsHeader =
    "experiment_id,request_id,send_ts_ms,latency_ms,outcome,error_class";
inline constexpr const char* kSummaryHeader =
    "case_id,fault_type,intensity,mode,threads,timeout_s,deployment_mode,topology,"
    "total,failed,failure_rate,mean_rt_ms,mean_rt_success_ms,p95_ms";
inline constexpr const char* kZScoresHeader = "case_id,group_key,z_mean,z_p95,degenerate";

// Baseline grouping key: one baseline per fault/deployment/topology/workload cell.
std::string group_key_of(const ExperimentCase& c);

// Round-trips a value through the CSV float format so that on-disk and
// in-memory analysis paths see identical numbers.
double csv_round(double v);
std::string csv_float(double v);

// Streams campaign outputs as results arrive so a crash loses at most one
// case. Files carry LF endings and 6-digit float precision.
class OutputWriter {
 public:
  OutputWriter(std::filesystem::path out_dir, const ExperimentPlan& plan);

  void append_event(const std::string& case_id, const orch::PhaseEvent& event);
  void append_result(const ExperimentCase& c, const orch::ExperimentResult& r);
  // Writes zscores.csv and manifest.json; returns the computed table.
  metrics::ZScoreTable finish(const orch::CampaignResult& campaign, int baseline_intensity);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  ExperimentPlan plan_;
  std::ofstream requests_;
  std::ofstream summary_;
  std::ofstream events_;
  std::vector<metrics::CaseMetrics> case_metrics_;
};

// One-shot variant over a finished campaign.
metrics::ZScoreTable write_outputs(const orch::CampaignResult& campaign,
                                   const std::vector<ExperimentCase>& cases,
                                   const ExperimentPlan& plan,
                                   const std::filesystem::path& out_dir,
                                   int baseline_intensity = 25);

// --- read-back ---------------------------------------------------------------

struct SummaryRow {
  std::string case_id;
  std::string fault_type;
  int intensity = 0;
  std::string workload_mode;
  int threads = 1;
  double timeout_s = 5.0;
  std::string deployment_mode;
  std::string topology;
  std::uint64_t total = 0;
  std::uint64_t failed = 0;
  double failure_rate = 0.0;
  double mean_rt_ms = 0.0;
  std::optional<double> mean_rt_success_ms;
  std::optional<double> p95_ms;

  std::string group_key() const;
};

struct LoadedRun {
  std::vector<SummaryRow> summaries;
  std::map<std::string, std::vector<RequestRecord>> records_by_case;
  std::vector<std::pair<std::string, std::string>> aborted_cases;
  std::uint64_t plan_seed = 0;
  std::string plan_name;
  double experiment_failure_rate = 0.0;  // aborted / executed experiments
};

// Parses requests.csv + summary.csv (+ manifest.json when present).
LoadedRun load_run(const std::filesystem::path& dir);

// Per-case metrics rebuilt from persisted records; the basis for analysis.
std::vector<metrics::CaseMetrics> case_metrics_of(const LoadedRun& run);

// Regenerates zscores.csv from the persisted records. Idempotent.
metrics::ZScoreTable analyze_run(const std::filesystem::path& dir, int baseline_intensity);

// Pooled per-request z values over successful requests of cases selected by
// the row predicate, each normalized by its own group baseline.
std::vector<double> collect_request_z(const LoadedRun& run, int baseline_intensity,
                                      const std::function<bool(const SummaryRow&)>& select);

// --- report ------------------------------------------------------------------

struct PatternCheck {
  std::string name;
  bool applicable = false;
  bool holds = false;
  std::string detail;
};

// Directional resilience patterns evaluable within a single campaign:
// loss survivorship and partition stability. Cross-profile variance
// comparisons need paired campaigns and are reported as not applicable.
std::vector<PatternCheck> evaluate_patterns(const LoadedRun& run, int baseline_intensity);

std::string render_report(const LoadedRun& run, const metrics::ZScoreTable& table,
                          const std::vector<PatternCheck>& checks);

// Writes report.md into the run directory.
void write_report(const std::filesystem::path& dir, int baseline_intensity);

}  // namespace resil::artifacts
