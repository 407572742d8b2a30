// Request-record aggregation: per-experiment summaries, baseline-normalized
// z-scores, and fault-window correlation.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "resil/types.hpp"

namespace resil::metrics {

inline constexpr double kSigmaFloor = 1e-9;

struct MetricsSummary {
  std::uint64_t total_requests = 0;
  std::uint64_t failed_requests = 0;
  double failure_rate = 0.0;
  // Mean over all requests; failures contribute their timeout budget.
  double mean_rt_ms = 0.0;
  std::optional<double> mean_rt_success_ms;  // absent when nothing succeeded
  std::optional<double> p95_ms;              // nearest-rank over successes
  std::map<std::string, std::uint64_t> error_histogram;
};

MetricsSummary summarize(const std::vector<RequestRecord>& records, double timeout_s);

// --- small stats helpers ----------------------------------------------------

double mean_of(const std::vector<double>& xs);
double population_sigma(const std::vector<double>& xs);
double variance_of(const std::vector<double>& xs);
double median_of(std::vector<double> xs);
// ceil(0.95 n)-th order statistic.
double p95_nearest_rank(std::vector<double> xs);

// --- z-score normalization (baseline at 25% intensity by default) -----------

struct GroupBaseline {
  double mu = 0.0;
  double sigma = 0.0;
  std::size_t sample_count = 0;
  int intensity = 25;
  bool degenerate = false;  // sigma below the floor
};

struct CaseMetrics {
  std::string case_id;
  std::string group_key;  // fault type | deployment mode | topology | workload
  int intensity = 25;
  std::vector<double> success_latencies;
  MetricsSummary summary;
};

struct ZScoreRow {
  std::string case_id;
  std::string group_key;
  std::optional<double> z_mean;  // absent when the case had no successes
  std::optional<double> z_p95;
  bool degenerate = false;
};

struct ZScoreTable {
  std::map<std::string, GroupBaseline> baselines;
  std::vector<ZScoreRow> rows;
};

class MissingBaselineError : public std::runtime_error {
 public:
  explicit MissingBaselineError(const std::string& group)
      : std::runtime_error("no baseline measurements for group '" + group + "'"),
        group_(group) {}
  const std::string& group() const { return group_; }

 private:
  std::string group_;
};

// (x - mu) / sigma. Degenerate sigma yields 0 at x == mu and an infinite
// sentinel otherwise; *degenerate is set when provided.
double zscore(double x, double mu, double sigma, bool* degenerate = nullptr);

// Per group, mu and sigma come from the pooled per-request successful
// latencies of the baseline-intensity cases (population sigma). Every case
// gets a row with z values for its success mean and p95.
ZScoreTable zscore_normalize(const std::vector<CaseMetrics>& cases,
                             int baseline_intensity = 25);

std::vector<double> per_request_z(const std::vector<double>& latencies,
                                  const GroupBaseline& baseline);

// --- fault-window correlation ------------------------------------------------

struct WindowStats {
  double on_ms = 0.0;
  double off_ms = 0.0;
  std::size_t in_count = 0;
  std::optional<double> pre_mean_ms;  // equal-length interval before on_ms
  std::optional<double> in_mean_ms;
  std::optional<double> amplification;  // in / pre
  std::optional<double> onset_lag_ms;   // first in-window success above mu+2sigma
};

struct DegradationReport {
  std::vector<WindowStats> windows;
};

// Correlates activation windows with observed degradation. Windows without
// records are omitted. Failed requests contribute their timeout budget to
// window means, matching the mean_rt convention.
DegradationReport correlate_fault_windows(const std::vector<RequestRecord>& records,
                                          const FaultTimeline& timeline, double mu,
                                          double sigma, double timeout_s);

}  // namespace resil::metrics
