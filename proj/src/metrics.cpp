#include "resil/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace resil::metrics {

MetricsSummary summarize(const std::vector<RequestRecord>& records, double timeout_s) {
  if (records.empty()) throw std::invalid_argument("summarize: empty record list");

  MetricsSummary s;
  s.total_requests = records.size();
  const double timeout_ms = timeout_s * 1000.0;
  double rt_sum = 0.0;
  double success_sum = 0.0;
  std::vector<double> successes;
  for (const auto& r : records) {
    if (r.outcome == RequestStatus::success) {
      rt_sum += *r.latency_ms;
      success_sum += *r.latency_ms;
      successes.push_back(*r.latency_ms);
    } else {
      ++s.failed_requests;
      rt_sum += timeout_ms;
      ++s.error_histogram[r.error_class];
    }
  }
  s.failure_rate = static_cast<double>(s.failed_requests) / static_cast<double>(s.total_requests);
  s.mean_rt_ms = rt_sum / static_cast<double>(s.total_requests);
  if (!successes.empty()) {
    s.mean_rt_success_ms = success_sum / static_cast<double>(successes.size());
    s.p95_ms = p95_nearest_rank(std::move(successes));
  }
  return s;
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double variance_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(xs.size());
}

double population_sigma(const std::vector<double>& xs) { return std::sqrt(variance_of(xs)); }

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double p95_nearest_rank(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("p95 of an empty sample");
  std::sort(xs.begin(), xs.end());
  auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(xs.size())));
  if (rank < 1) rank = 1;
  return xs[rank - 1];
}

double zscore(double x, double mu, double sigma, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (sigma < kSigmaFloor) {
    if (degenerate) *degenerate = true;
    if (std::abs(x - mu) <= kSigmaFloor) return 0.0;
    return x > mu ? std::numeric_limits<double>::infinity()
                  : -std::numeric_limits<double>::infinity();
  }
  return (x - mu) / sigma;
}

ZScoreTable zscore_normalize(const std::vector<CaseMetrics>& cases, int baseline_intensity) {
  ZScoreTable table;

  // Pool baseline per-request successful latencies per group.
  std::map<std::string, std::vector<double>> baseline_samples;
  std::map<std::string, bool> group_seen;
  for (const auto& c : cases) {
    group_seen[c.group_key] = true;
    if (c.intensity == baseline_intensity) {
      auto& pool = baseline_samples[c.group_key];
      pool.insert(pool.end(), c.success_latencies.begin(), c.success_latencies.end());
    }
  }
  for (const auto& [group, seen] : group_seen) {
    auto it = baseline_samples.find(group);
    if (it == baseline_samples.end() || it->second.empty()) {
      throw MissingBaselineError(group);
    }
    GroupBaseline b;
    b.mu = mean_of(it->second);
    b.sigma = population_sigma(it->second);
    b.sample_count = it->second.size();
    b.intensity = baseline_intensity;
    b.degenerate = b.sigma < kSigmaFloor;
    table.baselines[group] = b;
  }

  for (const auto& c : cases) {
    const auto& b = table.baselines.at(c.group_key);
    ZScoreRow row;
    row.case_id = c.case_id;
    row.group_key = c.group_key;
    if (c.summary.mean_rt_success_ms) {
      bool degenerate = false;
      row.z_mean = zscore(*c.summary.mean_rt_success_ms, b.mu, b.sigma, &degenerate);
      row.degenerate = degenerate;
    }
    if (c.summary.p95_ms) {
      bool degenerate = false;
      row.z_p95 = zscore(*c.summary.p95_ms, b.mu, b.sigma, &degenerate);
      row.degenerate = row.degenerate || degenerate;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<double> per_request_z(const std::vector<double>& latencies,
                                  const GroupBaseline& baseline) {
  std::vector<double> zs;
  zs.reserve(latencies.size());
  for (double x : latencies) zs.push_back(zscore(x, baseline.mu, baseline.sigma));
  return zs;
}

DegradationReport correlate_fault_windows(const std::vector<RequestRecord>& records,
                                          const FaultTimeline& timeline, double mu,
                                          double sigma, double timeout_s) {
  if (timeline.activations.empty())
    throw std::invalid_argument("correlate_fault_windows: empty timeline");
  DegradationReport report;
  const double timeout_ms = timeout_s * 1000.0;
  const auto effective_rt = [&](const RequestRecord& r) {
    return r.outcome == RequestStatus::success ? *r.latency_ms : timeout_ms;
  };

  for (const auto& window : timeline.activations) {
    const double span = window.off_ms - window.on_ms;
    std::vector<double> in_rts, pre_rts;
    std::optional<double> onset_lag;
    for (const auto& r : records) {
      if (r.send_ts_ms >= window.on_ms && r.send_ts_ms < window.off_ms) {
        in_rts.push_back(effective_rt(r));
        if (!onset_lag && r.outcome == RequestStatus::success &&
            *r.latency_ms > mu + 2.0 * sigma) {
          onset_lag = r.send_ts_ms - window.on_ms;
        }
      } else if (r.send_ts_ms >= window.on_ms - span && r.send_ts_ms < window.on_ms) {
        pre_rts.push_back(effective_rt(r));
      }
    }
    if (in_rts.empty()) continue;  // nothing observed, no entry

    WindowStats stats;
    stats.on_ms = window.on_ms;
    stats.off_ms = window.off_ms;
    stats.in_count = in_rts.size();
    stats.in_mean_ms = mean_of(in_rts);
    stats.onset_lag_ms = onset_lag;
    if (!pre_rts.empty()) {
      stats.pre_mean_ms = mean_of(pre_rts);
      if (*stats.pre_mean_ms > 0) stats.amplification = *stats.in_mean_ms / *stats.pre_mean_ms;
    }
    report.windows.push_back(std::move(stats));
  }
  return report;
}

}  // namespace resil::metrics
