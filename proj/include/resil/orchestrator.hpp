// Five-phase experiment lifecycle and campaign iteration with retry policies.
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "resil/backend.hpp"
#include "resil/config.hpp"
#include "resil/metrics.hpp"

namespace resil::orch {

struct PhaseEvent {
  double ts_ms = 0.0;
  std::string phase;  // "P1".."P5"
  std::string event;
  std::string detail;
};

// Receives every phase event as it happens (streamed to events.log and to
// progress output).
using EventSink = std::function<void(const std::string& case_id, const PhaseEvent&)>;

struct ExperimentResult {
  std::string case_id;
  std::vector<PhaseEvent> phase_log;
  double fault_on_ts_ms = -1.0;   // confirmation time of the first activation
  double fault_off_ts_ms = -1.0;  // completion time of the last removal
  std::vector<RequestRecord> records;
  metrics::MetricsSummary summary;
  bool completed = false;
  std::string abort_reason;  // set when not completed
};

struct CampaignResult {
  std::string plan_name;
  std::vector<ExperimentResult> results;  // executed cases, in expansion order
  std::vector<std::pair<std::string, std::string>> aborted_cases;  // (case_id, reason)
  std::vector<std::string> unrun_cases;  // skipped after a recovery halt
  std::string started_at;
  std::string finished_at;
};

class RetryExhausted : public std::runtime_error {
 public:
  RetryExhausted(std::string op_kind, int attempts, const std::string& last_error)
      : std::runtime_error("retry exhausted for " + op_kind + " after " +
                           std::to_string(attempts) + " attempts: " + last_error),
        op_kind_(std::move(op_kind)),
        attempts_(attempts) {}

  const std::string& op_kind() const { return op_kind_; }
  int attempts() const { return attempts_; }

 private:
  std::string op_kind_;
  int attempts_;
};

// Runs `action` up to policy.max_attempts, backing off exponentially between
// attempts (initial * multiplier^k) on TransportError. Non-retryable errors
// propagate immediately; exhaustion carries the last underlying error.
template <typename F>
auto with_retry(ClusterBackend& backend, const std::string& op_kind,
                const RetryPolicy& policy, F&& action,
                const std::function<void(const std::string& event, const std::string& detail)>&
                    log = {}) -> decltype(action()) {
  for (int attempt = 1;; ++attempt) {
    try {
      return action();
    } catch (const TransportError& e) {
      if (attempt >= policy.max_attempts) throw RetryExhausted(op_kind, attempt, e.what());
      const double backoff_ms =
          policy.backoff_initial_ms * std::pow(policy.backoff_multiplier, attempt - 1);
      if (log) {
        log("retry-wait", op_kind + " attempt " + std::to_string(attempt) + " failed (" +
                              e.what() + "), backing off " + std::to_string(backoff_ms) + " ms");
      }
      backend.wait_ms(backoff_ms);
    }
  }
}

// Runs one case through the lifecycle: P1 health gate, P2 fault activation,
// P3 workload concurrent with the fault timeline, P4 result analysis, P5
// recovery (remove faults, restart, stabilize, re-validate). The result is
// completed only after P5 validation passes.
ExperimentResult run_experiment(const ExperimentCase& c, ClusterBackend& backend,
                                const RetryPolicySet& policies, double stabilization_s,
                                const std::string& ns = "default",
                                const EventSink& sink = {});

using BackendFactory = std::function<std::unique_ptr<ClusterBackend>(const ExperimentCase&)>;
using ResultHook = std::function<void(const ExperimentCase&, const ExperimentResult&)>;

// Executes cases in expansion order. A recovery (P5) failure halts the
// campaign; other aborts continue to the next case. on_result fires after
// each case so outputs can be persisted incrementally.
CampaignResult run_campaign(const ExperimentPlan& plan, const BackendFactory& factory,
                            const ResultHook& on_result = {}, const EventSink& sink = {});

// Fresh simulated cluster per case, seeded from the case seed.
BackendFactory sim_backend_factory(const ExperimentPlan& plan);

}  // namespace resil::orch
