#include "resil/orchestrator.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <optional>

#include "resil/fault.hpp"
#include "resil/health.hpp"
#include "resil/load.hpp"
#include "resil/rng.hpp"
#include "resil/sim.hpp"

namespace resil::orch {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentCase& c, ClusterBackend& backend,
                                const RetryPolicySet& policies, double stabilization_s,
                                const std::string& ns, const EventSink& sink) {
  ExperimentResult result;
  result.case_id = c.case_id;

  const auto log = [&](const std::string& phase, const std::string& event,
                       const std::string& detail = "") {
    PhaseEvent e{backend.now_ms(), phase, event, detail};
    result.phase_log.push_back(e);
    if (sink) sink(c.case_id, e);
  };
  const auto abort = [&](const std::string& phase, const std::string& reason,
                         const std::string& detail) {
    result.abort_reason = reason;
    log(phase, "abort", reason + ": " + detail);
    return result;
  };

  // P1: the fault stage is gated on a positive health status.
  log("P1", "start", "pre-experiment validation");
  try {
    health::await_healthy(backend, ns, health::kDefaultIntervalMs,
                          policies.cluster_validation.max_attempts,
                          [&](int attempt, const health::HealthReport& r) {
                            log("P1", "check",
                                "attempt " + std::to_string(attempt) +
                                    (r.healthy ? " healthy" : " unhealthy"));
                          });
  } catch (const health::HealthWaitExhausted& e) {
    return abort("P1", "unhealthy-precondition", e.what());
  }
  log("P1", "healthy");

  // P2: activate the first window and record the confirmed fault-on time.
  const FaultTimeline timeline = fault::build_timeline(c.fault, c.workload.window_s);
  log("P2", "start", to_string(c.fault.action) + " value=" + std::to_string(c.fault.value));
  std::vector<std::optional<FaultHandle>> window_handles(timeline.activations.size());
  try {
    with_retry(
        backend, "fault_injection", policies.fault_injection,
        [&] { window_handles[0] = fault::apply_fault(backend, c.fault); },
        [&](const std::string& ev, const std::string& detail) { log("P2", ev, detail); });
  } catch (const std::exception& e) {
    return abort("P2", "fault-apply", e.what());
  }
  result.fault_on_ts_ms = window_handles[0]->on_ts_ms;
  log("P2", "fault-on", "confirmed at " + std::to_string(result.fault_on_ts_ms));

  // P3: workload and the remaining fault timeline run concurrently, both
  // timestamped against the backend clock.
  log("P3", "start", "window_s=" + std::to_string(c.workload.window_s));
  std::vector<load::TimedAction> actions;
  for (std::size_t k = 0; k < timeline.activations.size(); ++k) {
    const auto& w = timeline.activations[k];
    if (k > 0) {
      actions.push_back({w.on_ms, "fault-on", [&, k] {
                           with_retry(
                               backend, "fault_injection", policies.fault_injection,
                               [&, k] { window_handles[k] = fault::apply_fault(backend, c.fault); },
                               [&](const std::string& ev, const std::string& d) {
                                 log("P3", ev, d);
                               });
                           log("P3", "fault-on", "window " + std::to_string(k));
                         }});
    }
    actions.push_back({w.off_ms, "fault-off", [&, k] {
                         if (window_handles[k]) {
                           fault::remove_fault(backend, *window_handles[k]);
                           result.fault_off_ts_ms = backend.now_ms();
                           log("P3", "fault-off", "window " + std::to_string(k));
                         }
                       }});
  }
  try {
    const auto schedule = load::plan_arrivals(c.workload, derive_seed(c.seed, "arrivals"));
    result.records = with_retry(
        backend, "load_generation", policies.load_generation,
        [&] {
          return load::execute_workload(backend, c.topology, schedule, c.workload, c.case_id,
                                        policies.request_send, actions,
                                        [&](const std::string& ev, const std::string& d) {
                                          log("P3", ev, d);
                                        });
        },
        [&](const std::string& ev, const std::string& d) { log("P3", ev, d); });
  } catch (const RetryExhausted& e) {
    return abort("P3", e.op_kind() == "fault_injection" ? "fault-apply" : "load", e.what());
  } catch (const std::exception& e) {
    return abort("P3", "load", e.what());
  }
  log("P3", "done", std::to_string(result.records.size()) + " records");

  // P4: aggregate.
  log("P4", "start", "collecting results");
  if (!result.records.empty()) {
    result.summary = metrics::summarize(result.records, c.workload.timeout_s);
  }
  log("P4", "summary",
      "total=" + std::to_string(result.summary.total_requests) +
          " failed=" + std::to_string(result.summary.failed_requests));

  // P5: remove faults, restore a clean state, stabilize, and re-validate.
  log("P5", "start", "recovery");
  for (const auto& h : window_handles) {
    if (h) backend.remove_fault(*h);  // removal is idempotent
  }
  log("P5", "faults-removed");
  try {
    const auto restart = health::restart_deployments(backend, ns);
    std::string detail = std::to_string(restart.deployments.size()) + " deployments";
    if (!restart.active_overlays.empty()) {
      detail += ", overlays still active: " + std::to_string(restart.active_overlays.size());
    }
    log("P5", "restart", detail);
    if (stabilization_s > 0) backend.wait_ms(stabilization_s * 1000.0);
    log("P5", "stabilized", std::to_string(stabilization_s) + " s");
    health::await_healthy(backend, ns, health::kDefaultIntervalMs,
                          policies.cluster_validation.max_attempts,
                          [&](int attempt, const health::HealthReport& r) {
                            log("P5", "check",
                                "attempt " + std::to_string(attempt) +
                                    (r.healthy ? " healthy" : " unhealthy"));
                          });
  } catch (const std::exception& e) {
    return abort("P5", "recovery", e.what());
  }
  log("P5", "complete",
      "active_schedules=" + std::to_string(backend.active_fault_schedules().size()));
  result.completed = true;
  return result;
}

CampaignResult run_campaign(const ExperimentPlan& plan, const BackendFactory& factory,
                            const ResultHook& on_result, const EventSink& sink) {
  const auto report = validate_plan(plan);
  if (!report.ok()) {
    std::string msg = "plan is not runnable:";
    for (const auto& v : report.violations) msg += "\n  - " + v;
    throw PlanError(msg);
  }

  CampaignResult campaign;
  campaign.plan_name = plan.name;
  campaign.started_at = utc_now();

  const auto cases = expand_campaign(plan);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto backend = factory(cases[i]);
    auto result = run_experiment(cases[i], *backend, plan.retries, plan.stabilization_s,
                                 "default", sink);
    const bool completed = result.completed;
    const std::string reason = result.abort_reason;
    campaign.results.push_back(std::move(result));
    if (on_result) on_result(cases[i], campaign.results.back());

    if (!completed) {
      campaign.aborted_cases.emplace_back(cases[i].case_id, reason);
      if (reason == "recovery") {
        // An experiment that cannot restore baseline poisons everything
        // after it; stop with partial results persisted.
        for (std::size_t j = i + 1; j < cases.size(); ++j) {
          campaign.unrun_cases.push_back(cases[j].case_id);
        }
        break;
      }
    }
  }
  campaign.finished_at = utc_now();
  return campaign;
}

BackendFactory sim_backend_factory(const ExperimentPlan& plan) {
  const ClusterProfile profile = resolve_cluster_profile(plan);
  const DeploymentMode mode = plan.deployment_mode;
  return [profile, mode](const ExperimentCase& c) -> std::unique_ptr<ClusterBackend> {
    return std::make_unique<SimCluster>(profile, mode, derive_seed(c.seed, "cluster"));
  };
}

}  // namespace resil::orch
