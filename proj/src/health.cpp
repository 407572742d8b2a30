#include "resil/health.hpp"

namespace resil::health {

HealthReport check_health(ClusterBackend& backend, const std::string& ns) {
  HealthReport report;
  report.checked_at_ms = backend.now_ms();

  for (const auto& node : backend.node_statuses()) {
    if (!node.ready) report.node_failures.push_back(node.name);
  }
  for (const auto& sched : backend.active_fault_schedules()) {
    report.active_schedules.push_back(sched.action + "#" + std::to_string(sched.id));
  }
  for (const auto& pod : backend.pod_statuses(ns)) {
    if (pod.ready_containers != pod.total_containers) {
      report.pod_failures.push_back({pod.name, pod.ready_fraction()});
    }
  }
  report.healthy = report.node_failures.empty() && report.active_schedules.empty() &&
                   report.pod_failures.empty();
  return report;
}

HealthReport await_healthy(ClusterBackend& backend, const std::string& ns,
                           double interval_ms, int max_attempts,
                           const std::function<void(int, const HealthReport&)>& on_check) {
  if (interval_ms <= 0) throw std::invalid_argument("interval_ms must be > 0");
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");

  HealthReport report;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    report = check_health(backend, ns);
    if (on_check) on_check(attempt, report);
    if (report.healthy) return report;
    if (attempt < max_attempts) backend.wait_ms(interval_ms);
  }
  throw HealthWaitExhausted(max_attempts, std::move(report));
}

RestartReport restart_deployments(ClusterBackend& backend, const std::string& ns) {
  RestartReport report;
  for (const auto& sched : backend.active_fault_schedules()) {
    report.active_overlays.push_back(sched.action + "#" + std::to_string(sched.id));
  }
  report.deployments = backend.restart_deployments(ns);
  return report;
}

}  // namespace resil::health
