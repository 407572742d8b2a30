// Cluster validation and recovery: readiness checks, bounded waiting, and
// deployment restarts.
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "resil/backend.hpp"

namespace resil::health {

inline constexpr double kDefaultIntervalMs = 5000.0;
inline constexpr int kDefaultMaxAttempts = 60;

struct PodFailure {
  std::string pod;
  std::string ready_fraction;
};

struct HealthReport {
  bool healthy = false;
  std::vector<std::string> node_failures;
  std::vector<std::string> active_schedules;
  std::vector<PodFailure> pod_failures;
  double checked_at_ms = 0.0;
};

class HealthWaitExhausted : public std::runtime_error {
 public:
  HealthWaitExhausted(int attempts, HealthReport last)
      : std::runtime_error("cluster not healthy after " + std::to_string(attempts) +
                           " checks"),
        attempts_(attempts),
        last_(std::move(last)) {}

  int attempts() const { return attempts_; }
  const HealthReport& last_report() const { return last_; }

 private:
  int attempts_;
  HealthReport last_;
};

// One consistent snapshot: node readiness, absence of fault schedules, and
// pod readiness fractions are validated collectively.
HealthReport check_health(ClusterBackend& backend, const std::string& ns);

// Polls until healthy, spacing checks interval_ms apart. Performs exactly
// max_attempts checks before throwing HealthWaitExhausted with the final
// report attached.
HealthReport await_healthy(ClusterBackend& backend, const std::string& ns,
                           double interval_ms = kDefaultIntervalMs,
                           int max_attempts = kDefaultMaxAttempts,
                           const std::function<void(int, const HealthReport&)>& on_check = {});

struct RestartReport {
  std::vector<RestartEntry> deployments;
  // Fault overlays that were still active when the restart was issued.
  std::vector<std::string> active_overlays;
};

// Restarts every deployment in the namespace; restarts proceed in parallel,
// so total recovery time is the slowest deployment's delay, not the sum.
RestartReport restart_deployments(ClusterBackend& backend, const std::string& ns);

}  // namespace resil::health
