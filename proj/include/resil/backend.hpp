// Cluster backend abstraction shared by the simulator and the remote adapter.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resil/types.hpp"

namespace resil {

struct NodeStatus {
  std::string name;
  bool ready = true;
  bool is_edge = false;
};

struct PodStatus {
  std::string name;
  std::string deployment;
  std::string node;
  PodPhase phase = PodPhase::running;
  int ready_containers = 1;
  int total_containers = 1;

  std::string ready_fraction() const {
    return std::to_string(ready_containers) + "/" + std::to_string(total_containers);
  }
};

struct ScheduleInfo {
  std::uint64_t id = 0;
  std::string action;
  double on_ts_ms = 0.0;
};

struct RestartEntry {
  std::string deployment;
  bool restarted = false;
};

// Single point of contact with a cluster. Calls are atomic with respect to
// the simulator's event queue; the remote adapter surfaces transport
// failures as TransportError (retryable).
class ClusterBackend {
 public:
  virtual ~ClusterBackend() = default;

  virtual std::vector<NodeStatus> node_statuses() = 0;
  virtual std::vector<PodStatus> pod_statuses(const std::string& ns) = 0;
  virtual std::vector<ScheduleInfo> active_fault_schedules() = 0;
  virtual FaultHandle apply_fault(const FaultSpec& spec) = 0;
  virtual void remove_fault(const FaultHandle& handle) = 0;
  virtual std::vector<RestartEntry> restart_deployments(const std::string& ns) = 0;
  virtual RequestOutcome send_request(const ServiceTopology& topology, double timeout_s) = 0;

  // Clock the experiment is timed against: virtual for the simulator,
  // monotonic wall time for the remote adapter.
  virtual double now_ms() = 0;
  virtual void wait_ms(double ms) = 0;
};

}  // namespace resil
