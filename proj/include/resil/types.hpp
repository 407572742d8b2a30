// Shared domain types for the resilience evaluation engine.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace resil {

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

enum class FaultAction {
  container_kill,
  pod_kill,
  network_delay,
  network_loss,
  network_bandwidth,
  network_partition,
  cpu_stress,
  node_kill,
};

enum class WorkloadMode { constant, concurrent, piggyback };

enum class DeploymentMode { cloud, cloud_edge };

enum class TopologyKind { monolith, chain };

enum class RequestStatus { success, timeout, connection_error, server_error };

enum class PodPhase { running, restarting, rescheduling, gone };

std::string to_string(FaultAction a);
std::string to_string(WorkloadMode m);
std::string to_string(DeploymentMode m);
std::string to_string(TopologyKind k);
std::string to_string(RequestStatus s);
std::string to_string(PodPhase p);

FaultAction fault_action_from_string(const std::string& s);
WorkloadMode workload_mode_from_string(const std::string& s);
DeploymentMode deployment_mode_from_string(const std::string& s);
RequestStatus request_status_from_string(const std::string& s);
PodPhase pod_phase_from_string(const std::string& s);

// True for actions whose eligible targets are nodes rather than deployments.
bool targets_nodes(FaultAction a);

// ---------------------------------------------------------------------------
// Cluster description
// ---------------------------------------------------------------------------

struct LinkProfile {
  double base_latency_ms = 1.0;
  double jitter_fraction = 0.0;  // relative uniform half-width on latency
  double drop_prob = 0.0;
  std::optional<double> bandwidth_mbps;  // empty = unlimited

  bool operator==(const LinkProfile&) const = default;
};

struct DeploymentSpec {
  std::string name;
  int replicas = 2;
  double base_service_time_ms = 50.0;
  // Relative uniform half-width on per-request service time. Zero keeps the
  // service time exact; built-in profiles use a small nonzero value so that
  // baseline latency distributions have genuine spread.
  double service_jitter_fraction = 0.0;
  double restart_delay_ms = 2000.0;
  double reschedule_delay_ms = 10000.0;

  bool operator==(const DeploymentSpec&) const = default;
};

struct ClusterProfile {
  std::string name = "4node";
  int worker_nodes = 4;
  int edge_nodes = 1;  // only instantiated in cloud_edge mode
  LinkProfile edge_link{200.0, 0.10, 0.10, std::nullopt};
  LinkProfile cloud_link{1.0, 0.0, 0.0, std::nullopt};
  std::vector<std::string> namespaces{"default"};
  std::vector<DeploymentSpec> deployments;
  int max_pods_per_node = 16;
  // Reschedule delay applied to pods displaced by a node kill.
  double node_kill_reschedule_ms = 15000.0;

  bool operator==(const ClusterProfile&) const = default;
};

struct ServiceTopology {
  TopologyKind kind = TopologyKind::monolith;
  std::vector<std::string> hops;  // deployment names; monolith => length 1

  bool operator==(const ServiceTopology&) const = default;
};

// ---------------------------------------------------------------------------
// Faults
// ---------------------------------------------------------------------------

// Exactly one facet is populated for network/cpu actions; all empty for
// kill and partition actions (intensity drives targeting scope instead).
struct FaultMagnitude {
  std::optional<double> delay_ms;
  std::optional<double> drop_prob;
  std::optional<double> bandwidth_mbps;
  std::optional<double> cpu_factor;

  bool is_none() const {
    return !delay_ms && !drop_prob && !bandwidth_mbps && !cpu_factor;
  }
  bool operator==(const FaultMagnitude&) const = default;
};

struct FaultSpec {
  FaultAction action = FaultAction::network_delay;
  std::string mode = "fixed-percent";
  double value = 100.0;  // percent of eligible targets to affect
  std::vector<std::string> targets;  // deployments, or nodes for node actions
  FaultMagnitude magnitude;
  double duration_s = 3.0;
  double trigger_every_s = 3.0;

  bool operator==(const FaultSpec&) const = default;
};

struct ActivationWindow {
  double on_ms = 0.0;
  double off_ms = 0.0;

  bool operator==(const ActivationWindow&) const = default;
};

struct FaultTimeline {
  std::vector<ActivationWindow> activations;
  bool overlapping = false;  // duration exceeds trigger period
};

struct FaultHandle {
  std::uint64_t id = 0;
  double on_ts_ms = 0.0;
};

// ---------------------------------------------------------------------------
// Requests and workload
// ---------------------------------------------------------------------------

struct RequestOutcome {
  RequestStatus status = RequestStatus::success;
  std::optional<double> latency_ms;        // present iff success
  std::optional<std::string> failing_hop;  // present iff not success
  // Time the caller observed before the outcome became known: equals
  // latency_ms on success, the full budget on timeout, or the detection
  // time on connection errors. Drives closed-loop pacing.
  double elapsed_ms = 0.0;
};

struct WorkloadSpec {
  WorkloadMode mode = WorkloadMode::constant;
  int threads = 1;
  double rate_per_thread_rps = 5.0;  // constant + piggyback background pacing
  double timeout_s = 5.0;
  double window_s = 60.0;
  // piggyback parameters
  double background_rps_per_thread = 1.0;
  int burst_size = 20;
  double burst_every_s = 30.0;

  bool operator==(const WorkloadSpec&) const = default;
};

struct RequestRecord {
  std::string experiment_id;
  std::uint64_t request_id = 0;      // monotone per experiment
  double send_ts_ms = 0.0;           // experiment-relative
  std::optional<double> latency_ms;  // success only
  RequestStatus outcome = RequestStatus::success;
  std::string error_class;  // normalized class, empty on success
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// Transient transport-level failure; eligible for retry policies.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contract or state violation on the backend; not retryable.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace resil
