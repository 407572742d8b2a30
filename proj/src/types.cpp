#include "resil/types.hpp"

namespace resil {

std::string to_string(FaultAction a) {
  switch (a) {
    case FaultAction::container_kill: return "container-kill";
    case FaultAction::pod_kill: return "pod-kill";
    case FaultAction::network_delay: return "network-delay";
    case FaultAction::network_loss: return "network-loss";
    case FaultAction::network_bandwidth: return "network-bandwidth";
    case FaultAction::network_partition: return "network-partition";
    case FaultAction::cpu_stress: return "cpu-stress";
    case FaultAction::node_kill: return "node-kill";
  }
  return "unknown";
}

FaultAction fault_action_from_string(const std::string& s) {
  if (s == "container-kill") return FaultAction::container_kill;
  if (s == "pod-kill") return FaultAction::pod_kill;
  if (s == "network-delay") return FaultAction::network_delay;
  if (s == "network-loss") return FaultAction::network_loss;
  if (s == "network-bandwidth") return FaultAction::network_bandwidth;
  if (s == "network-partition") return FaultAction::network_partition;
  if (s == "cpu-stress") return FaultAction::cpu_stress;
  if (s == "node-kill") return FaultAction::node_kill;
  throw std::invalid_argument("unknown fault action: " + s);
}

std::string to_string(WorkloadMode m) {
  switch (m) {
    case WorkloadMode::constant: return "constant";
    case WorkloadMode::concurrent: return "concurrent";
    case WorkloadMode::piggyback: return "piggyback";
  }
  return "unknown";
}

WorkloadMode workload_mode_from_string(const std::string& s) {
  if (s == "constant") return WorkloadMode::constant;
  if (s == "concurrent") return WorkloadMode::concurrent;
  if (s == "piggyback") return WorkloadMode::piggyback;
  throw std::invalid_argument("unknown workload mode: " + s);
}

std::string to_string(DeploymentMode m) {
  return m == DeploymentMode::cloud ? "cloud" : "cloud_edge";
}

DeploymentMode deployment_mode_from_string(const std::string& s) {
  if (s == "cloud") return DeploymentMode::cloud;
  if (s == "cloud_edge") return DeploymentMode::cloud_edge;
  throw std::invalid_argument("unknown deployment mode: " + s);
}

std::string to_string(TopologyKind k) {
  return k == TopologyKind::monolith ? "monolith" : "chain";
}

std::string to_string(RequestStatus s) {
  switch (s) {
    case RequestStatus::success: return "success";
    case RequestStatus::timeout: return "timeout";
    case RequestStatus::connection_error: return "connection_error";
    case RequestStatus::server_error: return "server_error";
  }
  return "unknown";
}

RequestStatus request_status_from_string(const std::string& s) {
  if (s == "success") return RequestStatus::success;
  if (s == "timeout") return RequestStatus::timeout;
  if (s == "connection_error") return RequestStatus::connection_error;
  if (s == "server_error") return RequestStatus::server_error;
  throw std::invalid_argument("unknown request status: " + s);
}

std::string to_string(PodPhase p) {
  switch (p) {
    case PodPhase::running: return "Running";
    case PodPhase::restarting: return "Restarting";
    case PodPhase::rescheduling: return "Rescheduling";
    case PodPhase::gone: return "Gone";
  }
  return "unknown";
}

PodPhase pod_phase_from_string(const std::string& s) {
  if (s == "Running") return PodPhase::running;
  if (s == "Restarting") return PodPhase::restarting;
  if (s == "Rescheduling") return PodPhase::rescheduling;
  if (s == "Gone") return PodPhase::gone;
  throw std::invalid_argument("unknown pod phase: " + s);
}

bool targets_nodes(FaultAction a) {
  return a == FaultAction::node_kill || a == FaultAction::network_partition;
}

}  // namespace resil
