// Experiment plan parsing, validation, and campaign expansion.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "resil/types.hpp"

namespace resil {

enum class BackendKind { sim, remote };
std::string to_string(BackendKind b);
BackendKind backend_kind_from_string(const std::string& s);

struct RetryPolicy {
  int max_attempts = 3;
  double backoff_initial_ms = 1000.0;
  double backoff_multiplier = 2.0;

  bool operator==(const RetryPolicy&) const = default;
};

struct RetryPolicySet {
  RetryPolicy request_send;
  RetryPolicy fault_injection;
  RetryPolicy load_generation;
  RetryPolicy cluster_validation;

  bool operator==(const RetryPolicySet&) const = default;
};

// One entry of the plan's fault_types list: an action plus optional
// per-fault overrides for activation timing and target scoping.
struct FaultTypeEntry {
  FaultAction action = FaultAction::network_delay;
  double duration_s = 3.0;
  double trigger_every_s = 3.0;
  // Explicit target names; empty means every deployment of the topology
  // (or every worker node for node-scoped actions).
  std::vector<std::string> targets;

  bool operator==(const FaultTypeEntry&) const = default;
};

// One entry of workload_modes: a mode plus optional rate/burst overrides.
struct WorkloadModeEntry {
  WorkloadMode mode = WorkloadMode::constant;
  double rate_per_thread_rps = 5.0;
  double background_rps_per_thread = 1.0;
  int burst_size = 20;
  double burst_every_s = 30.0;

  bool operator==(const WorkloadModeEntry&) const = default;
};

struct ExperimentPlan {
  std::string name;
  BackendKind backend = BackendKind::sim;
  std::string cluster_profile = "4node";
  TopologyKind topology = TopologyKind::monolith;
  int chain_hops = 3;  // meaningful when topology == chain
  DeploymentMode deployment_mode = DeploymentMode::cloud;
  std::vector<FaultTypeEntry> fault_types;
  std::vector<int> intensities;
  std::vector<WorkloadModeEntry> workload_modes;
  std::vector<int> thread_counts;
  std::vector<double> timeouts_s;
  double window_s = 60.0;
  std::uint64_t seed = 1;
  RetryPolicySet retries;
  double stabilization_s = 30.0;

  bool operator==(const ExperimentPlan&) const = default;
};

// One expanded cell of the campaign cross-product.
struct ExperimentCase {
  std::string case_id;
  std::uint64_t ordinal = 0;
  FaultSpec fault;
  int intensity = 25;
  WorkloadSpec workload;
  DeploymentMode deployment_mode = DeploymentMode::cloud;
  ServiceTopology topology;
  std::uint64_t seed = 0;
};

class PlanError : public std::runtime_error {
 public:
  explicit PlanError(const std::string& msg) : std::runtime_error(msg) {}
  PlanError(const std::string& msg, int line, int column)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_ = -1;
  int column_ = -1;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Parses a plan document. Unset optional keys take documented defaults;
// unknown keys, syntax errors, and out-of-range values throw PlanError.
ExperimentPlan parse_plan(const std::string& text);

// Canonical plan text; parse_plan(serialize_plan(p)) == p for valid plans.
std::string serialize_plan(const ExperimentPlan& plan);

// Collects constraint violations; the plan is runnable iff the report is empty.
ValidationReport validate_plan(const ExperimentPlan& plan);

// Cartesian expansion over fault_types x intensities x workload_modes x
// thread_counts x timeouts_s, outer to inner, in the plan's list order.
// Byte-identical across re-expansions of the same plan.
std::vector<ExperimentCase> expand_campaign(const ExperimentPlan& plan);

// Resolves the plan's profile name against the built-in profile registry
// and instantiates the topology's deployments into it.
ClusterProfile resolve_cluster_profile(const ExperimentPlan& plan);

ServiceTopology topology_of(const ExperimentPlan& plan);

// Node names for a profile, "node-1".."node-N".
std::vector<std::string> node_names(const ClusterProfile& profile);

}  // namespace resil
