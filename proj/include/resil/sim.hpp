// Deterministic discrete-event simulation of a cloud-edge container cluster.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "resil/backend.hpp"
#include "resil/types.hpp"

namespace resil {

struct ProcessedEvent {
  double t_ms = 0.0;
  std::string label;
};

// Virtual-time simulated cluster. All mutations flow through a single event
// queue; identical (profile, call sequence, seed) produces identical event
// logs and request outcomes. Request latency follows an analytic model:
// per traversed link, one latency sample plus serialization under any
// bandwidth cap, with one automatic retransmission on packet drop; per hop,
// the target pod's service time scaled by active cpu-stress overlays.
class SimCluster : public ClusterBackend {
 public:
  SimCluster(ClusterProfile profile, DeploymentMode mode, std::uint64_t seed);

  std::vector<NodeStatus> node_statuses() override;
  std::vector<PodStatus> pod_statuses(const std::string& ns) override;
  std::vector<ScheduleInfo> active_fault_schedules() override;
  FaultHandle apply_fault(const FaultSpec& spec) override;
  void remove_fault(const FaultHandle& handle) override;
  std::vector<RestartEntry> restart_deployments(const std::string& ns) override;
  RequestOutcome send_request(const ServiceTopology& topology, double timeout_s) override;
  double now_ms() override { return clock_ms_; }
  void wait_ms(double ms) override;

  // Applies every queued event with timestamp <= t_ms in (timestamp,
  // insertion) order and advances the clock to t_ms.
  std::vector<ProcessedEvent> step_until(double t_ms);

  const std::vector<ProcessedEvent>& event_log() const { return event_log_; }
  const ClusterProfile& profile() const { return profile_; }
  DeploymentMode mode() const { return mode_; }

  // Fixed per-hop payload charged against bandwidth caps (256 KB).
  static constexpr double kPayloadBits = 256.0 * 1024.0 * 8.0;
  // Injected delays jitter by +/-10%, mirroring the link jitter convention.
  static constexpr double kDelayJitter = 0.10;

 private:
  struct Node {
    std::string name;
    bool ready = true;
    bool is_edge = false;
  };
  struct Pod {
    std::string name;
    std::size_t deployment = 0;
    std::size_t node = 0;
    PodPhase phase = PodPhase::running;
    std::uint64_t gen = 0;  // guards stale recovery events
  };
  struct Overlay {
    std::uint64_t id = 0;
    FaultSpec spec;
    double on_ts_ms = 0.0;
    std::vector<std::size_t> pods;   // affected pods (pod-scoped actions)
    std::vector<std::size_t> nodes;  // affected nodes (node-scoped actions)
  };
  struct Event {
    double t_ms = 0.0;
    std::uint64_t seq = 0;
    std::string label;
    std::function<void()> fn;
  };
  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      if (a.t_ms != b.t_ms) return a.t_ms > b.t_ms;
      return a.seq > b.seq;
    }
  };

  void schedule(double t_ms, std::string label, std::function<void()> fn);
  void kill_pod(std::size_t pod_idx, PodPhase phase, double recover_after_ms);
  void check_namespace(const std::string& ns) const;
  double service_time_ms(std::size_t pod_idx);
  bool crosses_partition(std::size_t node_a, std::size_t node_b) const;

  ClusterProfile profile_;
  DeploymentMode mode_;
  double clock_ms_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_handle_ = 1;
  std::uint64_t select_seed_base_ = 0;
  std::mt19937_64 route_rng_;
  std::vector<Node> nodes_;
  std::vector<Pod> pods_;
  std::map<std::string, std::size_t> node_index_;
  std::map<std::string, std::size_t> deployment_index_;
  std::vector<std::vector<std::size_t>> deployment_pods_;
  std::map<std::uint64_t, Overlay> overlays_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::vector<ProcessedEvent> event_log_;
};

}  // namespace resil
