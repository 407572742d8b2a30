#include "resil/sim.hpp"

#include <algorithm>
#include <cmath>

#include "resil/fault.hpp"
#include "resil/rng.hpp"

namespace resil {

SimCluster::SimCluster(ClusterProfile profile, DeploymentMode mode, std::uint64_t seed)
    : profile_(std::move(profile)),
      mode_(mode),
      select_seed_base_(derive_seed(seed, "target-select")),
      route_rng_(derive_seed(seed, "route")) {
  if (profile_.worker_nodes < 1) throw BackendError("cluster profile needs >= 1 worker node");
  if (profile_.edge_nodes < 0 || profile_.edge_nodes > profile_.worker_nodes)
    throw BackendError("edge_nodes must be within [0, worker_nodes]");

  const int edge_count = mode_ == DeploymentMode::cloud_edge ? profile_.edge_nodes : 0;
  for (int i = 0; i < profile_.worker_nodes; ++i) {
    Node n;
    n.name = "node-" + std::to_string(i + 1);
    n.is_edge = i >= profile_.worker_nodes - edge_count;
    node_index_[n.name] = nodes_.size();
    nodes_.push_back(std::move(n));
  }

  // Edge-first placement: in cloud_edge mode application pods run on the
  // edge nodes; in cloud mode they spread over the whole cluster.
  std::vector<std::size_t> placement;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (edge_count == 0 || nodes_[i].is_edge) placement.push_back(i);
  }

  std::size_t total_replicas = 0;
  for (const auto& d : profile_.deployments) {
    if (d.replicas < 1) throw BackendError("deployment '" + d.name + "' needs >= 1 replica");
    total_replicas += static_cast<std::size_t>(d.replicas);
  }
  if (total_replicas > placement.size() * static_cast<std::size_t>(profile_.max_pods_per_node)) {
    throw BackendError("replicas exceed schedulable capacity (" +
                       std::to_string(total_replicas) + " pods, " +
                       std::to_string(placement.size() * profile_.max_pods_per_node) +
                       " slots)");
  }

  std::size_t rr = 0;
  for (std::size_t di = 0; di < profile_.deployments.size(); ++di) {
    const auto& d = profile_.deployments[di];
    deployment_index_[d.name] = di;
    deployment_pods_.emplace_back();
    for (int r = 0; r < d.replicas; ++r) {
      Pod p;
      p.name = d.name + "-" + std::to_string(r + 1);
      p.deployment = di;
      p.node = placement[rr++ % placement.size()];
      deployment_pods_[di].push_back(pods_.size());
      pods_.push_back(std::move(p));
    }
  }
}

void SimCluster::schedule(double t_ms, std::string label, std::function<void()> fn) {
  queue_.push(Event{t_ms, next_seq_++, std::move(label), std::move(fn)});
}

std::vector<ProcessedEvent> SimCluster::step_until(double t_ms) {
  if (t_ms < clock_ms_) throw BackendError("step_until would move the clock backwards");
  std::vector<ProcessedEvent> processed;
  while (!queue_.empty() && queue_.top().t_ms <= t_ms) {
    Event ev = queue_.top();
    queue_.pop();
    clock_ms_ = ev.t_ms;
    ev.fn();
    processed.push_back({ev.t_ms, ev.label});
    event_log_.push_back(processed.back());
  }
  clock_ms_ = t_ms;
  return processed;
}

void SimCluster::wait_ms(double ms) {
  if (ms <= 0) return;
  step_until(clock_ms_ + ms);
}

void SimCluster::check_namespace(const std::string& ns) const {
  if (std::find(profile_.namespaces.begin(), profile_.namespaces.end(), ns) ==
      profile_.namespaces.end()) {
    throw BackendError("unknown namespace '" + ns + "'");
  }
}

std::vector<NodeStatus> SimCluster::node_statuses() {
  std::vector<NodeStatus> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back({n.name, n.ready, n.is_edge});
  return out;
}

std::vector<PodStatus> SimCluster::pod_statuses(const std::string& ns) {
  check_namespace(ns);
  std::vector<PodStatus> out;
  out.reserve(pods_.size());
  for (const auto& p : pods_) {
    PodStatus s;
    s.name = p.name;
    s.deployment = profile_.deployments[p.deployment].name;
    s.node = nodes_[p.node].name;
    s.phase = p.phase;
    s.ready_containers = p.phase == PodPhase::running ? 1 : 0;
    s.total_containers = 1;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ScheduleInfo> SimCluster::active_fault_schedules() {
  std::vector<ScheduleInfo> out;
  for (const auto& [id, ov] : overlays_) out.push_back({id, to_string(ov.spec.action), ov.on_ts_ms});
  return out;
}

void SimCluster::kill_pod(std::size_t pod_idx, PodPhase phase, double recover_after_ms) {
  Pod& pod = pods_[pod_idx];
  pod.phase = phase;
  const std::uint64_t gen = ++pod.gen;
  schedule(clock_ms_ + recover_after_ms, "pod-recover:" + pod.name, [this, pod_idx, gen] {
    if (pods_[pod_idx].gen == gen) pods_[pod_idx].phase = PodPhase::running;
  });
}

FaultHandle SimCluster::apply_fault(const FaultSpec& spec) {
  if (spec.targets.empty()) throw BackendError("fault spec has no targets");

  Overlay ov;
  ov.id = next_handle_++;
  ov.spec = spec;
  ov.on_ts_ms = clock_ms_;
  const std::uint64_t select_seed = mix_seed(select_seed_base_, ov.id);

  if (targets_nodes(spec.action)) {
    for (const auto& t : spec.targets) {
      if (!node_index_.count(t)) throw BackendError("unknown fault target '" + t + "'");
    }
    for (const auto& name : fault::select_targets(spec.targets, spec.value, select_seed)) {
      ov.nodes.push_back(node_index_.at(name));
    }
    std::sort(ov.nodes.begin(), ov.nodes.end());
  } else {
    std::vector<std::string> eligible;
    std::map<std::string, std::size_t> pod_index;
    for (const auto& t : spec.targets) {
      if (!deployment_index_.count(t)) throw BackendError("unknown fault target '" + t + "'");
    }
    for (std::size_t i = 0; i < pods_.size(); ++i) {
      const auto& dep_name = profile_.deployments[pods_[i].deployment].name;
      if (std::find(spec.targets.begin(), spec.targets.end(), dep_name) != spec.targets.end()) {
        eligible.push_back(pods_[i].name);
        pod_index[pods_[i].name] = i;
      }
    }
    for (const auto& name : fault::select_targets(eligible, spec.value, select_seed)) {
      ov.pods.push_back(pod_index.at(name));
    }
    std::sort(ov.pods.begin(), ov.pods.end());
  }

  switch (spec.action) {
    case FaultAction::container_kill:
      for (auto idx : ov.pods) {
        kill_pod(idx, PodPhase::restarting,
                 profile_.deployments[pods_[idx].deployment].restart_delay_ms);
      }
      break;
    case FaultAction::pod_kill:
      for (auto idx : ov.pods) {
        kill_pod(idx, PodPhase::rescheduling,
                 profile_.deployments[pods_[idx].deployment].reschedule_delay_ms);
      }
      break;
    case FaultAction::node_kill:
      for (auto n : ov.nodes) {
        nodes_[n].ready = false;
        for (std::size_t i = 0; i < pods_.size(); ++i) {
          if (pods_[i].node == n) {
            pods_[i].phase = PodPhase::rescheduling;
            ++pods_[i].gen;  // rescheduling starts once the fault lifts
          }
        }
      }
      break;
    default:
      break;  // network and cpu overlays act through routing only
  }

  const FaultHandle handle{ov.id, ov.on_ts_ms};
  overlays_.emplace(ov.id, std::move(ov));
  return handle;
}

void SimCluster::remove_fault(const FaultHandle& handle) {
  auto it = overlays_.find(handle.id);
  if (it == overlays_.end()) return;  // idempotent
  const Overlay ov = std::move(it->second);
  overlays_.erase(it);

  if (ov.spec.action == FaultAction::node_kill) {
    for (auto n : ov.nodes) {
      nodes_[n].ready = true;
      for (std::size_t i = 0; i < pods_.size(); ++i) {
        if (pods_[i].node == n && pods_[i].phase == PodPhase::rescheduling) {
          const std::uint64_t gen = pods_[i].gen;
          schedule(clock_ms_ + profile_.node_kill_reschedule_ms,
                   "pod-recover:" + pods_[i].name, [this, i, gen] {
                     if (pods_[i].gen == gen) pods_[i].phase = PodPhase::running;
                   });
        }
      }
    }
  }
}

std::vector<RestartEntry> SimCluster::restart_deployments(const std::string& ns) {
  check_namespace(ns);
  std::vector<RestartEntry> out;
  for (std::size_t di = 0; di < profile_.deployments.size(); ++di) {
    for (auto idx : deployment_pods_[di]) {
      kill_pod(idx, PodPhase::restarting, profile_.deployments[di].restart_delay_ms);
    }
    out.push_back({profile_.deployments[di].name, true});
  }
  return out;
}

double SimCluster::service_time_ms(std::size_t pod_idx) {
  const auto& dep = profile_.deployments[pods_[pod_idx].deployment];
  double t = dep.base_service_time_ms;
  if (dep.service_jitter_fraction > 0.0) {
    std::uniform_real_distribution<double> j(1.0 - dep.service_jitter_fraction,
                                             1.0 + dep.service_jitter_fraction);
    t *= j(route_rng_);
  }
  for (const auto& [id, ov] : overlays_) {
    if (!ov.spec.magnitude.cpu_factor) continue;
    if (std::binary_search(ov.pods.begin(), ov.pods.end(), pod_idx)) {
      t *= *ov.spec.magnitude.cpu_factor;
    }
  }
  return t;
}

bool SimCluster::crosses_partition(std::size_t node_a, std::size_t node_b) const {
  if (node_a == node_b) return false;
  for (const auto& [id, ov] : overlays_) {
    if (ov.spec.action != FaultAction::network_partition) continue;
    const bool a_in = std::binary_search(ov.nodes.begin(), ov.nodes.end(), node_a);
    const bool b_in = std::binary_search(ov.nodes.begin(), ov.nodes.end(), node_b);
    if (a_in != b_in) return true;
  }
  return false;
}

RequestOutcome SimCluster::send_request(const ServiceTopology& topology, double timeout_s) {
  const double budget_ms = timeout_s * 1000.0;
  auto& rng = route_rng_;

  // One pod per hop, chosen uniformly over the deployment's replicas.
  std::vector<std::size_t> path;
  path.reserve(topology.hops.size());
  for (const auto& hop : topology.hops) {
    auto it = deployment_index_.find(hop);
    if (it == deployment_index_.end()) throw BackendError("unknown deployment '" + hop + "'");
    const auto& candidates = deployment_pods_[it->second];
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    path.push_back(candidates[pick(rng)]);
  }

  double elapsed = 0.0;
  RequestOutcome out;
  const auto fail = [&](RequestStatus status, std::size_t hop, double at_ms) {
    out.status = status;
    out.failing_hop = topology.hops[hop];
    out.elapsed_ms = at_ms;
  };

  // One link traversal toward path position `pos`. Position 0 is the
  // client-to-first-hop leg: external ingress, exempt from cluster-internal
  // partitions. Returns false with `out` populated on failure.
  const auto traverse = [&](std::size_t pos) -> bool {
    const Pod& dst = pods_[path[pos]];
    const bool inter_pod = pos > 0;
    if (inter_pod && crosses_partition(pods_[path[pos - 1]].node, dst.node)) {
      fail(RequestStatus::timeout, pos, budget_ms);
      return false;
    }

    bool edge = nodes_[dst.node].is_edge;
    if (inter_pod) edge = edge || nodes_[pods_[path[pos - 1]].node].is_edge;
    const LinkProfile& link = edge ? profile_.edge_link : profile_.cloud_link;

    // Fold active network overlays touching either endpoint pod.
    double pass_prob = 1.0 - link.drop_prob;
    double bandwidth = link.bandwidth_mbps.value_or(0.0);  // 0 = unlimited
    std::vector<double> injected_delays;
    for (const auto& [id, ov] : overlays_) {
      const auto& m = ov.spec.magnitude;
      if (!m.delay_ms && !m.drop_prob && !m.bandwidth_mbps) continue;
      const bool affected =
          std::binary_search(ov.pods.begin(), ov.pods.end(), path[pos]) ||
          (inter_pod && std::binary_search(ov.pods.begin(), ov.pods.end(), path[pos - 1]));
      if (!affected) continue;
      if (m.delay_ms) injected_delays.push_back(*m.delay_ms);
      if (m.drop_prob) pass_prob *= 1.0 - *m.drop_prob;
      if (m.bandwidth_mbps) {
        bandwidth = bandwidth == 0.0 ? *m.bandwidth_mbps : std::min(bandwidth, *m.bandwidth_mbps);
      }
    }
    const double drop_prob = 1.0 - pass_prob;
    const double serialization_ms =
        bandwidth > 0.0 ? kPayloadBits / (bandwidth * 1e6) * 1000.0 : 0.0;

    const auto attempt_cost = [&] {
      double c = sample_link_latency(link, rng) + serialization_ms;
      for (double d : injected_delays) {
        std::uniform_real_distribution<double> j(d * (1.0 - kDelayJitter),
                                                 d * (1.0 + kDelayJitter));
        c += j(rng);
      }
      return c;
    };
    const auto dropped = [&] {
      if (drop_prob <= 0.0) return false;
      if (drop_prob >= 1.0) return true;
      return uniform01(rng) < drop_prob;
    };

    if (dropped()) {
      elapsed += attempt_cost();  // the lost attempt still consumes time
      if (dropped()) {
        fail(RequestStatus::timeout, pos, budget_ms);
        return false;
      }
      elapsed += attempt_cost();  // retransmission
    } else {
      elapsed += attempt_cost();
    }
    if (elapsed > budget_ms) {
      fail(RequestStatus::timeout, pos, budget_ms);
      return false;
    }
    return true;
  };

  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!traverse(i)) return out;
    const Pod& pod = pods_[path[i]];
    if (!nodes_[pod.node].ready || pod.phase != PodPhase::running) {
      fail(RequestStatus::connection_error, i, elapsed);
      return out;
    }
    elapsed += service_time_ms(path[i]);
    if (elapsed > budget_ms) {
      fail(RequestStatus::timeout, i, budget_ms);
      return out;
    }
  }
  for (std::size_t i = path.size(); i-- > 0;) {
    if (!traverse(i)) return out;
  }

  out.status = RequestStatus::success;
  out.latency_ms = elapsed;
  out.elapsed_ms = elapsed;
  return out;
}

}  // namespace resil
