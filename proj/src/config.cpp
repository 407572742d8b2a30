#include "resil/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "resil/fault.hpp"
#include "resil/rng.hpp"

namespace resil {

namespace {

const std::set<std::string> kTopLevelKeys = {
    "name",         "backend",       "cluster_profile", "topology",
    "deployment_mode", "fault_types", "intensities",     "workload_modes",
    "thread_counts", "timeouts_s",   "window_s",        "seed",
    "retries",      "stabilization_s"};

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& msg) {
  const auto mark = node.Mark();
  if (mark.line >= 0) throw PlanError(msg, mark.line + 1, mark.column + 1);
  throw PlanError(msg);
}

std::string key_of(const YAML::Node& key_node) {
  return key_node.as<std::string>();
}

template <typename T>
T scalar_as(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail_at(node, "invalid value for '" + key + "'");
  }
}

void check_map_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                    const std::string& context) {
  for (const auto& kv : node) {
    const std::string k = key_of(kv.first);
    if (!allowed.count(k)) {
      fail_at(kv.first, "unknown key '" + k + "' in " + context);
    }
  }
}

RetryPolicy parse_retry_policy(const YAML::Node& node, const std::string& name) {
  RetryPolicy p;
  if (!node.IsMap()) fail_at(node, "retries." + name + " must be a map");
  check_map_keys(node, {"max_attempts", "backoff_initial_ms", "backoff_multiplier"},
                 "retries." + name);
  if (node["max_attempts"]) p.max_attempts = scalar_as<int>(node["max_attempts"], name);
  if (node["backoff_initial_ms"])
    p.backoff_initial_ms = scalar_as<double>(node["backoff_initial_ms"], name);
  if (node["backoff_multiplier"])
    p.backoff_multiplier = scalar_as<double>(node["backoff_multiplier"], name);
  if (p.max_attempts < 1) fail_at(node, "retries." + name + ".max_attempts must be >= 1");
  if (p.backoff_multiplier < 1.0)
    fail_at(node, "retries." + name + ".backoff_multiplier must be >= 1.0");
  if (p.backoff_initial_ms < 0)
    fail_at(node, "retries." + name + ".backoff_initial_ms must be >= 0");
  return p;
}

FaultTypeEntry parse_fault_entry(const YAML::Node& node) {
  FaultTypeEntry e;
  if (node.IsScalar()) {
    try {
      e.action = fault_action_from_string(node.as<std::string>());
    } catch (const std::invalid_argument& ex) {
      fail_at(node, ex.what());
    }
    return e;
  }
  if (!node.IsMap()) fail_at(node, "fault_types entry must be an action name or a map");
  check_map_keys(node, {"action", "duration_s", "trigger_every_s", "targets"},
                 "fault_types entry");
  if (!node["action"]) fail_at(node, "fault_types entry missing 'action'");
  try {
    e.action = fault_action_from_string(node["action"].as<std::string>());
  } catch (const std::invalid_argument& ex) {
    fail_at(node["action"], ex.what());
  }
  if (node["duration_s"]) e.duration_s = scalar_as<double>(node["duration_s"], "duration_s");
  if (node["trigger_every_s"])
    e.trigger_every_s = scalar_as<double>(node["trigger_every_s"], "trigger_every_s");
  if (node["targets"]) {
    for (const auto& t : node["targets"]) e.targets.push_back(t.as<std::string>());
  }
  if (e.duration_s <= 0) fail_at(node, "fault duration_s must be > 0");
  if (e.trigger_every_s <= 0) fail_at(node, "fault trigger_every_s must be > 0");
  return e;
}

WorkloadModeEntry parse_workload_entry(const YAML::Node& node) {
  WorkloadModeEntry e;
  if (node.IsScalar()) {
    try {
      e.mode = workload_mode_from_string(node.as<std::string>());
    } catch (const std::invalid_argument& ex) {
      fail_at(node, ex.what());
    }
    return e;
  }
  if (!node.IsMap()) fail_at(node, "workload_modes entry must be a mode name or a map");
  check_map_keys(node,
                 {"mode", "rate_per_thread_rps", "background_rps_per_thread",
                  "burst_size", "burst_every_s"},
                 "workload_modes entry");
  if (!node["mode"]) fail_at(node, "workload_modes entry missing 'mode'");
  try {
    e.mode = workload_mode_from_string(node["mode"].as<std::string>());
  } catch (const std::invalid_argument& ex) {
    fail_at(node["mode"], ex.what());
  }
  if (node["rate_per_thread_rps"])
    e.rate_per_thread_rps = scalar_as<double>(node["rate_per_thread_rps"], "rate_per_thread_rps");
  if (node["background_rps_per_thread"])
    e.background_rps_per_thread =
        scalar_as<double>(node["background_rps_per_thread"], "background_rps_per_thread");
  if (node["burst_size"]) e.burst_size = scalar_as<int>(node["burst_size"], "burst_size");
  if (node["burst_every_s"])
    e.burst_every_s = scalar_as<double>(node["burst_every_s"], "burst_every_s");
  if (e.rate_per_thread_rps <= 0) fail_at(node, "rate_per_thread_rps must be > 0");
  if (e.background_rps_per_thread <= 0)
    fail_at(node, "background_rps_per_thread must be > 0");
  if (e.burst_size < 1) fail_at(node, "burst_size must be >= 1");
  if (e.burst_every_s <= 0) fail_at(node, "burst_every_s must be > 0");
  return e;
}

// Shortest stable text for a number: integer form when exact.
std::string fmt_num(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_';
  });
}

}  // namespace

std::string to_string(BackendKind b) {
  return b == BackendKind::sim ? "sim" : "remote";
}

BackendKind backend_kind_from_string(const std::string& s) {
  if (s == "sim") return BackendKind::sim;
  if (s == "remote" || s == "http") return BackendKind::remote;
  throw std::invalid_argument("unknown backend: " + s);
}

ExperimentPlan parse_plan(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw PlanError(std::string("syntax error: ") + e.msg, e.mark.line + 1,
                    e.mark.column + 1);
  }
  if (root.IsNull()) throw PlanError("empty plan document");
  if (!root.IsMap()) throw PlanError("plan document must be a key/value map");

  for (const auto& kv : root) {
    const std::string k = key_of(kv.first);
    if (!kTopLevelKeys.count(k)) fail_at(kv.first, "unknown key '" + k + "'");
  }

  ExperimentPlan plan;
  plan.name = root["name"] ? scalar_as<std::string>(root["name"], "name") : "plan";
  if (!is_identifier(plan.name)) fail_at(root["name"], "name must be an identifier");

  if (root["backend"]) {
    try {
      plan.backend = backend_kind_from_string(root["backend"].as<std::string>());
    } catch (const std::invalid_argument& ex) {
      fail_at(root["backend"], ex.what());
    }
  }
  if (root["cluster_profile"])
    plan.cluster_profile = scalar_as<std::string>(root["cluster_profile"], "cluster_profile");

  if (const auto topo = root["topology"]) {
    if (topo.IsScalar()) {
      const auto s = topo.as<std::string>();
      if (s == "monolith") {
        plan.topology = TopologyKind::monolith;
      } else if (s == "chain") {
        plan.topology = TopologyKind::chain;
      } else {
        fail_at(topo, "topology must be 'monolith' or {kind: chain, hops: k}");
      }
    } else if (topo.IsMap()) {
      check_map_keys(topo, {"kind", "hops"}, "topology");
      const auto kind = topo["kind"] ? topo["kind"].as<std::string>() : "";
      if (kind == "monolith") {
        plan.topology = TopologyKind::monolith;
      } else if (kind == "chain") {
        plan.topology = TopologyKind::chain;
        if (topo["hops"]) plan.chain_hops = scalar_as<int>(topo["hops"], "hops");
      } else {
        fail_at(topo, "topology.kind must be 'monolith' or 'chain'");
      }
    } else {
      fail_at(topo, "topology must be 'monolith' or {kind: chain, hops: k}");
    }
  }

  if (root["deployment_mode"]) {
    try {
      plan.deployment_mode =
          deployment_mode_from_string(root["deployment_mode"].as<std::string>());
    } catch (const std::invalid_argument& ex) {
      fail_at(root["deployment_mode"], ex.what());
    }
  }

  if (!root["fault_types"]) throw PlanError("missing required key 'fault_types'");
  for (const auto& n : root["fault_types"]) plan.fault_types.push_back(parse_fault_entry(n));
  if (plan.fault_types.empty()) fail_at(root["fault_types"], "fault_types must be non-empty");

  if (!root["intensities"]) throw PlanError("missing required key 'intensities'");
  for (const auto& n : root["intensities"]) {
    const int v = scalar_as<int>(n, "intensities");
    if (v <= 0 || v > 100) fail_at(n, "intensities out of range (0,100]");
    plan.intensities.push_back(v);
  }
  if (plan.intensities.empty()) fail_at(root["intensities"], "intensities must be non-empty");

  if (root["workload_modes"]) {
    for (const auto& n : root["workload_modes"])
      plan.workload_modes.push_back(parse_workload_entry(n));
    if (plan.workload_modes.empty())
      fail_at(root["workload_modes"], "workload_modes must be non-empty");
  } else {
    plan.workload_modes.push_back(WorkloadModeEntry{});
  }

  if (root["thread_counts"]) {
    for (const auto& n : root["thread_counts"]) {
      const int v = scalar_as<int>(n, "thread_counts");
      if (v < 1) fail_at(n, "thread_counts must be positive");
      plan.thread_counts.push_back(v);
    }
    if (plan.thread_counts.empty())
      fail_at(root["thread_counts"], "thread_counts must be non-empty");
  } else {
    plan.thread_counts.push_back(1);
  }

  if (root["timeouts_s"]) {
    for (const auto& n : root["timeouts_s"]) {
      const double v = scalar_as<double>(n, "timeouts_s");
      if (v < 1.0 || v > 10.0) fail_at(n, "timeouts_s out of range [1,10]");
      plan.timeouts_s.push_back(v);
    }
    if (plan.timeouts_s.empty()) fail_at(root["timeouts_s"], "timeouts_s must be non-empty");
  } else {
    plan.timeouts_s.push_back(5.0);
  }

  if (root["window_s"]) {
    plan.window_s = scalar_as<double>(root["window_s"], "window_s");
    if (plan.window_s <= 0) fail_at(root["window_s"], "window_s must be > 0");
  }
  if (root["seed"]) plan.seed = scalar_as<std::uint64_t>(root["seed"], "seed");

  if (const auto r = root["retries"]) {
    if (!r.IsMap()) fail_at(r, "retries must be a map");
    check_map_keys(
        r, {"request_send", "fault_injection", "load_generation", "cluster_validation"},
        "retries");
    if (r["request_send"]) plan.retries.request_send = parse_retry_policy(r["request_send"], "request_send");
    if (r["fault_injection"])
      plan.retries.fault_injection = parse_retry_policy(r["fault_injection"], "fault_injection");
    if (r["load_generation"])
      plan.retries.load_generation = parse_retry_policy(r["load_generation"], "load_generation");
    if (r["cluster_validation"])
      plan.retries.cluster_validation =
          parse_retry_policy(r["cluster_validation"], "cluster_validation");
  }

  if (root["stabilization_s"]) {
    plan.stabilization_s = scalar_as<double>(root["stabilization_s"], "stabilization_s");
    if (plan.stabilization_s < 0)
      fail_at(root["stabilization_s"], "stabilization_s must be >= 0");
  }

  return plan;
}

std::string serialize_plan(const ExperimentPlan& plan) {
  std::ostringstream out;
  out << "name: " << plan.name << "\n";
  out << "backend: " << to_string(plan.backend) << "\n";
  out << "cluster_profile: " << plan.cluster_profile << "\n";
  if (plan.topology == TopologyKind::monolith) {
    out << "topology: monolith\n";
  } else {
    out << "topology: {kind: chain, hops: " << plan.chain_hops << "}\n";
  }
  out << "deployment_mode: " << to_string(plan.deployment_mode) << "\n";
  out << "fault_types:\n";
  for (const auto& f : plan.fault_types) {
    out << "  - {action: " << to_string(f.action)
        << ", duration_s: " << fmt_num(f.duration_s)
        << ", trigger_every_s: " << fmt_num(f.trigger_every_s);
    if (!f.targets.empty()) {
      out << ", targets: [";
      for (size_t i = 0; i < f.targets.size(); ++i)
        out << (i ? ", " : "") << f.targets[i];
      out << "]";
    }
    out << "}\n";
  }
  out << "intensities: [";
  for (size_t i = 0; i < plan.intensities.size(); ++i)
    out << (i ? ", " : "") << plan.intensities[i];
  out << "]\n";
  out << "workload_modes:\n";
  for (const auto& w : plan.workload_modes) {
    out << "  - {mode: " << to_string(w.mode)
        << ", rate_per_thread_rps: " << fmt_num(w.rate_per_thread_rps)
        << ", background_rps_per_thread: " << fmt_num(w.background_rps_per_thread)
        << ", burst_size: " << w.burst_size
        << ", burst_every_s: " << fmt_num(w.burst_every_s) << "}\n";
  }
  out << "thread_counts: [";
  for (size_t i = 0; i < plan.thread_counts.size(); ++i)
    out << (i ? ", " : "") << plan.thread_counts[i];
  out << "]\n";
  out << "timeouts_s: [";
  for (size_t i = 0; i < plan.timeouts_s.size(); ++i)
    out << (i ? ", " : "") << fmt_num(plan.timeouts_s[i]);
  out << "]\n";
  out << "window_s: " << fmt_num(plan.window_s) << "\n";
  out << "seed: " << plan.seed << "\n";
  out << "retries:\n";
  const auto emit_policy = [&](const char* name, const RetryPolicy& p) {
    out << "  " << name << ": {max_attempts: " << p.max_attempts
        << ", backoff_initial_ms: " << fmt_num(p.backoff_initial_ms)
        << ", backoff_multiplier: " << fmt_num(p.backoff_multiplier) << "}\n";
  };
  emit_policy("request_send", plan.retries.request_send);
  emit_policy("fault_injection", plan.retries.fault_injection);
  emit_policy("load_generation", plan.retries.load_generation);
  emit_policy("cluster_validation", plan.retries.cluster_validation);
  out << "stabilization_s: " << fmt_num(plan.stabilization_s) << "\n";
  return out.str();
}

ValidationReport validate_plan(const ExperimentPlan& plan) {
  ValidationReport report;
  auto violation = [&](const std::string& msg) { report.violations.push_back(msg); };

  if (!is_identifier(plan.name)) violation("name must be a non-empty identifier");

  static const std::set<int> kIntensities = {25, 50, 75, 100};
  for (int i : plan.intensities) {
    if (!kIntensities.count(i)) {
      violation("intensity must be one of {25,50,75,100} (got " + std::to_string(i) + ")");
    }
  }
  if (plan.intensities.empty()) violation("intensities must be non-empty");

  static const std::set<int> kThreads = {1, 2, 4, 8, 16};
  for (int t : plan.thread_counts) {
    if (!kThreads.count(t)) {
      violation("thread count must be one of {1,2,4,8,16} (got " + std::to_string(t) + ")");
    }
  }
  if (plan.thread_counts.empty()) violation("thread_counts must be non-empty");

  for (double t : plan.timeouts_s) {
    if (t < 1.0 || t > 10.0) violation("timeouts_s out of range [1,10]");
  }
  if (plan.timeouts_s.empty()) violation("timeouts_s must be non-empty");
  if (plan.fault_types.empty()) violation("fault_types must be non-empty");
  if (plan.workload_modes.empty()) violation("workload_modes must be non-empty");
  if (plan.window_s <= 0) violation("window_s must be > 0");

  if (plan.topology == TopologyKind::chain) {
    if (plan.chain_hops < 1) {
      violation("hop count >= 1");
    } else if (plan.chain_hops < 2) {
      violation("chain topology requires hop count >= 2");
    }
  }

  bool profile_known = true;
  try {
    resolve_cluster_profile(plan);
  } catch (const PlanError& e) {
    profile_known = false;
    violation(e.what());
  }

  if (profile_known) {
    const auto topo = topology_of(plan);
    std::set<std::string> deployment_set(topo.hops.begin(), topo.hops.end());
    const auto nodes = node_names(resolve_cluster_profile(plan));
    std::set<std::string> node_set(nodes.begin(), nodes.end());
    for (const auto& f : plan.fault_types) {
      const auto& known = targets_nodes(f.action) ? node_set : deployment_set;
      for (const auto& t : f.targets) {
        if (!known.count(t)) {
          violation("unknown fault target '" + t + "' for " + to_string(f.action));
        }
      }
    }
  }

  const auto check_policy = [&](const char* name, const RetryPolicy& p) {
    if (p.max_attempts < 1) violation(std::string("retries.") + name + ".max_attempts >= 1");
    if (p.backoff_multiplier < 1.0)
      violation(std::string("retries.") + name + ".backoff_multiplier >= 1.0");
  };
  check_policy("request_send", plan.retries.request_send);
  check_policy("fault_injection", plan.retries.fault_injection);
  check_policy("load_generation", plan.retries.load_generation);
  check_policy("cluster_validation", plan.retries.cluster_validation);

  return report;
}

ServiceTopology topology_of(const ExperimentPlan& plan) {
  ServiceTopology topo;
  topo.kind = plan.topology;
  if (plan.topology == TopologyKind::monolith) {
    topo.hops = {"app"};
  } else {
    for (int i = 1; i <= plan.chain_hops; ++i) topo.hops.push_back("svc-" + std::to_string(i));
  }
  return topo;
}

ClusterProfile resolve_cluster_profile(const ExperimentPlan& plan) {
  ClusterProfile profile;
  if (plan.cluster_profile == "4node") {
    profile.name = "4node";
    profile.worker_nodes = 4;
    profile.edge_nodes = 1;
  } else if (plan.cluster_profile == "8node") {
    profile.name = "8node";
    profile.worker_nodes = 8;
    profile.edge_nodes = 3;
  } else {
    throw PlanError("unknown cluster_profile '" + plan.cluster_profile +
                    "' (expected 4node or 8node)");
  }
  const auto topo = topology_of(plan);
  for (const auto& name : topo.hops) {
    DeploymentSpec d;
    d.name = name;
    d.replicas = 2;
    d.base_service_time_ms = 50.0;
    d.service_jitter_fraction = 0.10;
    profile.deployments.push_back(d);
  }
  return profile;
}

std::vector<std::string> node_names(const ClusterProfile& profile) {
  std::vector<std::string> names;
  names.reserve(profile.worker_nodes);
  for (int i = 1; i <= profile.worker_nodes; ++i) names.push_back("node-" + std::to_string(i));
  return names;
}

std::vector<ExperimentCase> expand_campaign(const ExperimentPlan& plan) {
  std::vector<ExperimentCase> cases;
  const auto topo = topology_of(plan);
  const auto profile = resolve_cluster_profile(plan);
  const auto nodes = node_names(profile);

  std::uint64_t ordinal = 0;
  for (const auto& f : plan.fault_types) {
    for (int intensity : plan.intensities) {
      for (const auto& wm : plan.workload_modes) {
        for (int threads : plan.thread_counts) {
          for (double timeout : plan.timeouts_s) {
            ExperimentCase c;
            c.ordinal = ordinal;
            c.intensity = intensity;
            c.deployment_mode = plan.deployment_mode;
            c.topology = topo;
            c.seed = mix_seed(plan.seed, ordinal);

            const auto& eligible =
                !f.targets.empty() ? f.targets : (targets_nodes(f.action) ? nodes : topo.hops);
            c.fault = fault::build_fault_spec(f.action, intensity, eligible, f.duration_s,
                                              f.trigger_every_s);

            c.workload.mode = wm.mode;
            c.workload.threads = threads;
            c.workload.rate_per_thread_rps = wm.rate_per_thread_rps;
            c.workload.timeout_s = timeout;
            c.workload.window_s = plan.window_s;
            c.workload.background_rps_per_thread = wm.background_rps_per_thread;
            c.workload.burst_size = wm.burst_size;
            c.workload.burst_every_s = wm.burst_every_s;

            char ord[16];
            std::snprintf(ord, sizeof(ord), "%04llu",
                          static_cast<unsigned long long>(ordinal));
            c.case_id = plan.name + "-" + ord + "-" + to_string(f.action) + "-i" +
                        std::to_string(intensity) + "-" + to_string(wm.mode) + "-t" +
                        std::to_string(threads) + "-to" + fmt_num(timeout);
            cases.push_back(std::move(c));
            ++ordinal;
          }
        }
      }
    }
  }
  return cases;
}

}  // namespace resil
