#include "resil/config.hpp"

#include <doctest.h>

#include <random>
#include <set>

#include "resil/rng.hpp"

using namespace resil;

namespace {

const char* kMinimalPlan = R"(
fault_types: [network-delay]
intensities: [25, 100]
)";

ExperimentPlan random_plan(std::mt19937_64& rng) {
  ExperimentPlan p;
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> small(1, 3);
  p.name = "rand-" + std::to_string(rng() % 1000);
  p.backend = coin(rng) ? BackendKind::sim : BackendKind::remote;
  p.cluster_profile = coin(rng) ? "4node" : "8node";
  if (coin(rng)) {
    p.topology = TopologyKind::chain;
    p.chain_hops = 2 + small(rng);
  }
  p.deployment_mode = coin(rng) ? DeploymentMode::cloud : DeploymentMode::cloud_edge;
  const FaultAction actions[] = {FaultAction::container_kill, FaultAction::network_delay,
                                 FaultAction::network_loss, FaultAction::cpu_stress,
                                 FaultAction::network_partition};
  const int nf = small(rng);
  for (int i = 0; i < nf; ++i) {
    FaultTypeEntry f;
    f.action = actions[rng() % 5];
    f.duration_s = small(rng);
    f.trigger_every_s = small(rng) + 1;
    p.fault_types.push_back(f);
  }
  const int intensity_choices[] = {25, 50, 75, 100};
  const int ni = small(rng);
  for (int i = 0; i < ni; ++i) p.intensities.push_back(intensity_choices[rng() % 4]);
  const WorkloadMode modes[] = {WorkloadMode::constant, WorkloadMode::concurrent,
                                WorkloadMode::piggyback};
  const int nm = small(rng);
  for (int i = 0; i < nm; ++i) {
    WorkloadModeEntry w;
    w.mode = modes[rng() % 3];
    w.rate_per_thread_rps = small(rng) * 2.5;
    p.workload_modes.push_back(w);
  }
  const int thread_choices[] = {1, 2, 4, 8, 16};
  const int nt = small(rng);
  for (int i = 0; i < nt; ++i) p.thread_counts.push_back(thread_choices[rng() % 5]);
  const int nto = small(rng);
  for (int i = 0; i < nto; ++i) p.timeouts_s.push_back(1.0 + (rng() % 19) * 0.5);
  p.window_s = 10.0 + small(rng);
  p.seed = rng();
  p.stabilization_s = small(rng);
  return p;
}

}  // namespace

TEST_CASE("minimal plan takes documented defaults") {
  const auto plan = parse_plan(kMinimalPlan);
  CHECK(plan.name == "plan");
  CHECK(plan.backend == BackendKind::sim);
  CHECK(plan.cluster_profile == "4node");
  CHECK(plan.topology == TopologyKind::monolith);
  CHECK(plan.deployment_mode == DeploymentMode::cloud);
  REQUIRE(plan.fault_types.size() == 1);
  CHECK(plan.fault_types[0].action == FaultAction::network_delay);
  CHECK(plan.fault_types[0].duration_s == 3.0);
  CHECK(plan.fault_types[0].trigger_every_s == 3.0);
  CHECK(plan.intensities == std::vector<int>{25, 100});
  REQUIRE(plan.workload_modes.size() == 1);
  CHECK(plan.workload_modes[0].mode == WorkloadMode::constant);
  CHECK(plan.workload_modes[0].rate_per_thread_rps == 5.0);
  CHECK(plan.thread_counts == std::vector<int>{1});
  CHECK(plan.timeouts_s == std::vector<double>{5.0});
  CHECK(plan.window_s == 60.0);
  CHECK(plan.stabilization_s == 30.0);
  CHECK(plan.retries.request_send.max_attempts == 3);
  CHECK(plan.retries.fault_injection.max_attempts == 3);
  CHECK(plan.retries.load_generation.backoff_initial_ms == 1000.0);
  CHECK(plan.retries.cluster_validation.backoff_multiplier == 2.0);
  CHECK(validate_plan(plan).ok());
}

TEST_CASE("timeout outside [1,10] is rejected at parse time") {
  const char* text = R"(
fault_types: [network-delay]
intensities: [25]
timeouts_s: [15]
)";
  CHECK_THROWS_WITH_AS(parse_plan(text),
                       doctest::Contains("timeouts_s out of range [1,10]"), PlanError);
}

TEST_CASE("empty fault_types list is rejected") {
  const char* text = R"(
fault_types: []
intensities: [25]
)";
  CHECK_THROWS_WITH_AS(parse_plan(text), doctest::Contains("fault_types must be non-empty"),
                       PlanError);
}

TEST_CASE("unknown top-level key is an error") {
  const char* text = R"(
fault_types: [network-delay]
intensities: [25]
frobnicate: 1
)";
  CHECK_THROWS_WITH_AS(parse_plan(text), doctest::Contains("unknown key 'frobnicate'"),
                       PlanError);
}

TEST_CASE("syntax errors report a position") {
  try {
    parse_plan("fault_types: [network-delay\nintensities: [25]\n");
    FAIL("expected PlanError");
  } catch (const PlanError& e) {
    CHECK(e.line() >= 1);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("fault entry maps carry overrides and reject unknown keys") {
  const char* text = R"(
fault_types:
  - {action: network-loss, duration_s: 2, trigger_every_s: 4}
intensities: [25]
)";
  const auto plan = parse_plan(text);
  CHECK(plan.fault_types[0].action == FaultAction::network_loss);
  CHECK(plan.fault_types[0].duration_s == 2.0);
  CHECK(plan.fault_types[0].trigger_every_s == 4.0);

  const char* bad = R"(
fault_types:
  - {action: network-loss, blast_radius: 2}
intensities: [25]
)";
  CHECK_THROWS_AS(parse_plan(bad), PlanError);
}

TEST_CASE("validate_plan reports violations as data") {
  auto plan = parse_plan(kMinimalPlan);
  CHECK(validate_plan(plan).ok());

  SUBCASE("intensity outside the supported set") {
    plan.intensities = {60};
    const auto report = validate_plan(plan);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].find("intensity must be one of {25,50,75,100}") !=
          std::string::npos);
  }
  SUBCASE("degenerate chain") {
    plan.topology = TopologyKind::chain;
    plan.chain_hops = 0;
    const auto report = validate_plan(plan);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].find("hop count >= 1") != std::string::npos);
  }
  SUBCASE("thread count outside default profile") {
    plan.thread_counts = {3};
    CHECK_FALSE(validate_plan(plan).ok());
  }
  SUBCASE("unknown fault target") {
    plan.fault_types[0].targets = {"nonexistent"};
    const auto report = validate_plan(plan);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].find("nonexistent") != std::string::npos);
  }
}

TEST_CASE("expansion count is the product of dimension cardinalities") {
  auto plan = parse_plan(kMinimalPlan);
  SUBCASE("1 fault x 4 intensities") {
    plan.intensities = {25, 50, 75, 100};
    CHECK(expand_campaign(plan).size() == 4);
  }
  SUBCASE("7 faults x 4 x 3 x 5 x 2 = 840") {
    plan.fault_types.clear();
    for (auto a : {FaultAction::container_kill, FaultAction::pod_kill,
                   FaultAction::network_delay, FaultAction::network_loss,
                   FaultAction::network_bandwidth, FaultAction::cpu_stress,
                   FaultAction::node_kill}) {
      FaultTypeEntry f;
      f.action = a;
      plan.fault_types.push_back(f);
    }
    plan.intensities = {25, 50, 75, 100};
    plan.workload_modes = {WorkloadModeEntry{WorkloadMode::constant},
                           WorkloadModeEntry{WorkloadMode::concurrent},
                           WorkloadModeEntry{WorkloadMode::piggyback}};
    plan.thread_counts = {1, 2, 4, 8, 16};
    plan.timeouts_s = {3, 5};
    CHECK(expand_campaign(plan).size() == 840);
  }
}

TEST_CASE("expansion is deterministic and ordered outer-to-inner") {
  auto plan = parse_plan(kMinimalPlan);
  plan.intensities = {25, 50};
  plan.thread_counts = {1, 2};
  const auto a = expand_campaign(plan);
  const auto b = expand_campaign(plan);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].case_id == b[i].case_id);
    CHECK(a[i].seed == b[i].seed);
  }
  // timeout is the innermost dimension, intensity outermost after fault
  CHECK(a[0].intensity == 25);
  CHECK(a[0].workload.threads == 1);
  CHECK(a[1].workload.threads == 2);
  CHECK(a[2].intensity == 50);

  std::set<std::string> ids;
  for (const auto& c : a) ids.insert(c.case_id);
  CHECK(ids.size() == a.size());
}

TEST_CASE("case seeds derive purely from plan seed and ordinal") {
  auto plan = parse_plan(kMinimalPlan);
  plan.seed = 99;
  const auto cases = expand_campaign(plan);
  for (const auto& c : cases) CHECK(c.seed == mix_seed(99, c.ordinal));
}

TEST_CASE("kill faults scope by intensity, magnitude faults affect all targets") {
  auto plan = parse_plan(kMinimalPlan);
  FaultTypeEntry kill;
  kill.action = FaultAction::container_kill;
  FaultTypeEntry delay;
  delay.action = FaultAction::network_delay;
  plan.fault_types = {kill, delay};
  plan.intensities = {75};
  const auto cases = expand_campaign(plan);
  REQUIRE(cases.size() == 2);
  CHECK(cases[0].fault.value == 75.0);
  CHECK(cases[0].fault.magnitude.is_none());
  CHECK(cases[1].fault.value == 100.0);
  CHECK(cases[1].fault.magnitude.delay_ms == 700.0);
}

TEST_CASE("plan round-trips through serialization") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 60; ++i) {
    const auto plan = random_plan(rng);
    const auto text = serialize_plan(plan);
    CAPTURE(text);
    const auto back = parse_plan(text);
    CHECK(back == plan);
  }
}

TEST_CASE("case count equals the dimension product on random plans") {
  std::mt19937_64 rng(4048);
  for (int i = 0; i < 60; ++i) {
    const auto plan = random_plan(rng);
    const auto expected = plan.fault_types.size() * plan.intensities.size() *
                          plan.workload_modes.size() * plan.thread_counts.size() *
                          plan.timeouts_s.size();
    CHECK(expand_campaign(plan).size() == expected);
  }
}

TEST_CASE("built-in cluster profiles") {
  auto plan = parse_plan(kMinimalPlan);
  auto profile = resolve_cluster_profile(plan);
  CHECK(profile.worker_nodes == 4);
  CHECK(profile.edge_nodes == 1);
  CHECK(profile.edge_link.base_latency_ms == 200.0);
  CHECK(profile.edge_link.jitter_fraction == 0.10);
  CHECK(profile.edge_link.drop_prob == 0.10);
  REQUIRE(profile.deployments.size() == 1);
  CHECK(profile.deployments[0].name == "app");

  plan.cluster_profile = "8node";
  plan.topology = TopologyKind::chain;
  plan.chain_hops = 3;
  profile = resolve_cluster_profile(plan);
  CHECK(profile.worker_nodes == 8);
  CHECK(profile.edge_nodes == 3);
  CHECK(profile.deployments.size() == 3);
  CHECK(node_names(profile).front() == "node-1");
  CHECK(node_names(profile).back() == "node-8");

  plan.cluster_profile = "16node";
  CHECK_THROWS_AS(resolve_cluster_profile(plan), PlanError);
}
