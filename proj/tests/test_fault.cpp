#include "resil/fault.hpp"

#include <doctest.h>

#include <cmath>

#include "resil/sim.hpp"

using namespace resil;

namespace {

ClusterProfile small_profile() {
  ClusterProfile p;
  p.worker_nodes = 4;
  p.edge_nodes = 1;
  p.deployments = {DeploymentSpec{"app", 2, 50.0, 0.0, 2000.0, 10000.0}};
  return p;
}

}  // namespace

TEST_CASE("intensity anchors are reproduced exactly") {
  CHECK(*fault::map_intensity(FaultAction::network_delay, 25).delay_ms == 100.0);
  CHECK(*fault::map_intensity(FaultAction::network_delay, 100).delay_ms == 1000.0);
  CHECK(*fault::map_intensity(FaultAction::network_bandwidth, 25).bandwidth_mbps == 10.0);
  CHECK(*fault::map_intensity(FaultAction::network_bandwidth, 100).bandwidth_mbps == 1.0);
}

TEST_CASE("interpolated magnitudes match the closed-form oracles") {
  // delay: linear 100 + (i-25)/75 * 900
  CHECK(*fault::map_intensity(FaultAction::network_delay, 50).delay_ms ==
        doctest::Approx(100.0 + (50.0 - 25.0) / 75.0 * 900.0).epsilon(1e-12));
  CHECK(*fault::map_intensity(FaultAction::network_delay, 75).delay_ms ==
        doctest::Approx(700.0).epsilon(1e-12));
  // bandwidth: log-linear 10 * 10^(-(i-25)/75)
  CHECK(*fault::map_intensity(FaultAction::network_bandwidth, 50).bandwidth_mbps ==
        doctest::Approx(10.0 * std::pow(10.0, -(50.0 - 25.0) / 75.0)).epsilon(1e-9));
  CHECK(*fault::map_intensity(FaultAction::network_bandwidth, 50).bandwidth_mbps ==
        doctest::Approx(4.642).epsilon(1e-3));
  // loss: intensity as probability
  CHECK(*fault::map_intensity(FaultAction::network_loss, 100).drop_prob == 1.0);
  CHECK(*fault::map_intensity(FaultAction::network_loss, 25).drop_prob == 0.25);
  // cpu: 1 + 3i/100
  CHECK(*fault::map_intensity(FaultAction::cpu_stress, 100).cpu_factor == 4.0);
}

TEST_CASE("kill and partition actions carry no magnitude") {
  CHECK(fault::map_intensity(FaultAction::container_kill, 75).is_none());
  CHECK(fault::map_intensity(FaultAction::pod_kill, 25).is_none());
  CHECK(fault::map_intensity(FaultAction::node_kill, 100).is_none());
  CHECK(fault::map_intensity(FaultAction::network_partition, 50).is_none());
}

TEST_CASE("magnitudes are monotone in intensity") {
  double prev_delay = 0, prev_drop = 0, prev_bw = 1e9;
  for (double i : {25.0, 50.0, 75.0, 100.0}) {
    const double d = *fault::map_intensity(FaultAction::network_delay, i).delay_ms;
    const double p = *fault::map_intensity(FaultAction::network_loss, i).drop_prob;
    const double b = *fault::map_intensity(FaultAction::network_bandwidth, i).bandwidth_mbps;
    CHECK(d > prev_delay);
    CHECK(p > prev_drop);
    CHECK(b < prev_bw);
    prev_delay = d;
    prev_drop = p;
    prev_bw = b;
  }
}

TEST_CASE("out-of-range intensity is rejected") {
  CHECK_THROWS_AS(fault::map_intensity(FaultAction::network_delay, 0), std::invalid_argument);
  CHECK_THROWS_AS(fault::map_intensity(FaultAction::network_delay, 101), std::invalid_argument);
}

TEST_CASE("target selection sizes follow the ceil law") {
  const std::vector<std::string> five = {"carts", "catalogue", "user", "payment", "shipping"};
  CHECK(fault::select_targets(five, 75, 1).size() == 4);

  std::vector<std::string> eight;
  for (int i = 0; i < 8; ++i) eight.push_back("pod-" + std::to_string(i));
  CHECK(fault::select_targets(eight, 100, 1).size() == 8);

  std::vector<std::string> four(eight.begin(), eight.begin() + 4);
  CHECK(fault::select_targets(four, 25, 1).size() == 1);
}

TEST_CASE("selection size law holds for all set sizes and intensities") {
  for (int n = 1; n <= 50; ++n) {
    std::vector<std::string> eligible;
    for (int i = 0; i < n; ++i) eligible.push_back("e" + std::to_string(i));
    for (int p : {25, 50, 75, 100}) {
      const auto subset = fault::select_targets(eligible, p, 7);
      const std::size_t expected = (static_cast<std::size_t>(p) * n + 99) / 100;
      CHECK(subset.size() == expected);
    }
  }
}

TEST_CASE("selection is deterministic and drawn from the eligible set") {
  const std::vector<std::string> eligible = {"a", "b", "c", "d", "e", "f"};
  const auto s1 = fault::select_targets(eligible, 50, 42);
  const auto s2 = fault::select_targets(eligible, 50, 42);
  CHECK(s1 == s2);
  const auto s3 = fault::select_targets(eligible, 50, 43);
  CHECK(s3.size() == s1.size());
  for (const auto& t : s1) {
    CHECK(std::find(eligible.begin(), eligible.end(), t) != eligible.end());
  }
  CHECK_THROWS_AS(fault::select_targets({}, 50, 1), std::invalid_argument);
}

TEST_CASE("timeline covers the window with clipping") {
  FaultSpec spec;
  spec.duration_s = 3;
  spec.trigger_every_s = 3;
  const auto t = fault::build_timeline(spec, 10);
  REQUIRE(t.activations.size() == 4);
  CHECK(t.activations[0].on_ms == 0.0);
  CHECK(t.activations[0].off_ms == 3000.0);
  CHECK(t.activations[1].on_ms == 3000.0);
  CHECK(t.activations[2].off_ms == 9000.0);
  CHECK(t.activations[3].on_ms == 9000.0);
  CHECK(t.activations[3].off_ms == 10000.0);  // clipped
  CHECK_FALSE(t.overlapping);
}

TEST_CASE("timeline degenerate and gapped shapes") {
  FaultSpec spec;
  SUBCASE("duration equals window") {
    spec.duration_s = 10;
    spec.trigger_every_s = 10;
    const auto t = fault::build_timeline(spec, 10);
    REQUIRE(t.activations.size() == 1);
    CHECK(t.activations[0].on_ms == 0.0);
    CHECK(t.activations[0].off_ms == 10000.0);
  }
  SUBCASE("gaps between activations") {
    spec.duration_s = 2;
    spec.trigger_every_s = 5;
    const auto t = fault::build_timeline(spec, 12);
    REQUIRE(t.activations.size() == 3);
    CHECK(t.activations[0].off_ms == 2000.0);
    CHECK(t.activations[1].on_ms == 5000.0);
    CHECK(t.activations[1].off_ms == 7000.0);
    CHECK(t.activations[2].on_ms == 10000.0);
    CHECK(t.activations[2].off_ms == 12000.0);
  }
  SUBCASE("overlap is allowed but flagged") {
    spec.duration_s = 5;
    spec.trigger_every_s = 3;
    const auto t = fault::build_timeline(spec, 10);
    CHECK(t.overlapping);
  }
  SUBCASE("non-positive duration is an error") {
    spec.duration_s = 0;
    CHECK_THROWS_AS(fault::build_timeline(spec, 10), std::invalid_argument);
  }
}

TEST_CASE("timeline starts form an arithmetic progression inside the window") {
  FaultSpec spec;
  spec.duration_s = 1.5;
  spec.trigger_every_s = 4;
  const auto t = fault::build_timeline(spec, 30);
  for (std::size_t k = 0; k < t.activations.size(); ++k) {
    CHECK(t.activations[k].on_ms == doctest::Approx(k * 4000.0));
    CHECK(t.activations[k].on_ms < 30000.0);
    CHECK(t.activations[k].off_ms <= 30000.0);
    CHECK(t.activations[k].on_ms < t.activations[k].off_ms);
  }
}

TEST_CASE("apply and remove against the simulated backend") {
  SimCluster sim(small_profile(), DeploymentMode::cloud, 11);
  sim.wait_ms(500);

  FaultSpec spec = fault::build_fault_spec(FaultAction::network_delay, 50, {"app"}, 3, 3);
  const auto handle = fault::apply_fault(sim, spec);
  CHECK(handle.on_ts_ms == 500.0);
  REQUIRE(sim.active_fault_schedules().size() == 1);
  CHECK(sim.active_fault_schedules()[0].id == handle.id);

  fault::remove_fault(sim, handle);
  CHECK(sim.active_fault_schedules().empty());
  fault::remove_fault(sim, handle);  // idempotent
  CHECK(sim.active_fault_schedules().empty());
}

TEST_CASE("applying against an unknown target names it") {
  SimCluster sim(small_profile(), DeploymentMode::cloud, 11);
  FaultSpec spec = fault::build_fault_spec(FaultAction::network_delay, 50, {"ghost"}, 3, 3);
  CHECK_THROWS_WITH_AS(fault::apply_fault(sim, spec),
                       doctest::Contains("unknown fault target 'ghost'"), BackendError);
}
