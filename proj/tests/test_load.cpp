#include "resil/load.hpp"

#include <doctest.h>

#include "resil/fault.hpp"
#include "resil/sim.hpp"

using namespace resil;

namespace {

ClusterProfile quiet_profile() {
  ClusterProfile p;
  p.worker_nodes = 4;
  p.edge_nodes = 0;
  p.deployments = {DeploymentSpec{"app", 2, 50.0, 0.0, 2000.0, 10000.0}};
  return p;
}

ServiceTopology app_topo() { return {TopologyKind::monolith, {"app"}}; }

WorkloadSpec constant_workload(int threads, double rps, double window_s, double timeout_s = 5) {
  WorkloadSpec w;
  w.mode = WorkloadMode::constant;
  w.threads = threads;
  w.rate_per_thread_rps = rps;
  w.window_s = window_s;
  w.timeout_s = timeout_s;
  return w;
}

}  // namespace

TEST_CASE("constant mode plans fixed-spacing arrivals per thread") {
  const auto sched = load::plan_arrivals(constant_workload(2, 5, 10), 1);
  CHECK_FALSE(sched.closed_loop);
  REQUIRE(sched.arrivals.size() == 100);  // 2 threads * 5 rps * 10 s

  double last[2] = {-1, -1};
  int counts[2] = {0, 0};
  for (const auto& a : sched.arrivals) {
    REQUIRE(a.thread < 2);
    if (last[a.thread] >= 0) {
      CHECK(a.t_ms - last[a.thread] == doctest::Approx(200.0));  // per-thread spacing
    }
    last[a.thread] = a.t_ms;
    ++counts[a.thread];
    CHECK(a.t_ms < 10000.0);
  }
  CHECK(counts[0] == 50);
  CHECK(counts[1] == 50);
  // ascending send order
  for (std::size_t i = 1; i < sched.arrivals.size(); ++i) {
    CHECK(sched.arrivals[i].t_ms >= sched.arrivals[i - 1].t_ms);
  }
}

TEST_CASE("concurrent mode is a closed-loop marker") {
  WorkloadSpec w;
  w.mode = WorkloadMode::concurrent;
  w.threads = 4;
  const auto sched = load::plan_arrivals(w, 1);
  CHECK(sched.closed_loop);
  CHECK(sched.arrivals.empty());
}

TEST_CASE("piggyback layers bursts on background traffic") {
  WorkloadSpec w;
  w.mode = WorkloadMode::piggyback;
  w.threads = 1;
  w.background_rps_per_thread = 1.0;
  w.burst_size = 20;
  w.burst_every_s = 30.0;
  w.window_s = 60.0;
  const auto sched = load::plan_arrivals(w, 1);
  CHECK(sched.arrivals.size() == 100);  // 60 background + 2 bursts of 20
}

TEST_CASE("zero rate in constant mode is rejected") {
  auto w = constant_workload(1, 0, 10);
  CHECK_THROWS_AS(load::plan_arrivals(w, 1), std::invalid_argument);
}

TEST_CASE("nominal execution yields one success record per arrival") {
  SimCluster sim(quiet_profile(), DeploymentMode::cloud, 3);
  const auto w = constant_workload(1, 10, 1);
  const auto sched = load::plan_arrivals(w, 1);
  REQUIRE(sched.arrivals.size() == 10);
  const auto records = load::execute_workload(sim, app_topo(), sched, w, "exp-1", RetryPolicy{});
  REQUIRE(records.size() == 10);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].request_id == i);
    CHECK(records[i].outcome == RequestStatus::success);
    CHECK(records[i].latency_ms == 52.0);
    CHECK(records[i].error_class.empty());
    CHECK(records[i].experiment_id == "exp-1");
  }
  CHECK(sim.now_ms() == 1000.0);  // executor leaves the clock at window end
}

TEST_CASE("timeouts are recorded without a latency field") {
  SimCluster sim(quiet_profile(), DeploymentMode::cloud, 3);
  sim.apply_fault(fault::build_fault_spec(FaultAction::network_delay, 100, {"app"}, 3, 3));
  const auto w = constant_workload(1, 10, 1, 1.0);  // 2000 ms injected vs 1 s budget
  const auto records =
      load::execute_workload(sim, app_topo(), load::plan_arrivals(w, 1), w, "exp", RetryPolicy{});
  REQUIRE(records.size() == 10);
  for (const auto& r : records) {
    CHECK(r.outcome == RequestStatus::timeout);
    CHECK_FALSE(r.latency_ms.has_value());
    CHECK(r.error_class == "TIMEOUT");
  }
}

TEST_CASE("conservation holds under total loss") {
  SimCluster sim(quiet_profile(), DeploymentMode::cloud, 3);
  sim.apply_fault(fault::build_fault_spec(FaultAction::network_loss, 100, {"app"}, 3, 3));
  const auto w = constant_workload(2, 5, 2);
  const auto sched = load::plan_arrivals(w, 1);
  const auto records = load::execute_workload(sim, app_topo(), sched, w, "exp", RetryPolicy{});
  CHECK(records.size() == sched.arrivals.size());
  for (const auto& r : records) CHECK(r.outcome != RequestStatus::success);
}

TEST_CASE("closed-loop workers pace on completions until the window ends") {
  SimCluster sim(quiet_profile(), DeploymentMode::cloud, 3);
  WorkloadSpec w;
  w.mode = WorkloadMode::concurrent;
  w.threads = 2;
  w.window_s = 1.0;
  w.timeout_s = 5;
  const auto records = load::execute_workload(sim, app_topo(), load::plan_arrivals(w, 1), w,
                                              "exp", RetryPolicy{});
  // each thread completes ~1000/52 requests inside the window
  CHECK(records.size() > 30);
  CHECK(records.size() < 45);
  // contiguous: send times never regress, and every gap is a completed turnaround
  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(records[i].send_ts_ms >= records[i - 1].send_ts_ms);
  }
  for (const auto& r : records) CHECK(r.send_ts_ms < 1000.0);
}

TEST_CASE("same schedule and seed reproduce the record list") {
  const auto run_once = [] {
    SimCluster sim(quiet_profile(), DeploymentMode::cloud_edge, 17);
    const auto w = constant_workload(2, 10, 2);
    return load::execute_workload(sim, app_topo(), load::plan_arrivals(w, 1), w, "exp",
                                  RetryPolicy{});
  };
  const auto a = run_once();
  const auto b = run_once();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].send_ts_ms == b[i].send_ts_ms);
    CHECK(a[i].outcome == b[i].outcome);
    CHECK(a[i].latency_ms == b[i].latency_ms);
  }
}

TEST_CASE("timed actions fire at their offsets before coincident sends") {
  SimCluster sim(quiet_profile(), DeploymentMode::cloud, 3);
  const auto w = constant_workload(1, 10, 1);
  FaultHandle handle;
  std::vector<load::TimedAction> actions;
  actions.push_back({500.0, "on", [&] {
                       handle = sim.apply_fault(fault::build_fault_spec(
                           FaultAction::network_loss, 100, {"app"}, 3, 3));
                     }});
  actions.push_back({800.0, "off", [&] { sim.remove_fault(handle); }});
  const auto records = load::execute_workload(sim, app_topo(), load::plan_arrivals(w, 1), w,
                                              "exp", RetryPolicy{}, actions);
  REQUIRE(records.size() == 10);
  for (const auto& r : records) {
    const bool in_window = r.send_ts_ms >= 500.0 && r.send_ts_ms < 800.0;
    CHECK(r.outcome == (in_window ? RequestStatus::timeout : RequestStatus::success));
  }
}

namespace {

// Transport that drops the first N sends of every request on the floor.
class LossyTransport : public ClusterBackend {
 public:
  LossyTransport(ClusterBackend& inner, int failures_per_request)
      : inner_(inner), failures_per_request_(failures_per_request) {}

  std::vector<NodeStatus> node_statuses() override { return inner_.node_statuses(); }
  std::vector<PodStatus> pod_statuses(const std::string& ns) override {
    return inner_.pod_statuses(ns);
  }
  std::vector<ScheduleInfo> active_fault_schedules() override {
    return inner_.active_fault_schedules();
  }
  FaultHandle apply_fault(const FaultSpec& spec) override { return inner_.apply_fault(spec); }
  void remove_fault(const FaultHandle& handle) override { inner_.remove_fault(handle); }
  std::vector<RestartEntry> restart_deployments(const std::string& ns) override {
    return inner_.restart_deployments(ns);
  }
  RequestOutcome send_request(const ServiceTopology& topology, double timeout_s) override {
    if (failed_ < failures_per_request_) {
      ++failed_;
      throw TransportError("socket reset");
    }
    failed_ = 0;
    return inner_.send_request(topology, timeout_s);
  }
  double now_ms() override { return inner_.now_ms(); }
  void wait_ms(double ms) override { inner_.wait_ms(ms); }

 private:
  ClusterBackend& inner_;
  int failures_per_request_;
  int failed_ = 0;
};

}  // namespace

TEST_CASE("transport send failures are retried and then recorded, never dropped") {
  SimCluster sim(quiet_profile(), DeploymentMode::cloud, 3);
  const auto w = constant_workload(1, 5, 1);
  const auto sched = load::plan_arrivals(w, 1);
  RetryPolicy policy{3, 100.0, 2.0};

  SUBCASE("a transient blip is retried through") {
    LossyTransport transport(sim, 1);  // first send of each request fails
    int retries = 0;
    const auto records = load::execute_workload(
        transport, app_topo(), sched, w, "exp", policy, {},
        [&](const std::string& ev, const std::string&) { retries += ev == "send-retry"; });
    REQUIRE(records.size() == sched.arrivals.size());
    for (const auto& r : records) CHECK(r.outcome == RequestStatus::success);
    CHECK(retries == static_cast<int>(records.size()));
  }
  SUBCASE("exhausted retries become a connection_error record") {
    LossyTransport transport(sim, 1000);  // never delivers
    const auto records =
        load::execute_workload(transport, app_topo(), sched, w, "exp", policy);
    REQUIRE(records.size() == sched.arrivals.size());  // conservation
    for (const auto& r : records) {
      CHECK(r.outcome == RequestStatus::connection_error);
      CHECK(r.error_class == "CONN");
    }
  }
}

TEST_CASE("error classification is a fixed mapping") {
  CHECK(load::classify_error(RequestStatus::timeout) == "TIMEOUT");
  CHECK(load::classify_error(RequestStatus::connection_error) == "CONN");
  CHECK(load::classify_error(RequestStatus::server_error) == "HTTP_5XX");
  CHECK_THROWS_AS(load::classify_error(RequestStatus::success), std::logic_error);
}
