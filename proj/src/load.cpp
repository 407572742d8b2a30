#include "resil/load.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace resil::load {

namespace {

// Closed-loop floor so a worker whose transport fails instantly cannot spin.
constexpr double kMinTurnaroundMs = 1.0;

}  // namespace

ArrivalSchedule plan_arrivals(const WorkloadSpec& workload, std::uint64_t seed) {
  (void)seed;  // schedules are deterministic; the seed stays in the signature
               // for transports that want randomized phases later
  if (workload.threads < 1) throw std::invalid_argument("workload needs >= 1 thread");
  if (workload.window_s <= 0) throw std::invalid_argument("window_s must be > 0");

  ArrivalSchedule sched;
  const double window_ms = workload.window_s * 1000.0;

  const auto add_constant_stream = [&](double rps) {
    const double spacing = 1000.0 / rps;
    for (int th = 0; th < workload.threads; ++th) {
      const double phase = spacing * th / workload.threads;
      for (int k = 0;; ++k) {
        const double t = phase + k * spacing;
        if (t >= window_ms) break;
        sched.arrivals.push_back({t, th});
      }
    }
  };

  switch (workload.mode) {
    case WorkloadMode::concurrent:
      sched.closed_loop = true;
      return sched;
    case WorkloadMode::constant:
      if (workload.rate_per_thread_rps <= 0)
        throw std::invalid_argument("constant mode requires a positive rate");
      add_constant_stream(workload.rate_per_thread_rps);
      break;
    case WorkloadMode::piggyback: {
      if (workload.background_rps_per_thread <= 0)
        throw std::invalid_argument("piggyback mode requires a positive background rate");
      add_constant_stream(workload.background_rps_per_thread);
      const double burst_step = workload.burst_every_s * 1000.0;
      for (int th = 0; th < workload.threads; ++th) {
        for (int k = 0;; ++k) {
          const double t = k * burst_step;
          if (t >= window_ms) break;
          for (int b = 0; b < workload.burst_size; ++b) sched.arrivals.push_back({t, th});
        }
      }
      break;
    }
  }
  std::stable_sort(sched.arrivals.begin(), sched.arrivals.end(),
                   [](const Arrival& a, const Arrival& b) { return a.t_ms < b.t_ms; });
  return sched;
}

std::string classify_error(RequestStatus outcome) {
  switch (outcome) {
    case RequestStatus::timeout: return "TIMEOUT";
    case RequestStatus::connection_error: return "CONN";
    case RequestStatus::server_error: return "HTTP_5XX";
    case RequestStatus::success:
      throw std::logic_error("classify_error: not a failure");
  }
  throw std::logic_error("classify_error: unknown outcome");
}

std::vector<RequestRecord> execute_workload(ClusterBackend& backend,
                                            const ServiceTopology& topology,
                                            const ArrivalSchedule& schedule,
                                            const WorkloadSpec& workload,
                                            const std::string& experiment_id,
                                            const RetryPolicy& send_retry,
                                            std::vector<TimedAction> actions,
                                            LoadLogger log) {
  const double window_ms = workload.window_s * 1000.0;
  const double t0 = backend.now_ms();
  std::vector<RequestRecord> records;

  std::stable_sort(actions.begin(), actions.end(),
                   [](const TimedAction& a, const TimedAction& b) { return a.t_ms < b.t_ms; });
  std::size_t next_action = 0;

  const auto advance_to = [&](double rel_t) {
    const double target = t0 + rel_t;
    const double now = backend.now_ms();
    if (target > now) backend.wait_ms(target - now);
  };
  const auto run_actions_through = [&](double rel_t) {
    while (next_action < actions.size() && actions[next_action].t_ms <= rel_t) {
      advance_to(actions[next_action].t_ms);
      actions[next_action].fn();
      ++next_action;
    }
  };

  // Sends one request, retrying transport-level failures per policy.
  // Returns the observed turnaround so closed-loop workers can pace.
  const auto issue = [&]() -> double {
    const double send_rel = backend.now_ms() - t0;
    RequestOutcome out;
    for (int attempt = 1;; ++attempt) {
      try {
        out = backend.send_request(topology, workload.timeout_s);
        break;
      } catch (const TransportError& e) {
        if (attempt >= send_retry.max_attempts) {
          out = RequestOutcome{};
          out.status = RequestStatus::connection_error;
          out.failing_hop = "transport";
          out.elapsed_ms = backend.now_ms() - t0 - send_rel;
          if (log) log("send-exhausted", e.what());
          break;
        }
        const double backoff = send_retry.backoff_initial_ms *
                               std::pow(send_retry.backoff_multiplier, attempt - 1);
        if (log) log("send-retry", "attempt " + std::to_string(attempt) + ": " + e.what());
        backend.wait_ms(backoff);
      }
    }
    RequestRecord rec;
    rec.experiment_id = experiment_id;
    rec.request_id = records.size();
    rec.send_ts_ms = send_rel;
    rec.outcome = out.status;
    if (out.status == RequestStatus::success) {
      rec.latency_ms = out.latency_ms;
    } else {
      rec.error_class = classify_error(out.status);
    }
    records.push_back(std::move(rec));
    return out.elapsed_ms;
  };

  if (schedule.closed_loop) {
    std::vector<double> next_send(workload.threads, 0.0);
    for (;;) {
      int best = -1;
      for (int th = 0; th < workload.threads; ++th) {
        if (next_send[th] < window_ms && (best < 0 || next_send[th] < next_send[best])) {
          best = th;
        }
      }
      if (best < 0) break;
      const double t = next_send[best];
      run_actions_through(t);
      advance_to(t);
      const double elapsed = issue();
      next_send[best] = t + std::max(elapsed, kMinTurnaroundMs);
    }
  } else {
    for (const auto& arrival : schedule.arrivals) {
      run_actions_through(arrival.t_ms);
      advance_to(arrival.t_ms);
      issue();
    }
  }

  run_actions_through(window_ms);
  advance_to(window_ms);
  return records;
}

}  // namespace resil::load
