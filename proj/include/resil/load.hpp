// Workload generation: arrival planning for the three traffic modes and
// request execution against a backend transport under a timeout budget.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "resil/backend.hpp"
#include "resil/config.hpp"
#include "resil/types.hpp"

namespace resil::load {

struct Arrival {
  double t_ms = 0.0;  // window-relative planned send time
  int thread = 0;
};

struct ArrivalSchedule {
  // Concurrent mode: no precomputed times, each worker sends the next
  // request as soon as the previous one completes.
  bool closed_loop = false;
  std::vector<Arrival> arrivals;  // open-loop modes, ascending by time
};

// Constant mode plans fixed-spacing arrivals per thread (open loop, with a
// per-thread phase stagger). Piggyback adds back-to-back bursts on top of a
// constant background. Concurrent returns the closed-loop marker.
ArrivalSchedule plan_arrivals(const WorkloadSpec& workload, std::uint64_t seed);

// A hook executed at its window-relative time, before any request due at
// the same instant. Carries fault timeline activations during execution.
struct TimedAction {
  double t_ms = 0.0;
  std::string label;
  std::function<void()> fn;
};

using LoadLogger = std::function<void(const std::string& event, const std::string& detail)>;

// Executes the schedule. Every planned arrival produces exactly one record;
// transport failures are retried per the policy and then recorded as
// connection errors, never dropped. A late executor issues immediately
// without skipping.
std::vector<RequestRecord> execute_workload(ClusterBackend& backend,
                                            const ServiceTopology& topology,
                                            const ArrivalSchedule& schedule,
                                            const WorkloadSpec& workload,
                                            const std::string& experiment_id,
                                            const RetryPolicy& send_retry,
                                            std::vector<TimedAction> actions = {},
                                            LoadLogger log = nullptr);

// Normalized failure class: TIMEOUT, CONN, or HTTP_5XX. Calling this on a
// success is a contract violation.
std::string classify_error(RequestStatus outcome);

}  // namespace resil::load
