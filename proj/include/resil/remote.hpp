// Remote cluster adapter: JSON-over-HTTP client implementing the backend
// interface, plus an in-process server bridge that exposes any backend over
// the same protocol (used to exercise the wire format against the simulator).
//
// Protocol:
//   GET    /nodes           -> {"nodes":[{"name","ready","is_edge"}]}
//   GET    /pods?ns=NS      -> {"pods":[{"name","deployment","node","phase","ready"}]}
//   GET    /faults          -> {"faults":[{"id","action","on_ts_ms"}]}
//   POST   /faults          <- fault spec JSON -> {"id","on_ts_ms"}
//   DELETE /faults/{id}     -> {"removed":bool}
//   POST   /restart?ns=NS   -> {"deployments":[{"deployment","restarted"}]}
//   POST   /request         <- {"kind","hops","timeout_s"} -> outcome JSON
#pragma once

#include <json.hpp>

#include <chrono>
#include <memory>
#include <string>

#include "resil/backend.hpp"

namespace resil::remote {

// Wire form of a fault spec; field names are part of the protocol.
nlohmann::json fault_spec_to_json(const FaultSpec& spec);
FaultSpec fault_spec_from_json(const nlohmann::json& j);

nlohmann::json outcome_to_json(const RequestOutcome& outcome);
RequestOutcome outcome_from_json(const nlohmann::json& j);

// HTTP client adapter. Stateless per call; transport failures surface as
// TransportError (retryable), protocol violations as BackendError.
class HttpBackend : public ClusterBackend {
 public:
  explicit HttpBackend(const std::string& endpoint);  // "host:port" or "http://host:port"
  ~HttpBackend() override;

  std::vector<NodeStatus> node_statuses() override;
  std::vector<PodStatus> pod_statuses(const std::string& ns) override;
  std::vector<ScheduleInfo> active_fault_schedules() override;
  FaultHandle apply_fault(const FaultSpec& spec) override;
  void remove_fault(const FaultHandle& handle) override;
  std::vector<RestartEntry> restart_deployments(const std::string& ns) override;
  RequestOutcome send_request(const ServiceTopology& topology, double timeout_s) override;
  double now_ms() override;
  void wait_ms(double ms) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::chrono::steady_clock::time_point epoch_;
};

// Serves a backend over the protocol on 127.0.0.1. Calls are serialized at
// the bridge so single-writer backends stay consistent. When the inner
// backend runs on virtual time it is advanced to wall elapsed time before
// each call.
class BackendHttpServer {
 public:
  explicit BackendHttpServer(ClusterBackend& inner);
  ~BackendHttpServer();

  int port() const;
  std::string endpoint() const;  // "127.0.0.1:port"

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace resil::remote
