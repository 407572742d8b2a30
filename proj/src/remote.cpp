#include "resil/remote.hpp"

#include <httplib.h>

#include <mutex>
#include <thread>

#include "resil/sim.hpp"

namespace resil::remote {

using nlohmann::json;

nlohmann::json fault_spec_to_json(const FaultSpec& spec) {
  json j;
  j["action"] = to_string(spec.action);
  j["mode"] = spec.mode;
  j["value"] = spec.value;
  j["targets"] = spec.targets;
  j["duration_s"] = spec.duration_s;
  j["trigger_every_s"] = spec.trigger_every_s;
  json m = json::object();
  if (spec.magnitude.delay_ms) m["delay_ms"] = *spec.magnitude.delay_ms;
  if (spec.magnitude.drop_prob) m["drop_prob"] = *spec.magnitude.drop_prob;
  if (spec.magnitude.bandwidth_mbps) m["bandwidth_mbps"] = *spec.magnitude.bandwidth_mbps;
  if (spec.magnitude.cpu_factor) m["cpu_factor"] = *spec.magnitude.cpu_factor;
  j["magnitude"] = m;
  return j;
}

FaultSpec fault_spec_from_json(const nlohmann::json& j) {
  FaultSpec spec;
  spec.action = fault_action_from_string(j.at("action").get<std::string>());
  spec.mode = j.value("mode", std::string("fixed-percent"));
  spec.value = j.at("value").get<double>();
  spec.targets = j.at("targets").get<std::vector<std::string>>();
  spec.duration_s = j.value("duration_s", 3.0);
  spec.trigger_every_s = j.value("trigger_every_s", 3.0);
  if (j.contains("magnitude")) {
    const auto& m = j["magnitude"];
    if (m.contains("delay_ms")) spec.magnitude.delay_ms = m["delay_ms"].get<double>();
    if (m.contains("drop_prob")) spec.magnitude.drop_prob = m["drop_prob"].get<double>();
    if (m.contains("bandwidth_mbps"))
      spec.magnitude.bandwidth_mbps = m["bandwidth_mbps"].get<double>();
    if (m.contains("cpu_factor")) spec.magnitude.cpu_factor = m["cpu_factor"].get<double>();
  }
  return spec;
}

nlohmann::json outcome_to_json(const RequestOutcome& outcome) {
  json j;
  j["status"] = to_string(outcome.status);
  j["elapsed_ms"] = outcome.elapsed_ms;
  if (outcome.latency_ms) j["latency_ms"] = *outcome.latency_ms;
  if (outcome.failing_hop) j["failing_hop"] = *outcome.failing_hop;
  return j;
}

RequestOutcome outcome_from_json(const nlohmann::json& j) {
  RequestOutcome out;
  out.status = request_status_from_string(j.at("status").get<std::string>());
  out.elapsed_ms = j.value("elapsed_ms", 0.0);
  if (j.contains("latency_ms")) out.latency_ms = j["latency_ms"].get<double>();
  if (j.contains("failing_hop")) out.failing_hop = j["failing_hop"].get<std::string>();
  return out;
}

// ---------------------------------------------------------------------------
// HttpBackend
// ---------------------------------------------------------------------------

struct HttpBackend::Impl {
  explicit Impl(const std::string& endpoint) : client(normalize(endpoint)) {
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
  }

  static std::string normalize(const std::string& endpoint) {
    if (endpoint.rfind("http://", 0) == 0 || endpoint.rfind("https://", 0) == 0)
      return endpoint;
    return "http://" + endpoint;
  }

  json expect_json(const httplib::Result& res, const std::string& what) {
    if (!res) {
      throw TransportError("transport failure on " + what + ": " +
                           httplib::to_string(res.error()));
    }
    if (res->status >= 500) {
      throw TransportError(what + " returned HTTP " + std::to_string(res->status));
    }
    if (res->status >= 400) {
      throw BackendError(what + " rejected (HTTP " + std::to_string(res->status) +
                         "): " + res->body);
    }
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw BackendError("malformed response from " + what + ": " + e.what());
    }
  }

  httplib::Client client;
};

HttpBackend::HttpBackend(const std::string& endpoint)
    : impl_(std::make_unique<Impl>(endpoint)), epoch_(std::chrono::steady_clock::now()) {}

HttpBackend::~HttpBackend() = default;

std::vector<NodeStatus> HttpBackend::node_statuses() {
  const auto j = impl_->expect_json(impl_->client.Get("/nodes"), "GET /nodes");
  std::vector<NodeStatus> out;
  for (const auto& n : j.at("nodes")) {
    out.push_back({n.at("name").get<std::string>(), n.at("ready").get<bool>(),
                   n.value("is_edge", false)});
  }
  return out;
}

std::vector<PodStatus> HttpBackend::pod_statuses(const std::string& ns) {
  const auto j =
      impl_->expect_json(impl_->client.Get("/pods?ns=" + ns), "GET /pods");
  std::vector<PodStatus> out;
  for (const auto& p : j.at("pods")) {
    PodStatus s;
    s.name = p.at("name").get<std::string>();
    s.deployment = p.value("deployment", "");
    s.node = p.value("node", "");
    s.phase = pod_phase_from_string(p.value("phase", "Running"));
    // readiness arrives as the "r/t" fraction string
    const auto ready = p.value("ready", "1/1");
    const auto slash = ready.find('/');
    if (slash == std::string::npos) throw BackendError("malformed readiness '" + ready + "'");
    s.ready_containers = std::stoi(ready.substr(0, slash));
    s.total_containers = std::stoi(ready.substr(slash + 1));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ScheduleInfo> HttpBackend::active_fault_schedules() {
  const auto j = impl_->expect_json(impl_->client.Get("/faults"), "GET /faults");
  std::vector<ScheduleInfo> out;
  for (const auto& f : j.at("faults")) {
    out.push_back({f.at("id").get<std::uint64_t>(), f.value("action", ""),
                   f.value("on_ts_ms", 0.0)});
  }
  return out;
}

FaultHandle HttpBackend::apply_fault(const FaultSpec& spec) {
  const auto body = fault_spec_to_json(spec).dump();
  const auto j = impl_->expect_json(impl_->client.Post("/faults", body, "application/json"),
                                    "POST /faults");
  return {j.at("id").get<std::uint64_t>(), j.value("on_ts_ms", 0.0)};
}

void HttpBackend::remove_fault(const FaultHandle& handle) {
  impl_->expect_json(impl_->client.Delete("/faults/" + std::to_string(handle.id)),
                     "DELETE /faults");
}

std::vector<RestartEntry> HttpBackend::restart_deployments(const std::string& ns) {
  const auto j = impl_->expect_json(impl_->client.Post("/restart?ns=" + ns, "", "text/plain"),
                                    "POST /restart");
  std::vector<RestartEntry> out;
  for (const auto& d : j.at("deployments")) {
    out.push_back({d.at("deployment").get<std::string>(), d.value("restarted", false)});
  }
  return out;
}

RequestOutcome HttpBackend::send_request(const ServiceTopology& topology, double timeout_s) {
  json body;
  body["kind"] = to_string(topology.kind);
  body["hops"] = topology.hops;
  body["timeout_s"] = timeout_s;
  const auto j = impl_->expect_json(
      impl_->client.Post("/request", body.dump(), "application/json"), "POST /request");
  return outcome_from_json(j);
}

double HttpBackend::now_ms() {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - epoch_)
      .count();
}

void HttpBackend::wait_ms(double ms) {
  if (ms <= 0) return;
  std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

// ---------------------------------------------------------------------------
// BackendHttpServer
// ---------------------------------------------------------------------------

struct BackendHttpServer::Impl {
  explicit Impl(ClusterBackend& backend) : inner(backend) {
    epoch = std::chrono::steady_clock::now();
    register_routes();
    port = server.bind_to_any_port("127.0.0.1");
    if (port <= 0) throw std::runtime_error("cannot bind bridge server");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~Impl() {
    server.stop();
    if (thread.joinable()) thread.join();
  }

  // Serializes calls and pulls a virtual-time backend up to wall time.
  template <typename F>
  void guarded(httplib::Response& res, F&& fn) {
    std::lock_guard<std::mutex> lock(mu);
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - epoch)
            .count();
    try {
      if (wall > inner.now_ms()) inner.wait_ms(wall - inner.now_ms());
      res.set_content(fn().dump(), "application/json");
    } catch (const BackendError& e) {
      res.status = 400;
      res.set_content(e.what(), "text/plain");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(e.what(), "text/plain");
    }
  }

  void register_routes() {
    server.Get("/nodes", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [this] {
        json out;
        out["nodes"] = json::array();
        for (const auto& n : inner.node_statuses()) {
          out["nodes"].push_back({{"name", n.name}, {"ready", n.ready}, {"is_edge", n.is_edge}});
        }
        return out;
      });
    });
    server.Get("/pods", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [this, &req] {
        json out;
        out["pods"] = json::array();
        for (const auto& p : inner.pod_statuses(req.get_param_value("ns"))) {
          out["pods"].push_back({{"name", p.name},
                                 {"deployment", p.deployment},
                                 {"node", p.node},
                                 {"phase", to_string(p.phase)},
                                 {"ready", p.ready_fraction()}});
        }
        return out;
      });
    });
    server.Get("/faults", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [this] {
        json out;
        out["faults"] = json::array();
        for (const auto& s : inner.active_fault_schedules()) {
          out["faults"].push_back(
              {{"id", s.id}, {"action", s.action}, {"on_ts_ms", s.on_ts_ms}});
        }
        return out;
      });
    });
    server.Post("/faults", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [this, &req] {
        const auto handle = inner.apply_fault(fault_spec_from_json(json::parse(req.body)));
        return json{{"id", handle.id}, {"on_ts_ms", handle.on_ts_ms}};
      });
    });
    server.Delete(R"(/faults/(\d+))", [this](const httplib::Request& req,
                                             httplib::Response& res) {
      guarded(res, [this, &req] {
        FaultHandle handle;
        handle.id = std::stoull(req.matches[1].str());
        inner.remove_fault(handle);
        return json{{"removed", true}};
      });
    });
    server.Post("/restart", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [this, &req] {
        json out;
        out["deployments"] = json::array();
        for (const auto& d : inner.restart_deployments(req.get_param_value("ns"))) {
          out["deployments"].push_back(
              {{"deployment", d.deployment}, {"restarted", d.restarted}});
        }
        return out;
      });
    });
    server.Post("/request", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [this, &req] {
        const auto body = json::parse(req.body);
        ServiceTopology topo;
        topo.kind = body.value("kind", "monolith") == "chain" ? TopologyKind::chain
                                                              : TopologyKind::monolith;
        topo.hops = body.at("hops").get<std::vector<std::string>>();
        return outcome_to_json(inner.send_request(topo, body.at("timeout_s").get<double>()));
      });
    });
  }

  ClusterBackend& inner;
  httplib::Server server;
  std::thread thread;
  std::mutex mu;
  std::chrono::steady_clock::time_point epoch;
  int port = 0;
};

BackendHttpServer::BackendHttpServer(ClusterBackend& inner)
    : impl_(std::make_unique<Impl>(inner)) {}

BackendHttpServer::~BackendHttpServer() = default;

int BackendHttpServer::port() const { return impl_->port; }

std::string BackendHttpServer::endpoint() const {
  return "127.0.0.1:" + std::to_string(impl_->port);
}

}  // namespace resil::remote
