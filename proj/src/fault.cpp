#include "resil/fault.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "resil/backend.hpp"
#include "resil/rng.hpp"

namespace resil::fault {

FaultMagnitude map_intensity(FaultAction action, double intensity_percent) {
  if (intensity_percent <= 0.0 || intensity_percent > 100.0) {
    throw std::invalid_argument("unsupported intensity " + std::to_string(intensity_percent) +
                                " for " + to_string(action));
  }
  FaultMagnitude m;
  switch (action) {
    case FaultAction::network_delay:
      // 25% -> 100 ms, 100% -> 1000 ms, linear in between.
      m.delay_ms = 100.0 + (intensity_percent - 25.0) * 12.0;
      break;
    case FaultAction::network_bandwidth:
      // 25% -> 10 Mbps, 100% -> 1 Mbps, log-linear. The exponent form keeps
      // both anchor points exact in floating point.
      m.bandwidth_mbps = std::pow(10.0, (100.0 - intensity_percent) / 75.0);
      break;
    case FaultAction::network_loss:
      m.drop_prob = intensity_percent / 100.0;
      break;
    case FaultAction::cpu_stress:
      m.cpu_factor = 1.0 + 3.0 * intensity_percent / 100.0;
      break;
    case FaultAction::container_kill:
    case FaultAction::pod_kill:
    case FaultAction::node_kill:
    case FaultAction::network_partition:
      break;  // intensity scopes targeting, no magnitude
  }
  return m;
}

std::vector<std::string> select_targets(const std::vector<std::string>& eligible,
                                        double value_percent, std::uint64_t seed) {
  if (eligible.empty()) throw std::invalid_argument("select_targets: empty eligible set");
  const auto n = static_cast<std::size_t>(
      std::ceil(value_percent * static_cast<double>(eligible.size()) / 100.0));
  std::vector<std::string> shuffled = eligible;
  std::mt19937_64 rng(seed);
  // Fisher-Yates, hand-rolled so the permutation is stable across platforms.
  for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> d(0, i);
    std::swap(shuffled[i], shuffled[d(rng)]);
  }
  shuffled.resize(std::min(n, shuffled.size()));
  return shuffled;
}

FaultTimeline build_timeline(const FaultSpec& spec, double window_s) {
  if (spec.duration_s <= 0) throw std::invalid_argument("fault duration_s must be > 0");
  if (spec.trigger_every_s <= 0)
    throw std::invalid_argument("fault trigger_every_s must be > 0");
  if (window_s <= 0) throw std::invalid_argument("window_s must be > 0");

  FaultTimeline timeline;
  timeline.overlapping = spec.duration_s > spec.trigger_every_s;
  const double window_ms = window_s * 1000.0;
  const double step_ms = spec.trigger_every_s * 1000.0;
  const double duration_ms = spec.duration_s * 1000.0;
  for (int k = 0;; ++k) {
    const double on = k * step_ms;
    if (on >= window_ms) break;
    timeline.activations.push_back({on, std::min(on + duration_ms, window_ms)});
  }
  return timeline;
}

FaultSpec build_fault_spec(FaultAction action, double intensity_percent,
                           const std::vector<std::string>& eligible_targets,
                           double duration_s, double trigger_every_s) {
  FaultSpec spec;
  spec.action = action;
  spec.targets = eligible_targets;
  spec.duration_s = duration_s;
  spec.trigger_every_s = trigger_every_s;
  spec.magnitude = map_intensity(action, intensity_percent);
  // Kill and partition actions scope their blast radius by intensity; for
  // magnitude-bearing actions every listed target is affected.
  spec.value = spec.magnitude.is_none() ? intensity_percent : 100.0;
  return spec;
}

FaultHandle apply_fault(ClusterBackend& backend, const FaultSpec& spec) {
  if (spec.targets.empty()) throw std::invalid_argument("fault spec has no targets");
  return backend.apply_fault(spec);
}

void remove_fault(ClusterBackend& backend, const FaultHandle& handle) {
  backend.remove_fault(handle);
}

}  // namespace resil::fault
