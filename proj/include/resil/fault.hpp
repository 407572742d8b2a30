// Fault specification building: intensity-to-magnitude mapping, percentage
// targeting, recurring activation timelines, and backend apply/remove.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resil/types.hpp"

namespace resil {
class ClusterBackend;
}

namespace resil::fault {

// Magnitude for a fault action at a given intensity percent.
// Delay interpolates linearly between the 25% and 100% anchor points
// (100 ms and 1000 ms); bandwidth interpolates log-linearly between
// 10 Mbps and 1 Mbps; loss maps intensity directly to drop probability;
// cpu stress scales service time by 1 + 3*intensity/100. Kill and
// partition actions carry no magnitude: intensity scopes targeting.
FaultMagnitude map_intensity(FaultAction action, double intensity_percent);

// First ceil(value/100 * |eligible|) entries of a seeded Fisher-Yates
// shuffle of the eligible list. Deterministic for identical inputs.
std::vector<std::string> select_targets(const std::vector<std::string>& eligible,
                                        double value_percent, std::uint64_t seed);

// Recurring activation windows at 0, trigger_every_s, 2*trigger_every_s, ...
// strictly below window_s, each lasting duration_s (clipped at window end).
FaultTimeline build_timeline(const FaultSpec& spec, double window_s);

// Composes the per-case fault specification. For kill/partition actions the
// intensity becomes the targeting percentage; for magnitude actions every
// listed target is affected and intensity drives the magnitude.
FaultSpec build_fault_spec(FaultAction action, double intensity_percent,
                           const std::vector<std::string>& eligible_targets,
                           double duration_s, double trigger_every_s);

// Applies the fault and returns only after the backend confirms it. The
// handle carries the confirmed fault-on timestamp.
FaultHandle apply_fault(ClusterBackend& backend, const FaultSpec& spec);

// Idempotent removal; unknown handles are a no-op.
void remove_fault(ClusterBackend& backend, const FaultHandle& handle);

}  // namespace resil::fault
