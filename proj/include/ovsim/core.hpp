// core.hpp
//
// Shared vocabulary: identifiers, time, placement modes, pipeline stages.

#pragma once

#include <compare>
#include <cstdint>
#include <string_view>

namespace ovsim {

// 24-bit VXLAN network identifier. Stored widened; validated at the
// encap/config boundaries.
using Vni = std::uint32_t;
inline constexpr Vni kVniMax = 0xFFFFFF;

// Simulated time in ticks. Tick length in seconds is a run parameter.
using Tick = std::uint64_t;

using HostIndex = int;
using EndpointIndex = int;

// Where the overlay stack runs for an experiment.
enum class PlacementMode {
  host_direct,   // no overlay: endpoint <-> NIC
  host_overlay,  // bridge + VXLAN on the host CPUs
  dpu_offload,   // bridge + VXLAN on the DPU, SR-IOV path to the host
};

constexpr std::string_view to_string(PlacementMode m) {
  switch (m) {
    case PlacementMode::host_direct: return "host_direct";
    case PlacementMode::host_overlay: return "host_overlay";
    case PlacementMode::dpu_offload: return "dpu_offload";
  }
  return "?";
}

// One hop of the charged packet path.
enum class StageKind {
  endpoint_tx,
  endpoint_rx,
  vf_dma,
  representor,
  bridge_switch,
  vxlan_encap,
  vxlan_decap,
  nic_tx,
  nic_rx,
  wire,
};

constexpr std::string_view to_string(StageKind k) {
  switch (k) {
    case StageKind::endpoint_tx: return "endpoint_tx";
    case StageKind::endpoint_rx: return "endpoint_rx";
    case StageKind::vf_dma: return "vf_dma";
    case StageKind::representor: return "representor";
    case StageKind::bridge_switch: return "bridge_switch";
    case StageKind::vxlan_encap: return "vxlan_encap";
    case StageKind::vxlan_decap: return "vxlan_decap";
    case StageKind::nic_tx: return "nic_tx";
    case StageKind::nic_rx: return "nic_rx";
    case StageKind::wire: return "wire";
  }
  return "?";
}

// Which cycle budget a stage drains.
enum class PoolKind { host, dpu, none };

constexpr std::string_view to_string(PoolKind k) {
  switch (k) {
    case PoolKind::host: return "host";
    case PoolKind::dpu: return "dpu";
    case PoolKind::none: return "none";
  }
  return "?";
}

// Switch attachment point. Unique within one switch instance.
struct PortId {
  std::uint32_t value = 0;
  auto operator<=>(const PortId&) const = default;
};

}  // namespace ovsim
