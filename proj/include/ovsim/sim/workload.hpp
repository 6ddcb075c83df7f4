// workload.hpp
//
// Saturating message workloads per container pair and their segmentation.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ovsim/topo/topology.hpp"

namespace ovsim {

struct WorkloadSpec {
  int pairs = 1;
  std::uint32_t message_bytes = 8192;
  bool bidirectional = false;
  double offered_gbps = 0;  // 0 = saturating sender
};

// Message split into payload segments no larger than the segment payload
// limit; the tail segment carries the remainder.
inline std::vector<std::uint32_t> segment_sizes(std::uint32_t message_bytes,
                                                std::uint32_t segment_payload) {
  if (message_bytes < 1)
    throw std::invalid_argument("workload: message size must be >= 1");
  if (segment_payload < 1)
    throw std::invalid_argument("workload: segment payload must be >= 1");
  std::vector<std::uint32_t> sizes;
  std::uint32_t left = message_bytes;
  while (left > 0) {
    std::uint32_t s = left < segment_payload ? left : segment_payload;
    sizes.push_back(s);
    left -= s;
  }
  return sizes;
}

// One unidirectional message stream between endpoints.
struct StreamSpec {
  EndpointIndex src = 0;
  EndpointIndex dst = 0;
  std::uint32_t message_bytes = 8192;
  double offered_gbps = 0;
};

// Builds the per-pair stream set: each client saturates toward its server,
// plus the reverse direction when bidirectional.
inline std::vector<StreamSpec> generate_streams(const WorkloadSpec& spec,
                                                const Topology& topo) {
  if (spec.pairs < 1)
    throw std::invalid_argument("workload: pair count must be >= 1");
  int found = 0;
  std::vector<StreamSpec> out;
  for (const auto& e : topo.endpoints()) {
    if (e.role != EndpointRole::client) continue;
    if (!e.peer) throw std::invalid_argument("workload: client without peer");
    ++found;
    out.push_back({e.id, *e.peer, spec.message_bytes, spec.offered_gbps});
    if (spec.bidirectional)
      out.push_back({*e.peer, e.id, spec.message_bytes, spec.offered_gbps});
  }
  if (found != spec.pairs)
    throw std::invalid_argument(
        "workload: topology pair count does not match the spec");
  return out;
}

}  // namespace ovsim
