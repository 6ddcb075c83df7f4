// flow.hpp
//
// Classification key, forwarding actions, and switch counters.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "ovsim/core.hpp"
#include "ovsim/net/ip4.hpp"
#include "ovsim/net/mac.hpp"

namespace ovsim {

enum class PortRole { endpoint, representor, vtep, uplink };

constexpr std::string_view to_string(PortRole r) {
  switch (r) {
    case PortRole::endpoint: return "endpoint";
    case PortRole::representor: return "representor";
    case PortRole::vtep: return "vtep";
    case PortRole::uplink: return "uplink";
  }
  return "?";
}

// Layer-2 + VNI classification tuple. Field-wise equality; the ordering is
// total so cache and FDB dumps iterate deterministically.
struct FlowKey {
  PortId in_port;
  MacAddress src;
  MacAddress dst;
  std::uint16_t ethertype = 0;
  std::optional<Vni> vni;  // absent = untagged/native

  auto operator<=>(const FlowKey&) const = default;
};

enum class DropReason { unattached, malformed, hairpin };

constexpr std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::unattached: return "unattached";
    case DropReason::malformed: return "malformed";
    case DropReason::hairpin: return "hairpin";
  }
  return "?";
}

struct OutputAction {
  PortId port;
  auto operator<=>(const OutputAction&) const = default;
};

// Replicate to every member port of the VNI except `exclude`.
struct FloodAction {
  std::optional<Vni> vni;
  PortId exclude;
  auto operator<=>(const FloodAction&) const = default;
};

// Encapsulate toward a remote VTEP, then output on the uplink.
struct EncapAction {
  Vni vni = 0;
  Ipv4Address remote_vtep;
  PortId uplink;
  auto operator<=>(const EncapAction&) const = default;
};

// Strip the outer headers and re-classify at the VTEP port.
struct DecapAction {
  auto operator<=>(const DecapAction&) const = default;
};

struct DropAction {
  DropReason reason = DropReason::unattached;
  auto operator<=>(const DropAction&) const = default;
};

using FlowAction =
    std::variant<OutputAction, FloodAction, EncapAction, DecapAction,
                 DropAction>;

inline std::string to_string(const FlowAction& a) {
  std::ostringstream os;
  if (const auto* o = std::get_if<OutputAction>(&a)) {
    os << "output:" << o->port.value;
  } else if (const auto* f = std::get_if<FloodAction>(&a)) {
    os << "flood:vni=" << (f->vni ? std::to_string(*f->vni) : "-")
       << ",exclude=" << f->exclude.value;
  } else if (const auto* e = std::get_if<EncapAction>(&a)) {
    os << "encap:vni=" << e->vni << ",vtep=" << e->remote_vtep.str()
       << ",uplink=" << e->uplink.value;
  } else if (std::holds_alternative<DecapAction>(a)) {
    os << "decap";
  } else {
    os << "drop:" << to_string(std::get<DropAction>(a).reason);
  }
  return os.str();
}

struct SwitchStats {
  std::uint64_t packets = 0;  // classified packets (drops by policy included)
  std::uint64_t upcalls = 0;
  std::uint64_t fast_path_hits = 0;     // software exact-match cache
  std::uint64_t hw_fast_path_hits = 0;  // offloaded table
  std::uint64_t flood_count = 0;
  std::uint64_t malformed = 0;  // counted outside `packets`
  std::map<DropReason, std::uint64_t> drops;
};

}  // namespace ovsim
