// vxlan.hpp
//
// VXLAN encapsulation and decapsulation between tunnel endpoints.

#pragma once

#include <cstdint>

#include "ovsim/net/frame.hpp"
#include "ovsim/util/bytes.hpp"
#include "ovsim/util/expected.hpp"

namespace ovsim {

// Underlay identity of a tunnel endpoint.
struct VtepAddress {
  Ipv4Address ip;
  MacAddress mac;

  auto operator<=>(const VtepAddress&) const = default;
};

// Outer UDP source port: FNV-1a over (src MAC, dst MAC, ethertype) of the
// inner frame, mapped into the ephemeral range [49152, 65535]. Keeps flows
// of one MAC pair on one underlay path while staying reproducible.
inline std::uint16_t vxlan_source_port(const EthernetHeader& inner_eth) {
  Fnv1a64 h;
  h.update(inner_eth.src.octets);
  h.update(inner_eth.dst.octets);
  std::uint8_t et[2] = {static_cast<std::uint8_t>(inner_eth.ethertype >> 8),
                        static_cast<std::uint8_t>(inner_eth.ethertype)};
  h.update(et);
  return static_cast<std::uint16_t>(49152 + h.digest() % 16384);
}

// Builds the canonical outer frame: lengths and the IPv4 checksum are
// filled in so the struct compares equal to its own decode. The IPv4
// identification comes from the caller; VTEPs own that counter.
inline Result<OuterFrame, CodecError> vxlan_encapsulate(
    const InnerFrame& inner, Vni vni, const VtepAddress& src,
    const VtepAddress& dst, std::uint16_t ip_identification,
    std::uint16_t vxlan_port = kVxlanUdpPort) {
  if (vni > kVniMax) return CodecError::vni_out_of_range;

  OuterFrame outer;
  outer.eth.dst = dst.mac;
  outer.eth.src = src.mac;
  outer.eth.ethertype = kEthertypeIpv4;

  const std::size_t inner_len = inner.wire_size();
  outer.ip.total_length = static_cast<std::uint16_t>(
      Ipv4Header::kWireSize + UdpHeader::kWireSize + VxlanHeader::kWireSize +
      inner_len);
  outer.ip.identification = ip_identification;
  outer.ip.ttl = 64;
  outer.ip.protocol = kIpProtoUdp;
  outer.ip.src = src.ip;
  outer.ip.dst = dst.ip;
  outer.ip.header_checksum = outer.ip.compute_checksum();

  outer.udp.src_port = vxlan_source_port(inner.eth);
  outer.udp.dst_port = vxlan_port;
  outer.udp.length = static_cast<std::uint16_t>(
      UdpHeader::kWireSize + VxlanHeader::kWireSize + inner_len);
  outer.udp.checksum = 0;

  outer.vxlan.flags = VxlanHeader::kFlagVniValid;
  outer.vxlan.vni = vni;
  outer.inner = inner;
  return outer;
}

struct DecapResult {
  Vni vni = 0;
  InnerFrame inner;

  auto operator<=>(const DecapResult&) const = default;
};

// Exact left inverse of vxlan_encapsulate on well-formed outer frames.
inline Result<DecapResult, CodecError> vxlan_decapsulate(
    const OuterFrame& outer, std::uint16_t vxlan_port = kVxlanUdpPort) {
  if (outer.udp.dst_port != vxlan_port) return CodecError::not_vxlan;
  if (!outer.vxlan.vni_valid()) return CodecError::not_vxlan;
  return DecapResult{outer.vxlan.vni, outer.inner};
}

// Stateful tunnel endpoint: owns the outer IPv4 identification counter.
class Vtep {
 public:
  explicit Vtep(VtepAddress addr) : addr_(addr) {}

  const VtepAddress& address() const { return addr_; }

  Result<OuterFrame, CodecError> encapsulate(
      const InnerFrame& inner, Vni vni, const VtepAddress& remote,
      std::uint16_t vxlan_port = kVxlanUdpPort) {
    return vxlan_encapsulate(inner, vni, addr_, remote, next_identification_++,
                             vxlan_port);
  }

 private:
  VtepAddress addr_;
  std::uint16_t next_identification_ = 0;
};

}  // namespace ovsim
