// headers.hpp
//
// Wire headers for the overlay dataplane: Ethernet II, IPv4 (no options),
// UDP, VXLAN. Serialized layouts are bit-exact; all multi-octet fields are
// network byte order on the wire.

#pragma once

#include <compare>
#include <cstdint>
#include <span>

#include "ovsim/core.hpp"
#include "ovsim/net/ip4.hpp"
#include "ovsim/net/mac.hpp"
#include "ovsim/util/bytes.hpp"

namespace ovsim {

inline constexpr std::uint16_t kEthertypeIpv4 = 0x0800;
inline constexpr std::uint8_t kIpProtoUdp = 17;
inline constexpr std::uint16_t kVxlanUdpPort = 4789;

// Ones-complement sum over 16-bit big-endian words, odd trailing byte
// padded with zero. Returns the complemented checksum.
inline std::uint16_t internet_checksum(std::span<const std::uint8_t> data) {
  std::uint32_t sum = 0;
  std::size_t i = 0;
  for (; i + 1 < data.size(); i += 2)
    sum += static_cast<std::uint32_t>(data[i]) << 8 | data[i + 1];
  if (i < data.size()) sum += static_cast<std::uint32_t>(data[i]) << 8;
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum & 0xffff);
}

struct EthernetHeader {
  static constexpr std::size_t kWireSize = 14;

  MacAddress dst;
  MacAddress src;
  std::uint16_t ethertype = 0;

  void encode(ByteWriter& w) const {
    w.raw(dst.octets);
    w.raw(src.octets);
    w.u16be(ethertype);
  }
  static bool decode(ByteReader& r, EthernetHeader& out) {
    std::span<const std::uint8_t> d, s;
    if (!r.raw(6, d) || !r.raw(6, s) || !r.u16be(out.ethertype)) return false;
    std::copy(d.begin(), d.end(), out.dst.octets.begin());
    std::copy(s.begin(), s.end(), out.src.octets.begin());
    return true;
  }

  auto operator<=>(const EthernetHeader&) const = default;
};

// IPv4 without options: IHL is always 5, so the header is exactly 20 bytes.
// Fragmented packets are rejected on decode.
struct Ipv4Header {
  static constexpr std::size_t kWireSize = 20;
  static constexpr std::uint16_t kFlagDontFragment = 0x4000;

  std::uint16_t total_length = 0;  // header + payload
  std::uint16_t identification = 0;
  std::uint16_t flags_fragment = kFlagDontFragment;
  std::uint8_t ttl = 64;
  std::uint8_t protocol = 0;
  std::uint16_t header_checksum = 0;
  Ipv4Address src;
  Ipv4Address dst;

  // Serializes with a freshly computed checksum; the stored
  // header_checksum field is ignored.
  void encode(ByteWriter& w) const {
    ByteWriter h;
    h.u8(0x45);  // version 4, IHL 5
    h.u8(0);     // DSCP/ECN
    h.u16be(total_length);
    h.u16be(identification);
    h.u16be(flags_fragment);
    h.u8(ttl);
    h.u8(protocol);
    h.u16be(0);  // checksum placeholder
    h.u32be(src.value);
    h.u32be(dst.value);
    Bytes raw = h.take();
    std::uint16_t csum = internet_checksum(raw);
    raw[10] = static_cast<std::uint8_t>(csum >> 8);
    raw[11] = static_cast<std::uint8_t>(csum);
    w.raw(raw);
  }

  // Computes the canonical checksum for the current field values.
  std::uint16_t compute_checksum() const {
    ByteWriter h;
    Ipv4Header copy = *this;
    copy.encode(h);
    Bytes raw = h.take();
    return static_cast<std::uint16_t>(raw[10] << 8 | raw[11]);
  }

  auto operator<=>(const Ipv4Header&) const = default;
};

struct UdpHeader {
  static constexpr std::size_t kWireSize = 8;

  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint16_t length = 0;    // header + payload
  std::uint16_t checksum = 0;  // zero permitted over IPv4

  void encode(ByteWriter& w) const {
    w.u16be(src_port);
    w.u16be(dst_port);
    w.u16be(length);
    w.u16be(checksum);
  }
  static bool decode(ByteReader& r, UdpHeader& out) {
    return r.u16be(out.src_port) && r.u16be(out.dst_port) &&
           r.u16be(out.length) && r.u16be(out.checksum);
  }

  auto operator<=>(const UdpHeader&) const = default;
};

// VXLAN header (8 bytes):
//   +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
//   |R|R|R|R|I|R|R|R|            Reserved                           |
//   +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
//   |                VXLAN Network Identifier (VNI) |   Reserved    |
//   +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
// Reserved bits are written as zero and ignored on decode.
struct VxlanHeader {
  static constexpr std::size_t kWireSize = 8;
  static constexpr std::uint8_t kFlagVniValid = 0x08;

  std::uint8_t flags = kFlagVniValid;
  Vni vni = 0;

  bool vni_valid() const { return (flags & kFlagVniValid) != 0; }

  void encode(ByteWriter& w) const {
    w.u8(flags);
    w.u8(0);
    w.u16be(0);
    w.u32be(vni << 8);
  }
  static bool decode(ByteReader& r, VxlanHeader& out) {
    std::uint8_t r8;
    std::uint16_t r16;
    std::uint32_t vni_res;
    if (!r.u8(out.flags) || !r.u8(r8) || !r.u16be(r16) || !r.u32be(vni_res))
      return false;
    out.vni = vni_res >> 8;
    return true;
  }

  auto operator<=>(const VxlanHeader&) const = default;
};

}  // namespace ovsim
