// frame.hpp
//
// Frame model and the bit-exact encoder/decoder.
//
// An InnerFrame is an Ethernet frame with an opaque payload. An OuterFrame
// is a VXLAN encapsulation: Ethernet + IPv4 + UDP + VXLAN + inner frame
// bytes, 50 bytes of headers on top of the inner frame.
//
// Decode layering: an ethertype of 0x0800 commits the payload to being a
// well-formed IPv4 packet (bad version, bad checksum, options, fragments
// and truncation are distinct errors, not opaque payload). The frame
// classifies as an OuterFrame only when the UDP destination port is the
// VXLAN port and the VNI-valid flag is set; otherwise it stays an
// InnerFrame whose payload is everything after the Ethernet header.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "ovsim/net/headers.hpp"
#include "ovsim/util/bytes.hpp"
#include "ovsim/util/expected.hpp"

namespace ovsim {

struct InnerFrame {
  EthernetHeader eth;
  Bytes payload;

  std::size_t wire_size() const {
    return EthernetHeader::kWireSize + payload.size();
  }

  auto operator<=>(const InnerFrame&) const = default;
};

inline constexpr std::size_t kVxlanOverheadBytes =
    EthernetHeader::kWireSize + Ipv4Header::kWireSize + UdpHeader::kWireSize +
    VxlanHeader::kWireSize;  // 50

struct OuterFrame {
  EthernetHeader eth;
  Ipv4Header ip;
  UdpHeader udp;
  VxlanHeader vxlan;
  InnerFrame inner;

  std::size_t wire_size() const {
    return inner.wire_size() + kVxlanOverheadBytes;
  }

  auto operator<=>(const OuterFrame&) const = default;
};

using Frame = std::variant<InnerFrame, OuterFrame>;

inline std::size_t frame_wire_size(const Frame& f) {
  return std::visit([](const auto& v) { return v.wire_size(); }, f);
}

enum class CodecError {
  truncated,
  bad_ip_version,
  ip_options_unsupported,
  bad_ip_checksum,
  fragmented,
  bad_length,
  bad_udp_length,
  inner_truncated,
  not_vxlan,
  vni_out_of_range,
  payload_too_large,
};

constexpr std::string_view to_string(CodecError e) {
  switch (e) {
    case CodecError::truncated: return "truncated";
    case CodecError::bad_ip_version: return "bad_ip_version";
    case CodecError::ip_options_unsupported: return "ip_options_unsupported";
    case CodecError::bad_ip_checksum: return "bad_ip_checksum";
    case CodecError::fragmented: return "fragmented";
    case CodecError::bad_length: return "bad_length";
    case CodecError::bad_udp_length: return "bad_udp_length";
    case CodecError::inner_truncated: return "inner_truncated";
    case CodecError::not_vxlan: return "not_vxlan";
    case CodecError::vni_out_of_range: return "vni_out_of_range";
    case CodecError::payload_too_large: return "payload_too_large";
  }
  return "?";
}

struct CodecOptions {
  std::uint16_t vxlan_port = kVxlanUdpPort;
  // When set, encode rejects inner payloads above this size.
  std::optional<std::size_t> payload_mtu;
};

inline Result<Bytes, CodecError> encode_frame(const Frame& frame,
                                              const CodecOptions& opt = {}) {
  ByteWriter w;
  if (const auto* inner = std::get_if<InnerFrame>(&frame)) {
    if (opt.payload_mtu && inner->payload.size() > *opt.payload_mtu)
      return CodecError::payload_too_large;
    inner->eth.encode(w);
    w.raw(inner->payload);
    return w.take();
  }
  const auto& outer = std::get<OuterFrame>(frame);
  if (opt.payload_mtu && outer.inner.payload.size() > *opt.payload_mtu)
    return CodecError::payload_too_large;
  if (outer.vxlan.vni > kVniMax) return CodecError::vni_out_of_range;

  const std::size_t inner_len = outer.inner.wire_size();
  Ipv4Header ip = outer.ip;
  ip.protocol = kIpProtoUdp;
  ip.total_length = static_cast<std::uint16_t>(
      Ipv4Header::kWireSize + UdpHeader::kWireSize + VxlanHeader::kWireSize +
      inner_len);
  UdpHeader udp = outer.udp;
  udp.length = static_cast<std::uint16_t>(UdpHeader::kWireSize +
                                          VxlanHeader::kWireSize + inner_len);

  outer.eth.encode(w);
  ip.encode(w);  // checksum freshly computed
  udp.encode(w);
  outer.vxlan.encode(w);
  outer.inner.eth.encode(w);
  w.raw(outer.inner.payload);
  return w.take();
}

inline Result<Frame, CodecError> decode_frame(
    std::span<const std::uint8_t> bytes, const CodecOptions& opt = {}) {
  ByteReader r(bytes);
  EthernetHeader eth;
  if (!EthernetHeader::decode(r, eth)) return CodecError::truncated;

  auto as_inner = [&]() -> Frame {
    return InnerFrame{eth, Bytes(bytes.begin() + EthernetHeader::kWireSize,
                                 bytes.end())};
  };

  if (eth.ethertype != kEthertypeIpv4) return as_inner();

  // Committed to IPv4: validate the header.
  std::span<const std::uint8_t> ip_raw;
  if (!r.raw(Ipv4Header::kWireSize, ip_raw)) return CodecError::truncated;
  std::uint8_t ver_ihl = ip_raw[0];
  if ((ver_ihl >> 4) != 4) return CodecError::bad_ip_version;
  if ((ver_ihl & 0x0f) != 5) return CodecError::ip_options_unsupported;
  if (internet_checksum(ip_raw) != 0) return CodecError::bad_ip_checksum;

  Ipv4Header ip;
  ip.total_length = static_cast<std::uint16_t>(ip_raw[2] << 8 | ip_raw[3]);
  ip.identification = static_cast<std::uint16_t>(ip_raw[4] << 8 | ip_raw[5]);
  ip.flags_fragment = static_cast<std::uint16_t>(ip_raw[6] << 8 | ip_raw[7]);
  ip.ttl = ip_raw[8];
  ip.protocol = ip_raw[9];
  ip.header_checksum = static_cast<std::uint16_t>(ip_raw[10] << 8 | ip_raw[11]);
  ip.src.value = static_cast<std::uint32_t>(ip_raw[12]) << 24 |
                 static_cast<std::uint32_t>(ip_raw[13]) << 16 |
                 static_cast<std::uint32_t>(ip_raw[14]) << 8 | ip_raw[15];
  ip.dst.value = static_cast<std::uint32_t>(ip_raw[16]) << 24 |
                 static_cast<std::uint32_t>(ip_raw[17]) << 16 |
                 static_cast<std::uint32_t>(ip_raw[18]) << 8 | ip_raw[19];

  // MF set or a nonzero offset means a fragment.
  if ((ip.flags_fragment & 0x2000) != 0 || (ip.flags_fragment & 0x1fff) != 0)
    return CodecError::fragmented;
  // total_length must cover exactly the bytes that follow the Ethernet
  // header; trailing garbage and short packets are both rejected.
  if (ip.total_length != Ipv4Header::kWireSize + r.remaining())
    return CodecError::bad_length;

  if (ip.protocol != kIpProtoUdp) return as_inner();

  UdpHeader udp;
  if (!UdpHeader::decode(r, udp)) return CodecError::truncated;
  if (udp.length != UdpHeader::kWireSize + r.remaining())
    return CodecError::bad_udp_length;

  if (udp.dst_port != opt.vxlan_port) return as_inner();

  VxlanHeader vx;
  if (!VxlanHeader::decode(r, vx)) return CodecError::truncated;
  if (!vx.vni_valid()) return as_inner();

  EthernetHeader inner_eth;
  if (!EthernetHeader::decode(r, inner_eth)) return CodecError::inner_truncated;
  std::span<const std::uint8_t> inner_payload;
  r.raw(r.remaining(), inner_payload);

  OuterFrame outer;
  outer.eth = eth;
  outer.ip = ip;
  outer.udp = udp;
  outer.vxlan = vx;
  outer.inner =
      InnerFrame{inner_eth, Bytes(inner_payload.begin(), inner_payload.end())};
  return Frame{outer};
}

}  // namespace ovsim
