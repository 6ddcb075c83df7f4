// mac.hpp

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace ovsim {

struct MacAddress {
  std::array<std::uint8_t, 6> octets{};

  static constexpr MacAddress broadcast() {
    return MacAddress{{0xff, 0xff, 0xff, 0xff, 0xff, 0xff}};
  }

  // Deterministic unicast address with the locally-administered bit set.
  static constexpr MacAddress local(std::uint8_t group, std::uint16_t a,
                                    std::uint16_t b) {
    return MacAddress{{0x02, group, static_cast<std::uint8_t>(a >> 8),
                       static_cast<std::uint8_t>(a),
                       static_cast<std::uint8_t>(b >> 8),
                       static_cast<std::uint8_t>(b)}};
  }

  bool is_broadcast() const { return *this == broadcast(); }
  bool is_multicast() const { return (octets[0] & 0x01) != 0; }
  bool is_locally_administered() const { return (octets[0] & 0x02) != 0; }

  std::string str() const {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", octets[0],
                  octets[1], octets[2], octets[3], octets[4], octets[5]);
    return std::string(buf);
  }

  static std::optional<MacAddress> parse(std::string_view s) {
    MacAddress m;
    if (s.size() != 17) return std::nullopt;
    for (int i = 0; i < 6; ++i) {
      auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
      };
      int hi = hex(s[i * 3]);
      int lo = hex(s[i * 3 + 1]);
      if (hi < 0 || lo < 0) return std::nullopt;
      if (i < 5 && s[i * 3 + 2] != ':') return std::nullopt;
      m.octets[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return m;
  }

  auto operator<=>(const MacAddress&) const = default;
};

}  // namespace ovsim
