// ip4.hpp

#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace ovsim {

struct Ipv4Address {
  std::uint32_t value = 0;  // host order; serialized big-endian

  static constexpr Ipv4Address from_octets(std::uint8_t a, std::uint8_t b,
                                           std::uint8_t c, std::uint8_t d) {
    return Ipv4Address{static_cast<std::uint32_t>(a) << 24 |
                       static_cast<std::uint32_t>(b) << 16 |
                       static_cast<std::uint32_t>(c) << 8 |
                       static_cast<std::uint32_t>(d)};
  }

  std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", value >> 24 & 0xff,
                  value >> 16 & 0xff, value >> 8 & 0xff, value & 0xff);
    return std::string(buf);
  }

  static std::optional<Ipv4Address> parse(std::string_view s) {
    unsigned a, b, c, d;
    char tail;
    if (std::sscanf(std::string(s).c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d,
                    &tail) != 4)
      return std::nullopt;
    if (a > 255 || b > 255 || c > 255 || d > 255) return std::nullopt;
    return from_octets(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                       static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(d));
  }

  auto operator<=>(const Ipv4Address&) const = default;
};

}  // namespace ovsim
