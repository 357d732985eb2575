#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace rfid {

using TagValue = unsigned __int128;

inline constexpr unsigned kDefaultTagWidth = 16;
inline constexpr unsigned kMaxTagWidth = 128;

/// Fixed-width identifier of a passive tag. Bits are addressed MSB-first.
class TagId {
 public:
  constexpr TagId() = default;

  /// Throws ConfigError unless 1 <= width <= 128 and value < 2^width.
  TagId(TagValue value, unsigned width = kDefaultTagWidth);

  constexpr TagValue value() const noexcept { return value_; }
  constexpr unsigned width() const noexcept { return width_; }

  /// Bit `i` counted from the most significant end (i = 0 is the MSB).
  bool bit(unsigned i) const noexcept {
    return ((value_ >> (width_ - 1 - i)) & 1u) != 0;
  }

  std::string to_decimal() const;
  /// MSB-first string of '0'/'1', exactly width() characters.
  std::string to_bits() const;

  static TagId from_decimal(std::string_view text, unsigned width = kDefaultTagWidth);

  friend constexpr bool operator==(const TagId&, const TagId&) = default;
  friend constexpr std::strong_ordering operator<=>(const TagId& a, const TagId& b) {
    if (auto c = a.width_ <=> b.width_; c != 0) return c;
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  TagValue value_ = 0;
  unsigned width_ = kDefaultTagWidth;
};

/// 2^width - 1 without overflowing at width 128.
constexpr TagValue tag_mask(unsigned width) {
  return width >= 128 ? ~TagValue{0} : ((TagValue{1} << width) - 1);
}

std::string to_decimal(TagValue v);

struct TagIdHash {
  std::size_t operator()(const TagId& t) const noexcept {
    auto lo = static_cast<std::uint64_t>(t.value());
    auto hi = static_cast<std::uint64_t>(t.value() >> 64);
    std::size_t h = std::hash<std::uint64_t>{}(lo);
    h ^= std::hash<std::uint64_t>{}(hi) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h ^ t.width();
  }
};

}  // namespace rfid
