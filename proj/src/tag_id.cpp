#include "rfid/tag_id.hpp"

#include <algorithm>

#include "rfid/errors.hpp"

namespace rfid {

TagId::TagId(TagValue value, unsigned width) : value_(value), width_(width) {
  if (width < 1 || width > kMaxTagWidth)
    throw ConfigError("tag width " + std::to_string(width) + " outside [1, 128]");
  if (value > tag_mask(width))
    throw ConfigError("tag value " + rfid::to_decimal(value) + " does not fit in " +
                      std::to_string(width) + " bits");
}

std::string to_decimal(TagValue v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string TagId::to_decimal() const { return rfid::to_decimal(value_); }

std::string TagId::to_bits() const {
  std::string out(width_, '0');
  for (unsigned i = 0; i < width_; ++i)
    if (bit(i)) out[i] = '1';
  return out;
}

TagId TagId::from_decimal(std::string_view text, unsigned width) {
  if (text.empty()) throw ConfigError("empty tag number");
  TagValue v = 0;
  const TagValue limit = tag_mask(width);
  for (char c : text) {
    if (c < '0' || c > '9')
      throw ConfigError("tag number '" + std::string(text) + "' is not decimal");
    const unsigned digit = static_cast<unsigned>(c - '0');
    if (v > (limit - digit) / 10)
      throw ConfigError("tag number '" + std::string(text) + "' does not fit in " +
                        std::to_string(width) + " bits");
    v = v * 10 + digit;
  }
  return TagId(v, width);
}

}  // namespace rfid
