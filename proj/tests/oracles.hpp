#pragma once

// Independent reference computations used by the unit and acceptance
// suites. Nothing here calls into the code under test except for plain
// value types.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rfid/tag_id.hpp"

namespace rfid::oracle {

/// Brute-force binary tree walk over plain integers: every visited prefix
/// is one query, collisions split on the next bit, and a non-empty field
/// ends with one silent root query.
struct WalkTally {
  std::uint64_t queries = 0;
  std::uint64_t bits = 0;
  std::vector<TagValue> order;
};

inline void walk_subtree(const std::vector<TagValue>& responders, unsigned depth, unsigned width,
                         unsigned overhead, WalkTally& t) {
  t.queries += 1;
  t.bits += overhead + depth + responders.size() * (width + 8u);
  if (responders.size() == 1) t.order.push_back(responders.front());
  if (responders.size() < 2) return;
  std::vector<TagValue> zeros, ones;
  for (TagValue v : responders) ((v >> (width - 1 - depth)) & 1u ? ones : zeros).push_back(v);
  walk_subtree(zeros, depth + 1, width, overhead, t);
  walk_subtree(ones, depth + 1, width, overhead, t);
}

inline WalkTally tree_walk(const std::vector<TagValue>& tags, unsigned width,
                           unsigned overhead = 16) {
  WalkTally t;
  walk_subtree(tags, 0, width, overhead, t);
  if (!tags.empty()) {
    t.queries += 1;
    t.bits += overhead;
  }
  return t;
}

/// CRC as the remainder of M(x) * x^8 modulo x^8 + x^2 + x + 1, computed by
/// long division on a bit vector.
inline std::uint8_t crc8_by_division(const std::vector<int>& message) {
  std::vector<int> work = message;
  work.insert(work.end(), 8, 0);
  const int g[9] = {1, 0, 0, 0, 0, 0, 1, 1, 1};  // x^8 .. x^0
  for (std::size_t i = 0; i + 8 < work.size(); ++i) {
    if (work[i] == 0) continue;
    for (int k = 0; k < 9; ++k) work[i + k] ^= g[k];
  }
  std::uint8_t r = 0;
  for (std::size_t i = work.size() - 8; i < work.size(); ++i)
    r = static_cast<std::uint8_t>((r << 1) | work[i]);
  return r;
}

/// Largest x in [lo, hi] with pred(x) true, assuming pred is true then false.
inline double bisect_last_true(const std::function<bool(double)>& pred, double lo, double hi) {
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Seconds since midnight of "HH:MM:SS AM|PM" by direct arithmetic.
inline long clock_seconds(const std::string& text) {
  const long h = std::stol(text.substr(0, 2));
  const long m = std::stol(text.substr(3, 2));
  const long s = std::stol(text.substr(6, 2));
  const bool pm = text.substr(9, 2) == "PM";
  long h24 = h % 12 + (pm ? 12 : 0);
  return h24 * 3600 + m * 60 + s;
}

}  // namespace rfid::oracle
