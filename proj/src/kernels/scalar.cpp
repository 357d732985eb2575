#include <cmath>

#include "kernel_common.hpp"
#include "rfid/kernels.hpp"

namespace rfid::kernels::scalar {

void coverage_mask(const CoverageQuery& q, std::span<const double> xs,
                   std::span<const double> ys, std::span<std::uint8_t> out) {
  check_coverage_spans(xs, ys, out);
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = covered_one(q, xs[i], ys[i]);
}

PrefixMatch prefix_match(std::span<const std::uint64_t> keys, std::uint64_t pattern,
                         std::uint64_t mask) {
  PrefixMatch m;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if ((keys[i] & mask) == pattern) {
      if (m.count == 0) m.first = i;
      ++m.count;
    }
  }
  return m;
}

}  // namespace rfid::kernels::scalar
