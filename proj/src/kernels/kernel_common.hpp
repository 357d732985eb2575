#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "rfid/errors.hpp"
#include "rfid/kernels.hpp"

namespace rfid::kernels {

inline void check_coverage_spans(std::span<const double> xs, std::span<const double> ys,
                                 std::span<std::uint8_t> out) {
  if (xs.size() != ys.size() || out.size() != xs.size())
    throw ContractViolation("coverage_mask: xs, ys and out must have equal length");
}

// Reference evaluation for one tag. The AVX2 lanes reproduce this exact
// operation sequence.
inline std::uint8_t covered_one(const CoverageQuery& q, double x, double y) {
  const double dx = x - q.reader_x;
  const double dy = y - q.reader_y;
  const double d2 = dx * dx + dy * dy;
  const double field = q.field_numerator / d2;
  const double ret = q.return_numerator / (d2 * d2);
  bool ok = field >= q.tag_threshold && ret >= q.detect_threshold && d2 <= q.max_range_sq;
  if (q.angle_gated) {
    const double dot = dx * q.boresight_x + dy * q.boresight_y;
    ok = ok && dot >= std::sqrt(d2) * q.cos_max_angle;
  }
  return ok ? 1 : 0;
}

}  // namespace rfid::kernels
