#pragma once

// Data-parallel inner loops of the simulator. Every kernel has a scalar
// reference in `kernels::scalar` and, on x86-64, an AVX2 variant in
// `kernels::avx2`. The free functions in `kernels` dispatch at runtime.
// Variants are required to return bit-identical results: they evaluate the
// same IEEE operations in the same order and the build disables FP
// contraction.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace rfid::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Best variant the running CPU supports.
Isa detected_isa();
/// Variant used by the dispatching entry points.
Isa active_isa();
/// Pins the dispatch target. Returns false (and changes nothing) if the CPU
/// cannot run `isa`.
bool set_isa(Isa isa);

/// One reader's coverage test, pre-reduced so the kernel only multiplies,
/// divides and compares.
struct CoverageQuery {
  double reader_x = 0.0;
  double reader_y = 0.0;
  double boresight_x = 1.0;   // unit vector
  double boresight_y = 0.0;
  double cos_max_angle = -1.0;
  bool angle_gated = false;   // false: omnidirectional, skip the cone test
  double field_numerator = 1.0;    // P * G * a
  double tag_threshold = 1.0;
  double return_numerator = 1.0;   // P * G * a^2
  double detect_threshold = 1.0;
  double max_range_sq = std::numeric_limits<double>::infinity();
};

/// out[i] = 1 iff the tag at (xs[i], ys[i]) is powered, heard, inside the
/// cone and inside the configured range; 0 otherwise. A tag exactly at the
/// reader counts as covered.
void coverage_mask(const CoverageQuery& q, std::span<const double> xs,
                   std::span<const double> ys, std::span<std::uint8_t> out);

struct PrefixMatch {
  std::size_t count = 0;
  std::size_t first = 0;  // index of the first match; meaningful iff count > 0
};

/// Counts keys with (key & mask) == pattern.
PrefixMatch prefix_match(std::span<const std::uint64_t> keys, std::uint64_t pattern,
                         std::uint64_t mask);

namespace scalar {
void coverage_mask(const CoverageQuery& q, std::span<const double> xs,
                   std::span<const double> ys, std::span<std::uint8_t> out);
PrefixMatch prefix_match(std::span<const std::uint64_t> keys, std::uint64_t pattern,
                         std::uint64_t mask);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define RFID_HAVE_AVX2_KERNELS 1
namespace avx2 {
void coverage_mask(const CoverageQuery& q, std::span<const double> xs,
                   std::span<const double> ys, std::span<std::uint8_t> out);
PrefixMatch prefix_match(std::span<const std::uint64_t> keys, std::uint64_t pattern,
                         std::uint64_t mask);
}  // namespace avx2
#else
#define RFID_HAVE_AVX2_KERNELS 0
#endif

}  // namespace rfid::kernels
