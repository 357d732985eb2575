#include <atomic>

#include "rfid/kernels.hpp"

namespace rfid::kernels {

namespace {

Isa probe() {
#if RFID_HAVE_AVX2_KERNELS
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "?";
}

Isa detected_isa() {
  static const Isa isa = probe();
  return isa;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

bool set_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) return false;
  active().store(isa, std::memory_order_relaxed);
  return true;
}

void coverage_mask(const CoverageQuery& q, std::span<const double> xs,
                   std::span<const double> ys, std::span<std::uint8_t> out) {
#if RFID_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::coverage_mask(q, xs, ys, out);
#endif
  scalar::coverage_mask(q, xs, ys, out);
}

PrefixMatch prefix_match(std::span<const std::uint64_t> keys, std::uint64_t pattern,
                         std::uint64_t mask) {
#if RFID_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::prefix_match(keys, pattern, mask);
#endif
  return scalar::prefix_match(keys, pattern, mask);
}

}  // namespace rfid::kernels
