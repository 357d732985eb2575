#include "rfid/kernels.hpp"

#if RFID_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <bit>

#include "kernel_common.hpp"

namespace rfid::kernels::avx2 {

__attribute__((target("avx2"))) void coverage_mask(const CoverageQuery& q,
                                                   std::span<const double> xs,
                                                   std::span<const double> ys,
                                                   std::span<std::uint8_t> out) {
  check_coverage_spans(xs, ys, out);
  const std::size_t n = xs.size();
  const __m256d rx = _mm256_set1_pd(q.reader_x);
  const __m256d ry = _mm256_set1_pd(q.reader_y);
  const __m256d bx = _mm256_set1_pd(q.boresight_x);
  const __m256d by = _mm256_set1_pd(q.boresight_y);
  const __m256d cmax = _mm256_set1_pd(q.cos_max_angle);
  const __m256d fnum = _mm256_set1_pd(q.field_numerator);
  const __m256d fthr = _mm256_set1_pd(q.tag_threshold);
  const __m256d rnum = _mm256_set1_pd(q.return_numerator);
  const __m256d rthr = _mm256_set1_pd(q.detect_threshold);
  const __m256d rmax = _mm256_set1_pd(q.max_range_sq);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + i), rx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + i), ry);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const __m256d field = _mm256_div_pd(fnum, d2);
    const __m256d ret = _mm256_div_pd(rnum, _mm256_mul_pd(d2, d2));
    __m256d ok = _mm256_and_pd(_mm256_cmp_pd(field, fthr, _CMP_GE_OQ),
                               _mm256_cmp_pd(ret, rthr, _CMP_GE_OQ));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(d2, rmax, _CMP_LE_OQ));
    if (q.angle_gated) {
      const __m256d dot = _mm256_add_pd(_mm256_mul_pd(dx, bx), _mm256_mul_pd(dy, by));
      const __m256d cone = _mm256_mul_pd(_mm256_sqrt_pd(d2), cmax);
      ok = _mm256_and_pd(ok, _mm256_cmp_pd(dot, cone, _CMP_GE_OQ));
    }
    const int bits = _mm256_movemask_pd(ok);
    out[i + 0] = static_cast<std::uint8_t>(bits & 1);
    out[i + 1] = static_cast<std::uint8_t>((bits >> 1) & 1);
    out[i + 2] = static_cast<std::uint8_t>((bits >> 2) & 1);
    out[i + 3] = static_cast<std::uint8_t>((bits >> 3) & 1);
  }
  for (; i < n; ++i) out[i] = covered_one(q, xs[i], ys[i]);
}

__attribute__((target("avx2"))) PrefixMatch prefix_match(std::span<const std::uint64_t> keys,
                                                         std::uint64_t pattern,
                                                         std::uint64_t mask) {
  PrefixMatch m;
  const std::size_t n = keys.size();
  const __m256i vmask = _mm256_set1_epi64x(static_cast<long long>(mask));
  const __m256i vpat = _mm256_set1_epi64x(static_cast<long long>(pattern));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i k =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(keys.data() + i));
    const __m256i eq = _mm256_cmpeq_epi64(_mm256_and_si256(k, vmask), vpat);
    const auto bits = static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(eq)));
    if (bits != 0) {
      if (m.count == 0) m.first = i + static_cast<std::size_t>(std::countr_zero(bits));
      m.count += static_cast<std::size_t>(std::popcount(bits));
    }
  }
  for (; i < n; ++i) {
    if ((keys[i] & mask) == pattern) {
      if (m.count == 0) m.first = i;
      ++m.count;
    }
  }
  return m;
}

}  // namespace rfid::kernels::avx2

#endif
