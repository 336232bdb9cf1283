#include "dtfsc/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>

// Compiled without a global -mavx2; each function opts in via the target
// attribute and is only called after a runtime CPU check.
#define DTFSC_AVX2 __attribute__((target("avx2,popcnt")))

namespace dtfsc::kernels::avx2 {

namespace {

DTFSC_AVX2 inline __m256i predicate(__m256i x, __m256i v, Test test) {
  if (test == Test::equals) return _mm256_cmpeq_epi32(x, v);
  // x <= v  <=>  !(x > v)
  return _mm256_andnot_si256(_mm256_cmpgt_epi32(x, v), _mm256_set1_epi32(-1));
}

inline bool holds(Test test, std::int32_t x, std::int32_t v) {
  return test == Test::equals ? x == v : x <= v;
}

}  // namespace

DTFSC_AVX2 void count_true_by_label(std::span<const std::int32_t> column,
                                    std::span<const std::int32_t> labels, Test test,
                                    std::int32_t value, std::span<std::uint32_t> out) {
  std::fill(out.begin(), out.end(), 0u);
  const std::size_t n = std::min(column.size(), labels.size());
  const std::size_t num_labels = out.size();
  const __m256i vv = _mm256_set1_epi32(value);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(column.data() + i));
    const __m256i l = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(labels.data() + i));
    const __m256i m = predicate(x, vv, test);
    if (_mm256_testz_si256(m, m)) continue;
    for (std::size_t k = 0; k < num_labels; ++k) {
      const __m256i hit = _mm256_and_si256(m, _mm256_cmpeq_epi32(l, _mm256_set1_epi32(static_cast<int>(k))));
      out[k] += static_cast<std::uint32_t>(_mm_popcnt_u32(
          static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(hit)))));
    }
  }
  for (; i < n; ++i) {
    const auto lab = labels[i];
    if (lab >= 0 && static_cast<std::size_t>(lab) < num_labels && holds(test, column[i], value)) ++out[lab];
  }
}

DTFSC_AVX2 void predicate_mask(std::span<const std::int32_t> column, Test test, std::int32_t value,
                               std::span<std::uint8_t> mask) {
  const std::size_t n = std::min(column.size(), mask.size());
  const __m256i vv = _mm256_set1_epi32(value);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(column.data() + i));
    const unsigned bits =
        static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(predicate(x, vv, test))));
    for (int b = 0; b < 8; ++b) mask[i + b] = static_cast<std::uint8_t>((bits >> b) & 1u);
  }
  for (; i < n; ++i) mask[i] = holds(test, column[i], value) ? 1 : 0;
}

}  // namespace dtfsc::kernels::avx2

#endif
