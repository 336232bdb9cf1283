#include "dtfsc/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>

namespace dtfsc::kernels::neon {

namespace {

inline uint32x4_t predicate(int32x4_t x, int32x4_t v, Test test) {
  return test == Test::equals ? vceqq_s32(x, v) : vcleq_s32(x, v);
}

inline bool holds(Test test, std::int32_t x, std::int32_t v) {
  return test == Test::equals ? x == v : x <= v;
}

}  // namespace

void count_true_by_label(std::span<const std::int32_t> column, std::span<const std::int32_t> labels,
                         Test test, std::int32_t value, std::span<std::uint32_t> out) {
  std::fill(out.begin(), out.end(), 0u);
  const std::size_t n = std::min(column.size(), labels.size());
  const std::size_t num_labels = out.size();
  const int32x4_t vv = vdupq_n_s32(value);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t m = predicate(vld1q_s32(column.data() + i), vv, test);
    if (vmaxvq_u32(m) == 0) continue;
    const int32x4_t l = vld1q_s32(labels.data() + i);
    for (std::size_t k = 0; k < num_labels; ++k) {
      const uint32x4_t hit = vandq_u32(m, vceqq_s32(l, vdupq_n_s32(static_cast<int>(k))));
      out[k] += vaddvq_u32(vshrq_n_u32(hit, 31));
    }
  }
  for (; i < n; ++i) {
    const auto lab = labels[i];
    if (lab >= 0 && static_cast<std::size_t>(lab) < num_labels && holds(test, column[i], value)) ++out[lab];
  }
}

void predicate_mask(std::span<const std::int32_t> column, Test test, std::int32_t value,
                    std::span<std::uint8_t> mask) {
  const std::size_t n = std::min(column.size(), mask.size());
  const int32x4_t vv = vdupq_n_s32(value);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t m = vshrq_n_u32(predicate(vld1q_s32(column.data() + i), vv, test), 31);
    mask[i] = static_cast<std::uint8_t>(vgetq_lane_u32(m, 0));
    mask[i + 1] = static_cast<std::uint8_t>(vgetq_lane_u32(m, 1));
    mask[i + 2] = static_cast<std::uint8_t>(vgetq_lane_u32(m, 2));
    mask[i + 3] = static_cast<std::uint8_t>(vgetq_lane_u32(m, 3));
  }
  for (; i < n; ++i) mask[i] = holds(test, column[i], value) ? 1 : 0;
}

}  // namespace dtfsc::kernels::neon

#endif
