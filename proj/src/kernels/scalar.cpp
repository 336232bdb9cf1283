#include "dtfsc/kernels.hpp"

#include <algorithm>

namespace dtfsc::kernels::scalar {

namespace {
inline bool holds(Test test, std::int32_t x, std::int32_t v) {
  return test == Test::equals ? x == v : x <= v;
}
}  // namespace

void count_true_by_label(std::span<const std::int32_t> column, std::span<const std::int32_t> labels,
                         Test test, std::int32_t value, std::span<std::uint32_t> out) {
  std::fill(out.begin(), out.end(), 0u);
  const std::size_t n = std::min(column.size(), labels.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto l = labels[i];
    if (l >= 0 && static_cast<std::size_t>(l) < out.size() && holds(test, column[i], value)) ++out[l];
  }
}

void predicate_mask(std::span<const std::int32_t> column, Test test, std::int32_t value,
                    std::span<std::uint8_t> mask) {
  const std::size_t n = std::min(column.size(), mask.size());
  for (std::size_t i = 0; i < n; ++i) mask[i] = holds(test, column[i], value) ? 1 : 0;
}

}  // namespace dtfsc::kernels::scalar
