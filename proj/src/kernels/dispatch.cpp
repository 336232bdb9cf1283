#include <atomic>
#include <stdexcept>
#include <string>

#include "dtfsc/kernels.hpp"

namespace dtfsc::kernels {

namespace {

Isa detect() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt")) return Isa::avx2;
#elif defined(__aarch64__)
  return Isa::neon;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::invalid_argument(std::string("ISA not supported: ") + to_string(isa));
  current().store(isa, std::memory_order_relaxed);
}

void reset_isa() { current().store(detect(), std::memory_order_relaxed); }

void count_true_by_label(std::span<const std::int32_t> column, std::span<const std::int32_t> labels,
                         Test test, std::int32_t value, std::span<std::uint32_t> out) {
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return avx2::count_true_by_label(column, labels, test, value, out);
#endif
#if defined(__aarch64__)
    case Isa::neon: return neon::count_true_by_label(column, labels, test, value, out);
#endif
    default: return scalar::count_true_by_label(column, labels, test, value, out);
  }
}

void predicate_mask(std::span<const std::int32_t> column, Test test, std::int32_t value,
                    std::span<std::uint8_t> mask) {
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return avx2::predicate_mask(column, test, value, mask);
#endif
#if defined(__aarch64__)
    case Isa::neon: return neon::predicate_mask(column, test, value, mask);
#endif
    default: return scalar::predicate_mask(column, test, value, mask);
  }
}

}  // namespace dtfsc::kernels
