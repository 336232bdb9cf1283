#pragma once

// Column kernels used by decision-tree induction. Each kernel has a scalar
// reference and vector variants; the active variant is picked once at startup
// from the CPU's capabilities and can be overridden for testing.

#include <cstdint>
#include <span>

namespace dtfsc::kernels {

enum class Isa : std::uint8_t { scalar, avx2, neon };

enum class Test : std::uint8_t { equals, less_equal };

const char* to_string(Isa isa);

bool isa_supported(Isa isa);
Isa active_isa();
/// Overrides dispatch; throws std::invalid_argument for unsupported ISAs.
void force_isa(Isa isa);
/// Restores the automatically detected ISA.
void reset_isa();

/// out[l] = #{ i : test(column[i], value) && labels[i] == l } for l < out.size().
/// Labels outside [0, out.size()) are ignored.
void count_true_by_label(std::span<const std::int32_t> column, std::span<const std::int32_t> labels,
                         Test test, std::int32_t value, std::span<std::uint32_t> out);

/// mask[i] = test(column[i], value) ? 1 : 0.
void predicate_mask(std::span<const std::int32_t> column, Test test, std::int32_t value,
                    std::span<std::uint8_t> mask);

namespace scalar {
void count_true_by_label(std::span<const std::int32_t> column, std::span<const std::int32_t> labels,
                         Test test, std::int32_t value, std::span<std::uint32_t> out);
void predicate_mask(std::span<const std::int32_t> column, Test test, std::int32_t value,
                    std::span<std::uint8_t> mask);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void count_true_by_label(std::span<const std::int32_t> column, std::span<const std::int32_t> labels,
                         Test test, std::int32_t value, std::span<std::uint32_t> out);
void predicate_mask(std::span<const std::int32_t> column, Test test, std::int32_t value,
                    std::span<std::uint8_t> mask);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void count_true_by_label(std::span<const std::int32_t> column, std::span<const std::int32_t> labels,
                         Test test, std::int32_t value, std::span<std::uint32_t> out);
void predicate_mask(std::span<const std::int32_t> column, Test test, std::int32_t value,
                    std::span<std::uint8_t> mask);
}  // namespace neon
#endif

}  // namespace dtfsc::kernels
