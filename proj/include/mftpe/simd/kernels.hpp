#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference in
// namespace `scalar`; vector variants must produce bit-identical output and
// are selected once at runtime from the CPU's feature flags.

#include <cstddef>
#include <cstdint>
#include <string_view>

#if defined(__x86_64__) || defined(_M_X64)
#define MFTPE_SIMD_X86 1
#else
#define MFTPE_SIMD_X86 0
#endif

namespace mftpe::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

struct MinMax {
    std::uint8_t min;
    std::uint8_t max;
};

/// Kernel signatures.
///
/// chacha20_blocks: writes `nblocks` consecutive 64-byte ChaCha20 blocks for
///   `state` (16 words, words 12.. hold the counter/nonce in IETF layout) with
///   the 32-bit counter in word 12 advanced per block.
/// segment_sums: for one image row of `width` bytes, adds the sum of every
///   `segment`-wide run into acc[x / segment].
/// minmax_u8: minimum and maximum of a non-empty byte range.
struct KernelTable {
    void (*chacha20_blocks)(const std::uint32_t state[16], std::size_t nblocks, std::uint8_t* out);
    void (*segment_sums)(const std::uint8_t* row, std::size_t width, std::size_t segment, std::uint32_t* acc);
    MinMax (*minmax_u8)(const std::uint8_t* data, std::size_t size);
    Isa isa;
};

namespace scalar {
void chacha20_blocks(const std::uint32_t state[16], std::size_t nblocks, std::uint8_t* out);
void segment_sums(const std::uint8_t* row, std::size_t width, std::size_t segment, std::uint32_t* acc);
MinMax minmax_u8(const std::uint8_t* data, std::size_t size);
}  // namespace scalar

#if MFTPE_SIMD_X86
namespace avx2 {
void chacha20_blocks(const std::uint32_t state[16], std::size_t nblocks, std::uint8_t* out);
void segment_sums(const std::uint8_t* row, std::size_t width, std::size_t segment, std::uint32_t* acc);
MinMax minmax_u8(const std::uint8_t* data, std::size_t size);
}  // namespace avx2
#endif

/// Best ISA the running CPU supports.
Isa detected_isa() noexcept;

/// Table for a specific ISA; returns the scalar table if `isa` is unavailable.
const KernelTable& table_for(Isa isa) noexcept;

/// Active kernel table. Defaults to detected_isa(); the MFTPE_FORCE_SCALAR
/// environment variable pins it to the scalar reference.
const KernelTable& kernels() noexcept;

}  // namespace mftpe::simd
