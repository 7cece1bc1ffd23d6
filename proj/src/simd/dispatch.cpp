#include <cstdlib>

#include "mftpe/simd/kernels.hpp"

namespace mftpe::simd {

namespace {

constexpr KernelTable kScalar{&scalar::chacha20_blocks, &scalar::segment_sums, &scalar::minmax_u8, Isa::Scalar};

#if MFTPE_SIMD_X86
constexpr KernelTable kAvx2{&avx2::chacha20_blocks, &avx2::segment_sums, &avx2::minmax_u8, Isa::Avx2};
#endif

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

Isa detected_isa() noexcept {
#if MFTPE_SIMD_X86 && (defined(__GNUC__) || defined(__clang__))
    if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
    return Isa::Scalar;
}

const KernelTable& table_for(Isa isa) noexcept {
#if MFTPE_SIMD_X86
    if (isa == Isa::Avx2 && detected_isa() == Isa::Avx2) return kAvx2;
#endif
    (void)isa;
    return kScalar;
}

const KernelTable& kernels() noexcept {
    static const KernelTable& active = []() -> const KernelTable& {
        if (std::getenv("MFTPE_FORCE_SCALAR") != nullptr) return kScalar;
        return table_for(detected_isa());
    }();
    return active;
}

}  // namespace mftpe::simd
