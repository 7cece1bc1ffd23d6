// AVX2 kernels. Functions carry target attributes instead of compiling the
// whole file with -mavx2, so nothing here leaks AVX2 code into inline
// functions shared with other translation units.

#include "mftpe/simd/kernels.hpp"

#if MFTPE_SIMD_X86

#include <immintrin.h>

#define MFTPE_AVX2 __attribute__((target("avx2")))

namespace mftpe::simd::avx2 {

namespace {

MFTPE_AVX2 inline __m256i rotl16(__m256i v) {
    const __m256i mask = _mm256_setr_epi8(2, 3, 0, 1, 6, 7, 4, 5, 10, 11, 8, 9, 14, 15, 12, 13,
                                          2, 3, 0, 1, 6, 7, 4, 5, 10, 11, 8, 9, 14, 15, 12, 13);
    return _mm256_shuffle_epi8(v, mask);
}

MFTPE_AVX2 inline __m256i rotl8(__m256i v) {
    const __m256i mask = _mm256_setr_epi8(3, 0, 1, 2, 7, 4, 5, 6, 11, 8, 9, 10, 15, 12, 13, 14,
                                          3, 0, 1, 2, 7, 4, 5, 6, 11, 8, 9, 10, 15, 12, 13, 14);
    return _mm256_shuffle_epi8(v, mask);
}

template <int N>
MFTPE_AVX2 inline __m256i rotl(__m256i v) {
    return _mm256_or_si256(_mm256_slli_epi32(v, N), _mm256_srli_epi32(v, 32 - N));
}

MFTPE_AVX2 inline void quarter_round(__m256i& a, __m256i& b, __m256i& c, __m256i& d) {
    a = _mm256_add_epi32(a, b); d = rotl16(_mm256_xor_si256(d, a));
    c = _mm256_add_epi32(c, d); b = rotl<12>(_mm256_xor_si256(b, c));
    a = _mm256_add_epi32(a, b); d = rotl8(_mm256_xor_si256(d, a));
    c = _mm256_add_epi32(c, d); b = rotl<7>(_mm256_xor_si256(b, c));
}

// Eight blocks at once: lane j of x[i] is word i of block counter+j.
MFTPE_AVX2 void eight_blocks(const std::uint32_t state[16], std::uint8_t* out) {
    __m256i in[16];
    for (int i = 0; i < 16; ++i) in[i] = _mm256_set1_epi32(static_cast<int>(state[i]));
    in[12] = _mm256_add_epi32(in[12], _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7));

    __m256i x[16];
    for (int i = 0; i < 16; ++i) x[i] = in[i];
    for (int r = 0; r < 10; ++r) {
        quarter_round(x[0], x[4], x[8], x[12]);
        quarter_round(x[1], x[5], x[9], x[13]);
        quarter_round(x[2], x[6], x[10], x[14]);
        quarter_round(x[3], x[7], x[11], x[15]);
        quarter_round(x[0], x[5], x[10], x[15]);
        quarter_round(x[1], x[6], x[11], x[12]);
        quarter_round(x[2], x[7], x[8], x[13]);
        quarter_round(x[3], x[4], x[9], x[14]);
    }

    alignas(32) std::uint32_t words[16][8];
    for (int i = 0; i < 16; ++i)
        _mm256_store_si256(reinterpret_cast<__m256i*>(words[i]), _mm256_add_epi32(x[i], in[i]));
    // Little-endian host: word bytes are already in ChaCha serialization order.
    for (int blk = 0; blk < 8; ++blk) {
        auto* dst = reinterpret_cast<std::uint32_t*>(out + 64 * blk);
        for (int i = 0; i < 16; ++i) dst[i] = words[i][blk];
    }
}

}  // namespace

MFTPE_AVX2 void chacha20_blocks(const std::uint32_t state[16], std::size_t nblocks, std::uint8_t* out) {
    std::uint32_t s[16];
    for (int i = 0; i < 16; ++i) s[i] = state[i];
    while (nblocks >= 8) {
        eight_blocks(s, out);
        s[12] += 8;
        out += 512;
        nblocks -= 8;
    }
    if (nblocks > 0) scalar::chacha20_blocks(s, nblocks, out);
}

MFTPE_AVX2 void segment_sums(const std::uint8_t* row, std::size_t width, std::size_t segment, std::uint32_t* acc) {
    if (segment % 8 != 0) {
        scalar::segment_sums(row, width, segment, acc);
        return;
    }
    const __m256i zero = _mm256_setzero_si256();
    std::size_t x = 0;
    for (; x + 32 <= width; x += 32) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + x));
        alignas(32) std::uint64_t part[4];
        _mm256_store_si256(reinterpret_cast<__m256i*>(part), _mm256_sad_epu8(v, zero));
        for (std::size_t l = 0; l < 4; ++l) acc[(x + 8 * l) / segment] += static_cast<std::uint32_t>(part[l]);
    }
    for (; x < width; ++x) acc[x / segment] += row[x];
}

MFTPE_AVX2 MinMax minmax_u8(const std::uint8_t* data, std::size_t size) {
    std::size_t i = 0;
    std::uint8_t lo = 255;
    std::uint8_t hi = 0;
    if (size >= 32) {
        __m256i vmin = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data));
        __m256i vmax = vmin;
        for (i = 32; i + 32 <= size; i += 32) {
            __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
            vmin = _mm256_min_epu8(vmin, v);
            vmax = _mm256_max_epu8(vmax, v);
        }
        alignas(32) std::uint8_t mins[32];
        alignas(32) std::uint8_t maxs[32];
        _mm256_store_si256(reinterpret_cast<__m256i*>(mins), vmin);
        _mm256_store_si256(reinterpret_cast<__m256i*>(maxs), vmax);
        for (int l = 0; l < 32; ++l) {
            if (mins[l] < lo) lo = mins[l];
            if (maxs[l] > hi) hi = maxs[l];
        }
    }
    for (; i < size; ++i) {
        if (data[i] < lo) lo = data[i];
        if (data[i] > hi) hi = data[i];
    }
    return {lo, hi};
}

}  // namespace mftpe::simd::avx2

#endif  // MFTPE_SIMD_X86
