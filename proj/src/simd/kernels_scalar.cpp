#include <algorithm>
#include <bit>
#include <cstring>

#include "mftpe/simd/kernels.hpp"

namespace mftpe::simd::scalar {

namespace {

inline void quarter_round(std::uint32_t& a, std::uint32_t& b, std::uint32_t& c, std::uint32_t& d) {
    a += b; d ^= a; d = std::rotl(d, 16);
    c += d; b ^= c; b = std::rotl(b, 12);
    a += b; d ^= a; d = std::rotl(d, 8);
    c += d; b ^= c; b = std::rotl(b, 7);
}

inline void store_le32(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
    p[2] = static_cast<std::uint8_t>(v >> 16);
    p[3] = static_cast<std::uint8_t>(v >> 24);
}

}  // namespace

void chacha20_blocks(const std::uint32_t state[16], std::size_t nblocks, std::uint8_t* out) {
    std::uint32_t input[16];
    std::memcpy(input, state, sizeof(input));
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
        std::uint32_t x[16];
        std::memcpy(x, input, sizeof(x));
        for (int i = 0; i < 10; ++i) {
            quarter_round(x[0], x[4], x[8], x[12]);
            quarter_round(x[1], x[5], x[9], x[13]);
            quarter_round(x[2], x[6], x[10], x[14]);
            quarter_round(x[3], x[7], x[11], x[15]);
            quarter_round(x[0], x[5], x[10], x[15]);
            quarter_round(x[1], x[6], x[11], x[12]);
            quarter_round(x[2], x[7], x[8], x[13]);
            quarter_round(x[3], x[4], x[9], x[14]);
        }
        for (int i = 0; i < 16; ++i) store_le32(out + 4 * i, x[i] + input[i]);
        out += 64;
        ++input[12];
    }
}

void segment_sums(const std::uint8_t* row, std::size_t width, std::size_t segment, std::uint32_t* acc) {
    for (std::size_t x = 0; x < width; ++x) acc[x / segment] += row[x];
}

MinMax minmax_u8(const std::uint8_t* data, std::size_t size) {
    auto [lo, hi] = std::minmax_element(data, data + size);
    return {*lo, *hi};
}

}  // namespace mftpe::simd::scalar
