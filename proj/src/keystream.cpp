#include "mftpe/keystream.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "mftpe/simd/kernels.hpp"

namespace mftpe {

namespace {

constexpr std::uint32_t kSigma[4] = {0x61707865, 0x3320646e, 0x79622d32, 0x6b206574};  // "expand 32-byte k"

std::uint32_t load_le32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

void init_state(std::uint32_t state[16], const std::uint32_t key_words[8], std::uint32_t counter,
                const std::uint8_t nonce[12]) {
    for (int i = 0; i < 4; ++i) state[i] = kSigma[i];
    for (int i = 0; i < 8; ++i) state[4 + i] = key_words[i];
    state[12] = counter;
    for (int i = 0; i < 3; ++i) state[13 + i] = load_le32(nonce + 4 * i);
}

void quarter_round(std::uint32_t& a, std::uint32_t& b, std::uint32_t& c, std::uint32_t& d) {
    a += b; d ^= a; d = std::rotl(d, 16);
    c += d; b ^= c; b = std::rotl(b, 12);
    a += b; d ^= a; d = std::rotl(d, 8);
    c += d; b ^= c; b = std::rotl(b, 7);
}

}  // namespace

std::array<std::uint8_t, 64> chacha20_block(std::span<const std::uint8_t, 32> key, std::uint32_t counter,
                                            std::span<const std::uint8_t, 12> nonce) {
    std::uint32_t key_words[8];
    for (int i = 0; i < 8; ++i) key_words[i] = load_le32(key.data() + 4 * i);
    std::uint32_t state[16];
    init_state(state, key_words, counter, nonce.data());
    std::array<std::uint8_t, 64> out{};
    simd::kernels().chacha20_blocks(state, 1, out.data());
    return out;
}

std::array<std::uint8_t, 32> hchacha20(std::span<const std::uint8_t, 32> key, std::span<const std::uint8_t, 16> input) {
    std::uint32_t x[16];
    for (int i = 0; i < 4; ++i) x[i] = kSigma[i];
    for (int i = 0; i < 8; ++i) x[4 + i] = load_le32(key.data() + 4 * i);
    for (int i = 0; i < 4; ++i) x[12 + i] = load_le32(input.data() + 4 * i);
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
    std::array<std::uint8_t, 32> out{};
    const int picks[8] = {0, 1, 2, 3, 12, 13, 14, 15};
    for (int i = 0; i < 8; ++i)
        for (int b = 0; b < 4; ++b) out[4 * i + b] = static_cast<std::uint8_t>(x[picks[i]] >> (8 * b));
    return out;
}

std::array<std::uint8_t, 12> StreamContext::encode() const {
    std::array<std::uint8_t, 12> n{};
    n[0] = static_cast<std::uint8_t>(label);
    n[1] = channel;
    n[2] = static_cast<std::uint8_t>(round);
    n[3] = static_cast<std::uint8_t>(round >> 8);
    for (int i = 0; i < 4; ++i) n[4 + i] = static_cast<std::uint8_t>(block >> (8 * i));
    return n;
}

Keystream::Keystream(const MasterKey& key, const Nonce& nonce) {
    const auto session = hchacha20(key, nonce);
    for (int i = 0; i < 8; ++i) session_[i] = load_le32(session.data() + 4 * i);
}

StreamReader Keystream::stream(const StreamContext& ctx) const { return StreamReader(session_, ctx.encode()); }

StreamReader::StreamReader(const std::array<std::uint32_t, 8>& key_words, const std::array<std::uint8_t, 12>& nonce) {
    init_state(state_, key_words.data(), 0, nonce.data());
}

void StreamReader::refill() {
    simd::kernels().chacha20_blocks(state_, kBatchBlocks, buf_.data());
    state_[12] += kBatchBlocks;
    pos_ = 0;
}

void StreamReader::read(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        if (pos_ == buf_.size()) refill();
        const std::size_t take = std::min(out.size() - done, buf_.size() - pos_);
        std::memcpy(out.data() + done, buf_.data() + pos_, take);
        pos_ += take;
        done += take;
    }
}

std::uint32_t StreamReader::next_u32() {
    if (buf_.size() - pos_ < 4) {
        std::uint8_t b[4];
        read(b);
        return load_le32(b);
    }
    const std::uint32_t v = load_le32(buf_.data() + pos_);
    pos_ += 4;
    return v;
}

Subkey StreamReader::next_subkey() {
    std::uint8_t b[16];
    read(b);
    unsigned __int128 v = 0;
    for (int i = 15; i >= 0; --i) v = (v << 8) | b[i];
    return {v};
}

std::uint32_t StreamReader::uniform_below(std::uint32_t bound) {
    // Accept x >= 2^32 mod bound: the accepted range is a multiple of bound.
    const std::uint32_t threshold = static_cast<std::uint32_t>(-bound) % bound;
    for (;;) {
        const std::uint32_t x = next_u32();
        if (x >= threshold) return x % bound;
    }
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        s.push_back(kDigits[b >> 4]);
        s.push_back(kDigits[b & 15]);
    }
    return s;
}

bool from_hex(std::string_view hex, std::span<std::uint8_t> out) {
    if (hex.size() != out.size() * 2) return false;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) return false;
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return true;
}

}  // namespace mftpe
