#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace mftpe {

using MasterKey = std::array<std::uint8_t, 32>;
using Nonce = std::array<std::uint8_t, 16>;

/// 128-bit subkey drawn from the keystream (little-endian).
struct Subkey {
    unsigned __int128 value = 0;

    static Subkey from_u64(std::uint64_t v) { return {v}; }
    /// value mod m, for m >= 1.
    std::uint64_t reduce(std::uint64_t m) const { return static_cast<std::uint64_t>(value % m); }
};

/// Raw ChaCha20 block function (RFC 8439 layout): 32-byte key, 32-bit counter, 12-byte nonce.
std::array<std::uint8_t, 64> chacha20_block(std::span<const std::uint8_t, 32> key, std::uint32_t counter,
                                            std::span<const std::uint8_t, 12> nonce);

/// HChaCha20: derives a 32-byte key from a key and a 16-byte input.
std::array<std::uint8_t, 32> hchacha20(std::span<const std::uint8_t, 32> key, std::span<const std::uint8_t, 16> input);

/// Purpose label of a keystream context.
enum class StreamLabel : std::uint8_t {
    Substitution = 1,
    Permutation = 2,
    Weights = 3,
};

/// Domain-separation context. Encoded into the 96-bit ChaCha20 nonce as
/// label | channel | round (u16 LE) | block (u32 LE) | 4 zero bytes.
struct StreamContext {
    StreamLabel label = StreamLabel::Substitution;
    std::uint16_t round = 0;
    std::uint8_t channel = 0;
    std::uint32_t block = 0;

    std::array<std::uint8_t, 12> encode() const;
};

class StreamReader;

/// Keyed pseudorandom function in counter mode: session key = HChaCha20(K, nonce),
/// stream(ctx) = ChaCha20(session key, ctx.encode(), counter 0, 1, ...).
class Keystream {
public:
    Keystream(const MasterKey& key, const Nonce& nonce);

    StreamReader stream(const StreamContext& ctx) const;
    const std::array<std::uint32_t, 8>& session_words() const noexcept { return session_; }

private:
    std::array<std::uint32_t, 8> session_{};
};

/// Sequential reader over one context's stream, refilled 8 ChaCha blocks at a time.
class StreamReader {
public:
    StreamReader(const std::array<std::uint32_t, 8>& key_words, const std::array<std::uint8_t, 12>& nonce);

    std::uint32_t next_u32();
    Subkey next_subkey();
    void read(std::span<std::uint8_t> out);

    /// Uniform integer in [0, bound) by rejection sampling; bound >= 1.
    std::uint32_t uniform_below(std::uint32_t bound);

private:
    void refill();

    static constexpr std::size_t kBatchBlocks = 8;
    std::uint32_t state_[16];
    std::array<std::uint8_t, 64 * kBatchBlocks> buf_{};
    std::size_t pos_ = 64 * kBatchBlocks;
};

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Parses exactly out.size() bytes of hex; returns false on bad input.
bool from_hex(std::string_view hex, std::span<std::uint8_t> out);

}  // namespace mftpe
