#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mftpe/engine.hpp"
#include "mftpe/image.hpp"
#include "mftpe/keystream.hpp"
#include "mftpe/profile.hpp"

namespace mftpe {

/// Ciphertext file. Layout (little-endian):
///
///   "MFTP" | u8 version | u8 profile id | u16 B | u16 R | 16-byte nonce |
///   u8 weight count | u8 weights[count] | PNG payload
///
/// Everything except the key is public and travels in the clear.
struct CiphertextEnvelope {
    static constexpr std::uint8_t kVersion = 1;

    std::uint8_t version = kVersion;
    FactorProfile profile = FactorProfile::sum_range();
    std::uint16_t block_size = 0;
    std::uint16_t rounds = 0;
    Nonce nonce{};
    std::vector<std::uint8_t> payload;

    std::vector<std::uint8_t> serialize() const;
    /// Throws MalformedEnvelope.
    static CiphertextEnvelope parse(std::span<const std::uint8_t> bytes);

    /// Decoded ciphertext image; MalformedEnvelope if the payload is not a usable PNG.
    Image image() const;
    /// Same envelope with a replaced payload image (noise experiments).
    CiphertextEnvelope with_image(const Image& image) const;

    friend bool operator==(const CiphertextEnvelope&, const CiphertextEnvelope&) = default;
};

CiphertextEnvelope encrypt(const Image& image, const CipherParams& params);

/// Throws MalformedEnvelope, or ParamMismatch if B does not tile the payload.
Image decrypt(const CiphertextEnvelope& envelope, const MasterKey& key);

}  // namespace mftpe
