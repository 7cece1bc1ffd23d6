#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mftpe/image.hpp"
#include "mftpe/keystream.hpp"
#include "mftpe/profile.hpp"

namespace mftpe {

/// Encryption parameters. Construction validates them (InvalidParams on failure).
class CipherParams {
public:
    static constexpr int kDefaultBlockSize = 16;
    static constexpr int kDefaultRounds = 3;

    CipherParams(const FactorProfile& profile, int block_size, int rounds, const MasterKey& key, const Nonce& nonce);

    const FactorProfile& profile() const noexcept { return profile_; }
    int block_size() const noexcept { return block_size_; }
    int rounds() const noexcept { return rounds_; }
    const MasterKey& key() const noexcept { return key_; }
    const Nonce& nonce() const noexcept { return nonce_; }

private:
    FactorProfile profile_;
    int block_size_;
    int rounds_;
    MasterKey key_;
    Nonce nonce_;
};

/// Public weights for the weighted-mean profile, each in [1, 8], derived from (key, nonce).
Weights derive_weights(const MasterKey& key, const Nonce& nonce);

/// Number of independent position classes the block permutation shuffles within.
/// The weighted-mean profile keeps each pixel in its group slot class (position mod 3)
/// so the block's position-weighted sum survives permutation; the others shuffle the whole block.
int permutation_classes(const FactorProfile& profile) noexcept;

/// Keyed Fisher-Yates shuffle of a block (within each position class), driven by `stream`.
void permute_block(std::span<std::uint8_t> block, StreamReader& stream, int classes = 1);
/// Undoes permute_block given a reader positioned identically.
void inverse_permute_block(std::span<std::uint8_t> block, StreamReader& stream, int classes = 1);

/// One round (1-based index) applied in place: per channel and block,
/// substitution of every group then permutation of the block.
void encrypt_round(Image& image, const CipherParams& params, int round);
/// Inverse of encrypt_round with the same round index.
void decrypt_round(Image& image, const CipherParams& params, int round);

/// Rounds 1..R. Throws NonDivisibleBlockSize / BlockTooSmall / EmptyImage.
Image encrypt_image(const Image& image, const CipherParams& params);
/// Rounds R..1.
Image decrypt_image(const Image& cipher, const CipherParams& params);

}  // namespace mftpe
