#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mftpe/combinatorics.hpp"
#include "mftpe/image.hpp"
#include "mftpe/keystream.hpp"
#include "mftpe/profile.hpp"

namespace mftpe {

/// Rank -> encipher -> unrank substitution of one pixel group.
///
/// For the enumerated profiles (SumOnly, SumGeoMean, SumWeightedMean) the
/// serial number is the group's index in the lexicographic enumeration of its
/// constrained set and is enciphered as (SN + K) mod |set|.
///
/// For SumRange (pairs) the serial number is the first pixel a, enciphered
/// inside the window [alpha, beta] derived from the pair sum and the block
/// extremes; a pair touching the block min or max is swapped instead.
///
/// Instances cache constrained sets per (sum, product) or (sum, weighted sum)
/// key and are therefore not thread-safe; use one per worker.
class RankCipher {
public:
    explicit RankCipher(const FactorProfile& profile, int d = kMaxPixel);

    const FactorProfile& profile() const noexcept { return profile_; }
    int d() const noexcept { return d_; }

    /// In place. `block` is required for SumRange and ignored otherwise.
    void substitute(std::span<std::uint8_t> group, std::optional<BlockRange> block, Subkey key);
    void desubstitute(std::span<std::uint8_t> group, std::optional<BlockRange> block, Subkey key);

    /// Size of the set the group is enciphered within (1 for swap-rule pairs).
    std::uint64_t set_size(std::span<const std::uint8_t> group, std::optional<BlockRange> block);

    /// Serial number of the group within its set (the first pixel for SumRange normal pairs).
    std::uint64_t rank(std::span<const std::uint8_t> group, std::optional<BlockRange> block);

private:
    void check(std::span<const std::uint8_t> group, const std::optional<BlockRange>& block) const;
    const std::vector<Triple>& constrained_set(std::span<const std::uint8_t> group);
    void apply(std::span<std::uint8_t> group, std::optional<BlockRange> block, Subkey key, bool forward);

    FactorProfile profile_;
    int d_;
    std::unordered_map<std::uint64_t, std::vector<Triple>> cache_;
};

/// True when a SumRange pair is handled by the swap rule (touches a block extreme).
bool touches_extreme(std::span<const std::uint8_t> pair, const BlockRange& block);

PixelGroup substitute_group(const PixelGroup& group, const FactorProfile& profile, std::optional<BlockRange> block,
                            Subkey key, int d = kMaxPixel);
PixelGroup desubstitute_group(const PixelGroup& group, const FactorProfile& profile, std::optional<BlockRange> block,
                              Subkey key, int d = kMaxPixel);

}  // namespace mftpe
