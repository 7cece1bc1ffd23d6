#include "mftpe/rank_cipher.hpp"

#include <algorithm>
#include <utility>

#include "mftpe/error.hpp"

namespace mftpe {

namespace {

std::uint64_t encipher(std::uint64_t sn, std::uint64_t k, std::uint64_t size, bool forward) {
    return forward ? (sn + k) % size : (sn + size - k) % size;
}

}  // namespace

bool touches_extreme(std::span<const std::uint8_t> pair, const BlockRange& block) {
    return pair[0] == block.min || pair[0] == block.max || pair[1] == block.min || pair[1] == block.max;
}

RankCipher::RankCipher(const FactorProfile& profile, int d) : profile_(profile), d_(d) {
    if (d < 1 || d > kMaxPixel) throw Error(Errc::InvalidParams, "d must be in [1, 255]");
}

void RankCipher::check(std::span<const std::uint8_t> group, const std::optional<BlockRange>& block) const {
    if (static_cast<int>(group.size()) != profile_.arity())
        throw Error(Errc::ArityMismatch, "group of " + std::to_string(group.size()) + " pixels for profile " +
                                             profile_.name());
    if (profile_.kind() == FactorKind::SumRange && !block)
        throw Error(Errc::MissingBlockContext, "sum-range substitution needs the block min/max");
    if (profile_.kind() == FactorKind::SumRange &&
        std::any_of(group.begin(), group.end(), [&](std::uint8_t v) { return v < block->min || v > block->max; }))
        throw Error(Errc::InvalidParams, "pixel lies outside the block range");
    if (d_ < kMaxPixel && std::any_of(group.begin(), group.end(), [&](std::uint8_t v) { return v > d_; }))
        throw Error(Errc::InvalidParams, "pixel exceeds d");
}

const std::vector<Triple>& RankCipher::constrained_set(std::span<const std::uint8_t> group) {
    const int s = group[0] + group[1] + group[2];
    std::uint64_t secondary = 0;
    if (profile_.kind() == FactorKind::SumGeoMean) {
        secondary = std::uint64_t{group[0]} * group[1] * group[2];
    } else {
        const auto& w = profile_.weights();
        secondary = std::uint64_t{w[0]} * group[0] + std::uint64_t{w[1]} * group[1] + std::uint64_t{w[2]} * group[2];
    }
    const std::uint64_t key = static_cast<std::uint64_t>(s) << 40 | secondary;
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        auto set = profile_.kind() == FactorKind::SumGeoMean ? enumerate_sum_product(d_, s, secondary)
                                                              : enumerate_sum_weighted(d_, s, secondary, profile_.weights());
        it = cache_.emplace(key, std::move(set)).first;
    }
    return it->second;
}

std::uint64_t RankCipher::set_size(std::span<const std::uint8_t> group, std::optional<BlockRange> block) {
    check(group, block);
    switch (profile_.kind()) {
        case FactorKind::SumOnly: {
            int s = 0;
            for (auto v : group) s += v;
            return group.size() == 2 ? pair_count(d_, s) : triple_count(d_, s);
        }
        case FactorKind::SumRange:
            if (touches_extreme(group, *block)) return 1;
            return static_cast<std::uint64_t>(sum_range_window(group[0] + group[1], block->min, block->max).size());
        case FactorKind::SumGeoMean:
        case FactorKind::SumWeightedMean:
            return constrained_set(group).size();
    }
    return 0;
}

std::uint64_t RankCipher::rank(std::span<const std::uint8_t> group, std::optional<BlockRange> block) {
    check(group, block);
    switch (profile_.kind()) {
        case FactorKind::SumOnly: return rank_by_sum(d_, group);
        case FactorKind::SumRange: return group[0];
        case FactorKind::SumGeoMean:
        case FactorKind::SumWeightedMean: {
            const auto& set = constrained_set(group);
            const Triple t{group[0], group[1], group[2]};
            return static_cast<std::uint64_t>(std::lower_bound(set.begin(), set.end(), t) - set.begin());
        }
    }
    return 0;
}

void RankCipher::apply(std::span<std::uint8_t> group, std::optional<BlockRange> block, Subkey key, bool forward) {
    check(group, block);
    switch (profile_.kind()) {
        case FactorKind::SumOnly: {
            int s = 0;
            for (auto v : group) s += v;
            const std::uint64_t size = group.size() == 2 ? pair_count(d_, s) : triple_count(d_, s);
            const std::uint64_t sn = rank_by_sum(d_, group);
            unrank_by_sum(d_, s, encipher(sn, key.reduce(size), size, forward), group);
            return;
        }
        case FactorKind::SumRange: {
            if (touches_extreme(group, *block)) {
                std::swap(group[0], group[1]);
                return;
            }
            const int s = group[0] + group[1];
            const RangeWindow w = sum_range_window(s, block->min, block->max);
            const auto size = static_cast<std::uint64_t>(w.size());
            const auto offset = static_cast<std::uint64_t>(group[0] - w.alpha);
            const int a = static_cast<int>(encipher(offset, key.reduce(size), size, forward)) + w.alpha;
            group[0] = static_cast<std::uint8_t>(a);
            group[1] = static_cast<std::uint8_t>(s - a);
            return;
        }
        case FactorKind::SumGeoMean:
        case FactorKind::SumWeightedMean: {
            const auto& set = constrained_set(group);
            const Triple t{group[0], group[1], group[2]};
            const auto sn = static_cast<std::uint64_t>(std::lower_bound(set.begin(), set.end(), t) - set.begin());
            const std::uint64_t size = set.size();
            const Triple& out = set[encipher(sn, key.reduce(size), size, forward)];
            std::copy(out.begin(), out.end(), group.begin());
            return;
        }
    }
}

void RankCipher::substitute(std::span<std::uint8_t> group, std::optional<BlockRange> block, Subkey key) {
    apply(group, block, key, true);
}

void RankCipher::desubstitute(std::span<std::uint8_t> group, std::optional<BlockRange> block, Subkey key) {
    apply(group, block, key, false);
}

PixelGroup substitute_group(const PixelGroup& group, const FactorProfile& profile, std::optional<BlockRange> block,
                            Subkey key, int d) {
    RankCipher cipher(profile, d);
    PixelGroup out = group;
    cipher.substitute(std::span(out.values.data(), static_cast<std::size_t>(out.size)), block, key);
    return out;
}

PixelGroup desubstitute_group(const PixelGroup& group, const FactorProfile& profile, std::optional<BlockRange> block,
                              Subkey key, int d) {
    RankCipher cipher(profile, d);
    PixelGroup out = group;
    cipher.desubstitute(std::span(out.values.data(), static_cast<std::size_t>(out.size)), block, key);
    return out;
}

}  // namespace mftpe
