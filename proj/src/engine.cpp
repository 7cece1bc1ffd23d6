#include "mftpe/engine.hpp"

#include <string>
#include <utility>

#include "mftpe/error.hpp"
#include "mftpe/rank_cipher.hpp"
#include "mftpe/simd/kernels.hpp"

namespace mftpe {

CipherParams::CipherParams(const FactorProfile& profile, int block_size, int rounds, const MasterKey& key,
                           const Nonce& nonce)
    : profile_(profile), block_size_(block_size), rounds_(rounds), key_(key), nonce_(nonce) {
    if (rounds < 1 || rounds > 0xFFFF) throw Error(Errc::InvalidParams, "rounds must be in [1, 65535]");
    if (block_size < 2) throw Error(Errc::BlockTooSmall, "block size " + std::to_string(block_size) + " < 2");
    if (block_size > 0xFFFF) throw Error(Errc::InvalidParams, "block size too large");
}

Weights derive_weights(const MasterKey& key, const Nonce& nonce) {
    auto stream = Keystream(key, nonce).stream({StreamLabel::Weights, 0, 0, 0});
    std::uint8_t bytes[3];
    stream.read(bytes);
    // 256 is a multiple of 8, so the reduction is unbiased.
    return {1u + bytes[0] % 8u, 1u + bytes[1] % 8u, 1u + bytes[2] % 8u};
}

int permutation_classes(const FactorProfile& profile) noexcept {
    return profile.kind() == FactorKind::SumWeightedMean ? 3 : 1;
}

namespace {

// Swap targets drawn for each position class in order, i from the top of the class down to 1.
std::vector<std::uint32_t> draw_swaps(std::size_t size, StreamReader& stream, int classes) {
    std::vector<std::uint32_t> swaps;
    swaps.reserve(size);
    for (int c = 0; c < classes; ++c) {
        const std::size_t members = size > static_cast<std::size_t>(c) ? (size - c + classes - 1) / classes : 0;
        for (std::size_t i = members; i-- > 1;) swaps.push_back(stream.uniform_below(static_cast<std::uint32_t>(i + 1)));
    }
    return swaps;
}

template <typename Visit>
void for_each_swap(std::size_t size, int classes, Visit&& visit) {
    for (int c = 0; c < classes; ++c) {
        const std::size_t members = size > static_cast<std::size_t>(c) ? (size - c + classes - 1) / classes : 0;
        for (std::size_t i = members; i-- > 1;) visit(c + i * classes, static_cast<std::size_t>(c));
    }
}

}  // namespace

void permute_block(std::span<std::uint8_t> block, StreamReader& stream, int classes) {
    const auto swaps = draw_swaps(block.size(), stream, classes);
    std::size_t n = 0;
    for_each_swap(block.size(), classes, [&](std::size_t pos, std::size_t cls) {
        std::swap(block[pos], block[cls + swaps[n++] * classes]);
    });
}

void inverse_permute_block(std::span<std::uint8_t> block, StreamReader& stream, int classes) {
    const auto swaps = draw_swaps(block.size(), stream, classes);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(swaps.size());
    std::size_t n = 0;
    for_each_swap(block.size(), classes, [&](std::size_t pos, std::size_t cls) {
        pairs.emplace_back(pos, cls + swaps[n++] * classes);
    });
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) std::swap(block[it->first], block[it->second]);
}

namespace {

void run_round(Image& image, const CipherParams& params, int round, bool forward) {
    const BlockGrid grid = partition(image, params.block_size());
    const Keystream ks(params.key(), params.nonce());
    const FactorProfile& profile = params.profile();
    const int n = profile.arity();
    const int classes = permutation_classes(profile);
    const bool needs_range = profile.kind() == FactorKind::SumRange;
    const auto& k = simd::kernels();
    RankCipher cipher(profile);

    std::vector<std::uint8_t> buf(grid.pixels_per_block());
    const std::size_t groups = buf.size() / n;
    for (int c = 0; c < image.channels(); ++c) {
        for (int b = 0; b < grid.blocks_per_channel(); ++b) {
            read_block(image, grid, c, b, buf);
            const StreamContext base{StreamLabel::Substitution, static_cast<std::uint16_t>(round),
                                     static_cast<std::uint8_t>(c), static_cast<std::uint32_t>(b)};
            StreamContext perm_ctx = base;
            perm_ctx.label = StreamLabel::Permutation;
            auto perm = ks.stream(perm_ctx);
            if (!forward) inverse_permute_block(buf, perm, classes);

            std::optional<BlockRange> range;
            if (needs_range) {
                const auto mm = k.minmax_u8(buf.data(), buf.size());
                range = BlockRange{mm.min, mm.max};
            }
            auto subst = ks.stream(base);
            for (std::size_t g = 0; g < groups; ++g) {
                std::span<std::uint8_t> group(buf.data() + g * n, static_cast<std::size_t>(n));
                const Subkey key = subst.next_subkey();
                if (forward) cipher.substitute(group, range, key);
                else cipher.desubstitute(group, range, key);
            }

            if (forward) permute_block(buf, perm, classes);
            write_block(image, grid, c, b, buf);
        }
    }
}

}  // namespace

void encrypt_round(Image& image, const CipherParams& params, int round) { run_round(image, params, round, true); }

void decrypt_round(Image& image, const CipherParams& params, int round) { run_round(image, params, round, false); }

Image encrypt_image(const Image& image, const CipherParams& params) {
    partition(image, params.block_size());
    Image out = image;
    for (int r = 1; r <= params.rounds(); ++r) encrypt_round(out, params, r);
    return out;
}

Image decrypt_image(const Image& cipher, const CipherParams& params) {
    partition(cipher, params.block_size());
    Image out = cipher;
    for (int r = params.rounds(); r >= 1; --r) decrypt_round(out, params, r);
    return out;
}

}  // namespace mftpe
