#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mftpe/profile.hpp"

namespace mftpe {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kMaxPixel = 255;

/// 8-bit image with 1 or 3 channels, stored channel-planar: each channel is a
/// contiguous row-major W*H plane.
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels);
    Image(int width, int height, int channels, std::vector<std::uint8_t> planar);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t plane_size() const noexcept { return static_cast<std::size_t>(width_) * height_; }

    std::uint8_t at(int x, int y, int c) const { return data_[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c) { return data_[index(x, y, c)]; }

    std::span<const std::uint8_t> plane(int c) const { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<std::uint8_t> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }

    const std::vector<std::uint8_t>& data() const noexcept { return data_; }
    std::vector<std::uint8_t>& data() noexcept { return data_; }

    /// Interleaved (RGBRGB...) copy, the layout image codecs expect.
    std::vector<std::uint8_t> interleaved() const;
    static Image from_interleaved(int width, int height, int channels, std::span<const std::uint8_t> pixels);

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int x, int y, int c) const noexcept {
        return c * plane_size() + static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Row-major grid of BxB blocks covering one channel.
struct BlockGrid {
    int block_size = 0;
    int blocks_x = 0;
    int blocks_y = 0;

    int blocks_per_channel() const noexcept { return blocks_x * blocks_y; }
    int pixels_per_block() const noexcept { return block_size * block_size; }

    friend bool operator==(const BlockGrid&, const BlockGrid&) = default;
};

/// Validates B against the image and returns the grid.
/// Throws NonDivisibleBlockSize, BlockTooSmall or EmptyImage.
BlockGrid partition(const Image& image, int block_size);

/// Copies block `block` of channel `c` into `out` (B*B bytes, row-major within the block).
void read_block(const Image& image, const BlockGrid& grid, int c, int block, std::span<std::uint8_t> out);
void write_block(Image& image, const BlockGrid& grid, int c, int block, std::span<const std::uint8_t> in);

/// Rebuilds an image from per-block buffers ordered channel-major then block-major.
Image reassemble(const BlockGrid& grid, int channels, std::span<const std::vector<std::uint8_t>> blocks);

struct PixelGroup {
    std::array<std::uint8_t, 3> values{};
    int size = 0;

    std::span<const std::uint8_t> view() const { return {values.data(), static_cast<std::size_t>(size)}; }
    friend bool operator==(const PixelGroup&, const PixelGroup&) = default;
};

PixelGroup make_group(std::span<const std::uint8_t> values);

struct GroupedBlock {
    std::vector<PixelGroup> groups;
    std::vector<std::uint8_t> leftovers;
};

/// Consecutive row-major pixels in tuples of n (2 or 3); the trailing size mod n pixels are leftovers.
GroupedBlock group_pixels(std::span<const std::uint8_t> block, int n);

struct Thumbnail {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> samples;  // channel-planar, like Image

    Image as_image() const { return Image(width, height, channels, samples); }
    friend bool operator==(const Thumbnail&, const Thumbnail&) = default;
};

/// floor(block sum / B^2) for every block.
Thumbnail thumbnail(const Image& image, int block_size);

struct BlockRange {
    std::uint8_t min = 0;
    std::uint8_t max = 0;
    friend bool operator==(const BlockRange&, const BlockRange&) = default;
};

/// Block-mean thumbnail plus the secondary per-block factor of a profile:
/// the pixel product (SumGeoMean), the min/max pair (SumRange) or the
/// position-weighted sum (SumWeightedMean). Exactly one secondary vector is
/// populated; SumOnly leaves all of them empty.
struct ExtendedThumbnail {
    Thumbnail primary;
    FactorKind kind = FactorKind::SumOnly;
    Weights weights{};  // set for SumWeightedMean only
    std::vector<BigInt> products;
    std::vector<BlockRange> ranges;
    std::vector<std::uint64_t> weighted_sums;

    friend bool operator==(const ExtendedThumbnail&, const ExtendedThumbnail&) = default;
};

/// Weight applied to the pixel at row-major position `pos` of a block: the
/// weight of the group slot it occupies (leftovers continue the cycle).
inline std::uint32_t position_weight(const Weights& w, std::size_t pos) { return w[pos % 3]; }

ExtendedThumbnail extended_thumbnail(const Image& image, int block_size, const FactorProfile& profile);

/// Grayscale rendering of the secondary records, one sample per block, for viewing only.
Image render_secondary(const ExtendedThumbnail& thumb, int block_size);

}  // namespace mftpe
