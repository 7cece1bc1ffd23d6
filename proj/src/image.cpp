#include "mftpe/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mftpe/error.hpp"
#include "mftpe/simd/kernels.hpp"

namespace mftpe {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::NonDivisibleBlockSize: return "NonDivisibleBlockSize";
        case Errc::BlockTooSmall: return "BlockTooSmall";
        case Errc::EmptyImage: return "EmptyImage";
        case Errc::InvalidImage: return "InvalidImage";
        case Errc::UnsupportedFormat: return "UnsupportedFormat";
        case Errc::ArityMismatch: return "ArityMismatch";
        case Errc::MissingBlockContext: return "MissingBlockContext";
        case Errc::InvalidParams: return "InvalidParams";
        case Errc::MalformedEnvelope: return "MalformedEnvelope";
        case Errc::ParamMismatch: return "ParamMismatch";
        case Errc::ProbabilityOverUnity: return "ProbabilityOverUnity";
        case Errc::InstanceTooLarge: return "InstanceTooLarge";
        case Errc::DegenerateVariance: return "DegenerateVariance";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::Io: return "Io";
    }
    return "Unknown";
}

Image::Image(int width, int height, int channels)
    : Image(width, height, channels,
            std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) *
                                      std::max(channels, 0))) {}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> planar)
    : width_(width), height_(height), channels_(channels), data_(std::move(planar)) {
    if (width < 0 || height < 0) throw Error(Errc::InvalidImage, "negative dimensions");
    if (channels != 1 && channels != 3) throw Error(Errc::InvalidImage, "channels must be 1 or 3");
    if (data_.size() != plane_size() * channels_)
        throw Error(Errc::InvalidImage, "data length " + std::to_string(data_.size()) + " != width*height*channels");
}

std::vector<std::uint8_t> Image::interleaved() const {
    std::vector<std::uint8_t> out(data_.size());
    const std::size_t n = plane_size();
    for (int c = 0; c < channels_; ++c)
        for (std::size_t i = 0; i < n; ++i) out[i * channels_ + c] = data_[c * n + i];
    return out;
}

Image Image::from_interleaved(int width, int height, int channels, std::span<const std::uint8_t> pixels) {
    Image img(width, height, channels);
    if (pixels.size() != img.data_.size()) throw Error(Errc::InvalidImage, "interleaved buffer has wrong length");
    const std::size_t n = img.plane_size();
    for (int c = 0; c < channels; ++c)
        for (std::size_t i = 0; i < n; ++i) img.data_[c * n + i] = pixels[i * channels + c];
    return img;
}

BlockGrid partition(const Image& image, int block_size) {
    if (image.empty()) throw Error(Errc::EmptyImage, "image has no pixels");
    if (block_size < 2) throw Error(Errc::BlockTooSmall, "block size " + std::to_string(block_size) + " < 2");
    if (image.width() % block_size != 0 || image.height() % block_size != 0)
        throw Error(Errc::NonDivisibleBlockSize, "block size " + std::to_string(block_size) + " does not divide " +
                                                     std::to_string(image.width()) + "x" +
                                                     std::to_string(image.height()));
    return {block_size, image.width() / block_size, image.height() / block_size};
}

void read_block(const Image& image, const BlockGrid& grid, int c, int block, std::span<std::uint8_t> out) {
    const int b = grid.block_size;
    const int x0 = (block % grid.blocks_x) * b;
    const int y0 = (block / grid.blocks_x) * b;
    auto plane = image.plane(c);
    for (int y = 0; y < b; ++y) {
        const auto* src = plane.data() + static_cast<std::size_t>(y0 + y) * image.width() + x0;
        std::copy(src, src + b, out.begin() + static_cast<std::ptrdiff_t>(y) * b);
    }
}

void write_block(Image& image, const BlockGrid& grid, int c, int block, std::span<const std::uint8_t> in) {
    const int b = grid.block_size;
    const int x0 = (block % grid.blocks_x) * b;
    const int y0 = (block / grid.blocks_x) * b;
    const int width = image.width();
    auto plane = image.plane(c);
    for (int y = 0; y < b; ++y) {
        auto first = in.begin() + static_cast<std::ptrdiff_t>(y) * b;
        std::copy(first, first + b, plane.data() + static_cast<std::size_t>(y0 + y) * width + x0);
    }
}

Image reassemble(const BlockGrid& grid, int channels, std::span<const std::vector<std::uint8_t>> blocks) {
    Image img(grid.blocks_x * grid.block_size, grid.blocks_y * grid.block_size, channels);
    const int per_channel = grid.blocks_per_channel();
    if (blocks.size() != static_cast<std::size_t>(per_channel) * channels)
        throw Error(Errc::InvalidImage, "block count does not match grid");
    for (int c = 0; c < channels; ++c)
        for (int b = 0; b < per_channel; ++b) write_block(img, grid, c, b, blocks[c * per_channel + b]);
    return img;
}

PixelGroup make_group(std::span<const std::uint8_t> values) {
    if (values.empty() || values.size() > 3) throw Error(Errc::ArityMismatch, "pixel groups hold 1 to 3 pixels");
    PixelGroup g;
    g.size = static_cast<int>(values.size());
    std::copy(values.begin(), values.end(), g.values.begin());
    return g;
}

GroupedBlock group_pixels(std::span<const std::uint8_t> block, int n) {
    if (n != 2 && n != 3) throw Error(Errc::ArityMismatch, "group arity must be 2 or 3");
    GroupedBlock out;
    const std::size_t full = block.size() / n;
    out.groups.reserve(full);
    for (std::size_t g = 0; g < full; ++g) out.groups.push_back(make_group(block.subspan(g * n, n)));
    out.leftovers.assign(block.begin() + static_cast<std::ptrdiff_t>(full * n), block.end());
    return out;
}

namespace {

// Per-block pixel sums of one channel, row-major block order.
std::vector<std::uint32_t> block_sums(const Image& image, const BlockGrid& grid, int c) {
    std::vector<std::uint32_t> sums(grid.blocks_per_channel(), 0);
    const auto& k = simd::kernels();
    auto plane = image.plane(c);
    for (int y = 0; y < image.height(); ++y) {
        std::uint32_t* acc = sums.data() + static_cast<std::size_t>(y / grid.block_size) * grid.blocks_x;
        k.segment_sums(plane.data() + static_cast<std::size_t>(y) * image.width(), image.width(), grid.block_size,
                       acc);
    }
    return sums;
}

}  // namespace

Thumbnail thumbnail(const Image& image, int block_size) {
    const BlockGrid grid = partition(image, block_size);
    Thumbnail t{grid.blocks_x, grid.blocks_y, image.channels(), {}};
    t.samples.reserve(static_cast<std::size_t>(grid.blocks_per_channel()) * image.channels());
    const auto area = static_cast<std::uint32_t>(grid.pixels_per_block());
    for (int c = 0; c < image.channels(); ++c)
        for (std::uint32_t s : block_sums(image, grid, c)) t.samples.push_back(static_cast<std::uint8_t>(s / area));
    return t;
}

ExtendedThumbnail extended_thumbnail(const Image& image, int block_size, const FactorProfile& profile) {
    ExtendedThumbnail et;
    et.primary = thumbnail(image, block_size);
    et.kind = profile.kind();
    if (profile.has_weights()) et.weights = profile.weights();
    if (profile.kind() == FactorKind::SumOnly) return et;

    const BlockGrid grid = partition(image, block_size);
    const auto& k = simd::kernels();
    std::vector<std::uint8_t> buf(grid.pixels_per_block());
    for (int c = 0; c < image.channels(); ++c) {
        for (int b = 0; b < grid.blocks_per_channel(); ++b) {
            read_block(image, grid, c, b, buf);
            switch (profile.kind()) {
                case FactorKind::SumGeoMean: {
                    BigInt product = 1;
                    for (auto v : buf) {
                        if (v == 0) { product = 0; break; }
                        product *= v;
                    }
                    et.products.push_back(std::move(product));
                    break;
                }
                case FactorKind::SumRange: {
                    auto mm = k.minmax_u8(buf.data(), buf.size());
                    et.ranges.push_back({mm.min, mm.max});
                    break;
                }
                case FactorKind::SumWeightedMean: {
                    std::uint64_t v = 0;
                    for (std::size_t i = 0; i < buf.size(); ++i) v += std::uint64_t{position_weight(profile.weights(), i)} * buf[i];
                    et.weighted_sums.push_back(v);
                    break;
                }
                case FactorKind::SumOnly: break;
            }
        }
    }
    return et;
}

namespace {

double log_of(const BigInt& v) {
    if (v <= 0) return 0.0;
    const auto bits = boost::multiprecision::msb(v);
    if (bits < 60) return std::log(v.convert_to<double>());
    const unsigned shift = static_cast<unsigned>(bits) - 52;
    BigInt top = v >> shift;
    return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

}  // namespace

Image render_secondary(const ExtendedThumbnail& thumb, int block_size) {
    const auto& p = thumb.primary;
    Image out(p.width, p.height, p.channels);
    const double area = static_cast<double>(block_size) * block_size;
    auto& data = out.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        double v = 0.0;
        switch (thumb.kind) {
            case FactorKind::SumOnly: v = p.samples[i]; break;
            // Geometric mean of the block, recovered from the product.
            case FactorKind::SumGeoMean: v = thumb.products[i] == 0 ? 0.0 : std::exp(log_of(thumb.products[i]) / area); break;
            case FactorKind::SumRange: v = thumb.ranges[i].max - thumb.ranges[i].min; break;
            // Weighted sum rescaled by the mean weight so it lands in [0, 255].
            case FactorKind::SumWeightedMean: {
                const double mean_w = (thumb.weights[0] + thumb.weights[1] + thumb.weights[2]) / 3.0;
                v = static_cast<double>(thumb.weighted_sums[i]) / (area * mean_w);
                break;
            }
        }
        data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return out;
}

}  // namespace mftpe
