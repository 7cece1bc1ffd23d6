#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mftpe/image.hpp"

namespace mftpe {

/// Encodes an 8-bit gray or RGB PNG with fixed zlib settings, so equal images give equal bytes.
std::vector<std::uint8_t> encode_png(const Image& image);

/// Decodes 8-bit gray or RGB PNGs. Paletted, 16-bit and alpha images are rejected (UnsupportedFormat).
Image decode_png(std::span<const std::uint8_t> bytes);

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace mftpe
