#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "mftpe/image.hpp"

namespace mftpe {

using Histogram = std::array<std::uint64_t, 256>;

/// Per-channel intensity histograms.
std::vector<Histogram> histogram(const Image& image);

/// CSV with header "value,c0[,c1,c2]" and 256 rows.
void write_histogram_csv(std::ostream& out, const std::vector<Histogram>& hists);

enum class Direction { Horizontal, Vertical, Diagonal };

const char* direction_name(Direction dir) noexcept;

inline constexpr int kDefaultCorrelationSamples = 5000;

/// Pearson correlation of randomly sampled adjacent pixel pairs along `dir`
/// in channel `channel`. Pairs are drawn uniformly with a seeded generator so
/// results are reproducible. Throws DegenerateVariance if either sample is constant.
double adjacent_correlation(const Image& image, Direction dir, int channel = 0,
                            int samples = kDefaultCorrelationSamples, std::uint64_t seed = 1);

enum class NoiseKind { Gaussian, SaltPepper, Multiplicative };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::Gaussian;
    /// Gaussian: standard deviation in intensity units. SaltPepper: fraction of
    /// pixels replaced. Multiplicative: variance of the zero-mean uniform factor u in x (1 + u).
    double parameter = 0.0;
    std::uint64_t seed = 1;
};

/// Noisy copy, clamped to [0, 255].
Image add_noise(const Image& image, const NoiseSpec& spec);

/// 10 log10(255^2 / MSE) over all samples; +inf for identical images.
/// Throws DimensionMismatch if the shapes differ.
double psnr(const Image& reference, const Image& test);

/// PNG size of `cipher` over PNG size of `plain`, both encoded with the same settings.
double storage_expansion(const Image& plain, const Image& cipher);

}  // namespace mftpe
