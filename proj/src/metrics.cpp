#include "mftpe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mftpe/error.hpp"
#include "mftpe/png_io.hpp"

namespace mftpe {

std::vector<Histogram> histogram(const Image& image) {
    std::vector<Histogram> out(image.channels());
    for (int c = 0; c < image.channels(); ++c) {
        out[c].fill(0);
        for (auto v : image.plane(c)) ++out[c][v];
    }
    return out;
}

void write_histogram_csv(std::ostream& out, const std::vector<Histogram>& hists) {
    out << "value";
    for (std::size_t c = 0; c < hists.size(); ++c) out << ",c" << c;
    out << '\n';
    for (int v = 0; v < 256; ++v) {
        out << v;
        for (const auto& h : hists) out << ',' << h[v];
        out << '\n';
    }
}

const char* direction_name(Direction dir) noexcept {
    switch (dir) {
        case Direction::Horizontal: return "horizontal";
        case Direction::Vertical: return "vertical";
        case Direction::Diagonal: return "diagonal";
    }
    return "?";
}

double adjacent_correlation(const Image& image, Direction dir, int channel, int samples, std::uint64_t seed) {
    if (channel < 0 || channel >= image.channels()) throw Error(Errc::InvalidParams, "channel out of range");
    if (samples < 2) throw Error(Errc::InvalidParams, "need at least two samples");
    const int dx = dir == Direction::Vertical ? 0 : 1;
    const int dy = dir == Direction::Horizontal ? 0 : 1;
    if (image.width() <= dx || image.height() <= dy) throw Error(Errc::InvalidImage, "image too small for pairs");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> px(0, image.width() - 1 - dx);
    std::uniform_int_distribution<int> py(0, image.height() - 1 - dy);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        const int x = px(rng), y = py(rng);
        const double a = image.at(x, y, channel);
        const double b = image.at(x + dx, y + dy, channel);
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    const double n = samples;
    const double cov = sxy - sx * sy / n;
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    if (vx <= 0 || vy <= 0) throw Error(Errc::DegenerateVariance, "sampled pixels have zero variance");
    return cov / std::sqrt(vx * vy);
}

Image add_noise(const Image& image, const NoiseSpec& spec) {
    if (spec.parameter < 0) throw Error(Errc::InvalidParams, "noise parameter must be non-negative");
    if (spec.kind == NoiseKind::SaltPepper && spec.parameter > 1)
        throw Error(Errc::InvalidParams, "salt-and-pepper density must be <= 1");
    std::mt19937_64 rng(spec.seed);
    std::vector<std::uint8_t> data = image.data();
    auto clamp = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); };

    switch (spec.kind) {
        case NoiseKind::Gaussian: {
            std::normal_distribution<double> noise(0.0, spec.parameter);
            for (auto& v : data) v = clamp(v + noise(rng));
            break;
        }
        case NoiseKind::SaltPepper: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            std::bernoulli_distribution salt(0.5);
            for (auto& v : data)
                if (u(rng) < spec.parameter) v = salt(rng) ? 255 : 0;
            break;
        }
        case NoiseKind::Multiplicative: {
            // Uniform on [-h, h] has variance h^2 / 3.
            const double h = std::sqrt(3.0 * spec.parameter);
            std::uniform_real_distribution<double> u(-h, h);
            for (auto& v : data) v = clamp(v * (1.0 + u(rng)));
            break;
        }
    }
    return Image(image.width(), image.height(), image.channels(), std::move(data));
}

double psnr(const Image& reference, const Image& test) {
    if (reference.width() != test.width() || reference.height() != test.height() ||
        reference.channels() != test.channels())
        throw Error(Errc::DimensionMismatch, "images differ in shape");
    const auto& a = reference.data();
    const auto& b = test.data();
    if (a.empty()) throw Error(Errc::EmptyImage, "empty image");
    double sse = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = static_cast<double>(a[i]) - b[i];
        sse += e * e;
    }
    if (sse == 0) return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(a.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double storage_expansion(const Image& plain, const Image& cipher) {
    const auto p = encode_png(plain).size();
    const auto c = encode_png(cipher).size();
    return static_cast<double>(c) / static_cast<double>(p);
}

}  // namespace mftpe
