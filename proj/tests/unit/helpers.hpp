#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mftpe/image.hpp"
#include "mftpe/keystream.hpp"

namespace testing {

inline mftpe::Image random_image(int w, int h, int c, std::mt19937_64& rng) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * c);
    for (auto& v : px) v = static_cast<std::uint8_t>(rng());
    return mftpe::Image(w, h, c, std::move(px));
}

template <std::size_t N>
std::array<std::uint8_t, N> random_bytes(std::mt19937_64& rng) {
    std::array<std::uint8_t, N> out;
    for (auto& v : out) v = static_cast<std::uint8_t>(rng());
    return out;
}

inline mftpe::MasterKey counting_key() {
    mftpe::MasterKey k;
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<std::uint8_t>(i);
    return k;
}

}  // namespace testing
