#include "mftpe/envelope.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "mftpe/error.hpp"
#include "mftpe/png_io.hpp"

namespace mftpe {

namespace {

constexpr std::uint8_t kMagic[4] = {'M', 'F', 'T', 'P'};
constexpr std::size_t kFixedHeader = 4 + 1 + 1 + 2 + 2 + 16 + 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint16_t get_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | p[1] << 8); }

}  // namespace

std::vector<std::uint8_t> CiphertextEnvelope::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(kFixedHeader + 3 + payload.size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    out.push_back(version);
    out.push_back(profile.wire_id());
    put_u16(out, block_size);
    put_u16(out, rounds);
    out.insert(out.end(), nonce.begin(), nonce.end());
    if (profile.has_weights()) {
        out.push_back(3);
        for (auto w : profile.weights()) {
            if (w < 1 || w > 255) throw Error(Errc::InvalidParams, "envelope weights must be in [1, 255]");
            out.push_back(static_cast<std::uint8_t>(w));
        }
    } else {
        out.push_back(0);
    }
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

CiphertextEnvelope CiphertextEnvelope::parse(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFixedHeader) throw Error(Errc::MalformedEnvelope, "truncated header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(Errc::MalformedEnvelope, "bad magic");
    CiphertextEnvelope env;
    env.version = bytes[4];
    if (env.version != kVersion)
        throw Error(Errc::MalformedEnvelope, "unsupported version " + std::to_string(env.version));
    const std::uint8_t profile_id = bytes[5];
    env.block_size = get_u16(bytes.data() + 6);
    env.rounds = get_u16(bytes.data() + 8);
    std::copy_n(bytes.begin() + 10, 16, env.nonce.begin());
    const std::uint8_t weight_count = bytes[26];
    if (bytes.size() < kFixedHeader + weight_count) throw Error(Errc::MalformedEnvelope, "truncated weights");

    Weights weights{1, 1, 1};
    const auto probe = FactorProfile::from_wire_id(profile_id);
    if (!probe) throw Error(Errc::MalformedEnvelope, "unknown profile id " + std::to_string(profile_id));
    const std::size_t expected = probe->has_weights() ? 3 : 0;
    if (weight_count != expected) throw Error(Errc::MalformedEnvelope, "weight count does not match profile");
    for (std::size_t i = 0; i < weight_count; ++i) {
        weights[i] = bytes[kFixedHeader + i];
        if (weights[i] == 0) throw Error(Errc::MalformedEnvelope, "zero weight");
    }
    env.profile = *FactorProfile::from_wire_id(profile_id, weights);
    if (env.rounds < 1) throw Error(Errc::MalformedEnvelope, "rounds must be >= 1");
    if (env.block_size < 2) throw Error(Errc::MalformedEnvelope, "block size must be >= 2");
    env.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(kFixedHeader + weight_count), bytes.end());
    if (env.payload.empty()) throw Error(Errc::MalformedEnvelope, "missing payload");
    return env;
}

Image CiphertextEnvelope::image() const {
    try {
        return decode_png(payload);
    } catch (const Error& e) {
        throw Error(Errc::MalformedEnvelope, std::string("payload: ") + e.what());
    }
}

CiphertextEnvelope CiphertextEnvelope::with_image(const Image& image) const {
    CiphertextEnvelope out = *this;
    out.payload = encode_png(image);
    return out;
}

CiphertextEnvelope encrypt(const Image& image, const CipherParams& params) {
    CiphertextEnvelope env;
    env.profile = params.profile();
    env.block_size = static_cast<std::uint16_t>(params.block_size());
    env.rounds = static_cast<std::uint16_t>(params.rounds());
    env.nonce = params.nonce();
    env.payload = encode_png(encrypt_image(image, params));
    return env;
}

Image decrypt(const CiphertextEnvelope& envelope, const MasterKey& key) {
    const Image cipher = envelope.image();
    if (cipher.width() % envelope.block_size != 0 || cipher.height() % envelope.block_size != 0)
        throw Error(Errc::ParamMismatch, "block size " + std::to_string(envelope.block_size) +
                                             " does not tile the " + std::to_string(cipher.width()) + "x" +
                                             std::to_string(cipher.height()) + " payload");
    const CipherParams params(envelope.profile, envelope.block_size, envelope.rounds, key, envelope.nonce);
    return decrypt_image(cipher, params);
}

}  // namespace mftpe
