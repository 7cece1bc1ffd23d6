#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "mftpe/envelope.hpp"
#include "mftpe/error.hpp"
#include "mftpe/png_io.hpp"

using namespace mftpe;

namespace {

Errc parse_error(const std::vector<std::uint8_t>& bytes) {
    try {
        CiphertextEnvelope::parse(bytes);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("parse accepted malformed bytes");
    return Errc::Io;
}

CiphertextEnvelope sample(std::mt19937_64& rng) {
    CiphertextEnvelope env;
    env.profile = FactorProfile::sum_weighted_mean({4, 1, 6});
    env.block_size = 8;
    env.rounds = 3;
    env.nonce = testing::random_bytes<16>(rng);
    env.payload = encode_png(testing::random_image(16, 8, 3, rng));
    return env;
}

}  // namespace

TEST_CASE("serialize/parse round trip for every profile") {
    std::mt19937_64 rng(71);
    for (const auto& profile : {FactorProfile::sum_only(2), FactorProfile::sum_only(3), FactorProfile::sum_geo_mean(),
                                FactorProfile::sum_range(), FactorProfile::sum_weighted_mean({255, 1, 9})}) {
        for (int t = 0; t < 20; ++t) {
            CiphertextEnvelope env = sample(rng);
            env.profile = profile;
            env.block_size = static_cast<std::uint16_t>(2 + rng() % 60000);
            env.rounds = static_cast<std::uint16_t>(1 + rng() % 65535);
            const auto bytes = env.serialize();
            CHECK(CiphertextEnvelope::parse(bytes) == env);
            CHECK(CiphertextEnvelope::parse(bytes).serialize() == bytes);
        }
    }
}

TEST_CASE("header layout") {
    std::mt19937_64 rng(72);
    const auto env = sample(rng);
    const auto b = env.serialize();
    CHECK(std::string(b.begin(), b.begin() + 4) == "MFTP");
    CHECK(b[4] == 1);
    CHECK(b[5] == env.profile.wire_id());
    CHECK(b[6] == 8);
    CHECK(b[7] == 0);
    CHECK(b[8] == 3);
    CHECK(b[26] == 3);
    CHECK(b[27] == 4);
    CHECK(b[28] == 1);
    CHECK(b[29] == 6);
    CHECK(b[30] == 0x89);  // PNG signature
}

TEST_CASE("malformed envelopes") {
    std::mt19937_64 rng(73);
    const auto good = sample(rng).serialize();

    CHECK(parse_error({}) == Errc::MalformedEnvelope);
    CHECK(parse_error(std::vector<std::uint8_t>(good.begin(), good.begin() + 20)) == Errc::MalformedEnvelope);
    auto b = good;
    b[0] = 'X';
    CHECK(parse_error(b) == Errc::MalformedEnvelope);
    b = good;
    b[4] = 2;
    CHECK(parse_error(b) == Errc::MalformedEnvelope);
    b = good;
    b[5] = 42;
    CHECK(parse_error(b) == Errc::MalformedEnvelope);
    b = good;
    b[26] = 0;  // weighted profile without weights
    CHECK(parse_error(b) == Errc::MalformedEnvelope);
    b = good;
    b[27] = 0;
    CHECK(parse_error(b) == Errc::MalformedEnvelope);
    b = good;
    b[8] = b[9] = 0;
    CHECK(parse_error(b) == Errc::MalformedEnvelope);
    b = good;
    b[6] = 1;
    b[7] = 0;
    CHECK(parse_error(b) == Errc::MalformedEnvelope);
    CHECK(parse_error(std::vector<std::uint8_t>(good.begin(), good.begin() + 30)) == Errc::MalformedEnvelope);

    // Structurally valid header with a corrupt payload fails on image access.
    b = good;
    b.resize(40);
    const auto env = CiphertextEnvelope::parse(b);
    try {
        (void)env.image();
        FAIL("expected MalformedEnvelope");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MalformedEnvelope);
    }
}

TEST_CASE("encrypt/decrypt through the envelope, including a ParamMismatch") {
    std::mt19937_64 rng(74);
    const Image img = testing::random_image(32, 16, 3, rng);
    const auto key = testing::random_bytes<32>(rng);
    const auto nonce = testing::random_bytes<16>(rng);
    const CipherParams params(FactorProfile::sum_weighted_mean(derive_weights(key, nonce)), 8, 2, key, nonce);
    const auto env = encrypt(img, params);
    const auto parsed = CiphertextEnvelope::parse(env.serialize());
    CHECK(decrypt(parsed, key) == img);
    CHECK(thumbnail(parsed.image(), 8) == thumbnail(img, 8));

    auto bad = parsed;
    bad.block_size = 12;
    try {
        decrypt(bad, key);
        FAIL("expected ParamMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ParamMismatch);
    }
}
